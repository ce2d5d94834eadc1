"""Command-line front end. Every subcommand prints one JSON document.

Exit status: 0 when every check in the report passes, 1 when a check fails,
2 on parse or validation errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

from .covering import (GROUP_COVER, ORBIT_COVER, SPEC as COVER_SPEC, CoverPoint,
                       TargetNotInImage, covering_map, fiber_cardinality, torus)
from .levi import (SITE_CASES, LeviError, algebraic_levi, nilpotent_site,
                   numeric_levi_signature)
from .lie_core import Family, GroupSpec, LieCoreError, expm, random_algebra_element
from .models import ModelPoint, SliceId, slice_point
from .orbits import Unclassifiable, classify, classify_point, orbit_diagram
from .stein import verify_stein_table

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def clean(obj):
    """JSON-ready copy: numpy scalars to Python, -0.0 to 0.0, tuples to lists."""
    if isinstance(obj, dict):
        return {str(k): clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if not np.isfinite(x):
            return None
        return 0.0 if x == 0 else x
    if isinstance(obj, (complex, np.complexfloating)):
        return [clean(obj.real), clean(obj.imag)]
    return obj


def dumps(obj) -> str:
    return json.dumps(clean(obj), sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _spec(args) -> GroupSpec:
    try:
        return GroupSpec(Family(args.family), args.n)
    except (ValueError, LieCoreError) as exc:
        raise UsageError(str(exc)) from exc


def _seed(args) -> int:
    env = os.environ.get("ORBITSCOPE_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"ORBITSCOPE_SEED must be an integer, got {env!r}") from exc
    return args.seed


def _read_point(args, spec: GroupSpec) -> ModelPoint:
    if args.stdin:
        text = sys.stdin.read()
    elif args.point is not None:
        text = args.point
    else:
        raise UsageError("a point is required (--point JSON or --stdin)")
    try:
        data = json.loads(text)
        return ModelPoint.from_json(data, spec)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, LieCoreError) as exc:
        raise UsageError(f"invalid point: {exc}") from exc


def cmd_classify(args) -> tuple[dict, int]:
    spec = _spec(args)
    p = _read_point(args, spec)
    try:
        rep = classify(spec, p, args.tol)
    except Unclassifiable as exc:
        return {"point": p.to_json(), "error": str(exc), "nearest": str(exc.nearest),
                "distance": exc.distance}, EXIT_FAIL
    out = rep.to_json()
    out["point"] = p.to_json()
    return out, EXIT_OK


def _levi_report(p: ModelPoint, label: str, method: str, sig) -> dict:
    return {"point": p.to_json(), "orbit_label": label, "method": method,
            "pos": sig.pos, "neg": sig.neg, "zero": sig.zero, "character": sig.character}


def cmd_levi(args) -> tuple[dict | list, int]:
    spec = _spec(args)
    if args.site is not None:
        try:
            site = nilpotent_site(spec, args.site)
        except LieCoreError as exc:
            raise UsageError(str(exc)) from exc
        p = site.point()
    else:
        if args.method != "numeric":
            raise UsageError("the algebraic method needs --site")
        p = _read_point(args, spec)
        site = None
    label = classify_point(spec, p).code
    reports = []
    try:
        if args.method in ("numeric", "both"):
            reports.append(_levi_report(p, label, "numeric",
                                        numeric_levi_signature(spec, p, args.zero_threshold)))
        if args.method in ("algebraic", "both"):
            sig = algebraic_levi(spec, site).signature(args.zero_threshold, aligned=True)
            reports.append(_levi_report(p, label, "algebraic", sig))
    except LeviError as exc:
        return {"point": p.to_json(), "orbit_label": label, "error": str(exc)}, EXIT_FAIL
    if len(reports) == 1:
        return reports[0], EXIT_OK
    agree = all((r["pos"], r["neg"], r["zero"]) == (reports[0]["pos"], reports[0]["neg"],
                                                    reports[0]["zero"]) for r in reports)
    return reports, EXIT_OK if agree else EXIT_FAIL


def cmd_slice(args) -> tuple[dict, int]:
    spec = _spec(args)
    try:
        p = slice_point(spec, SliceId(args.slice, args.extended), args.param,
                        method=args.slice_method)
    except LieCoreError as exc:
        raise UsageError(str(exc)) from exc
    out = p.to_json()
    out["slice"] = args.slice
    out["param"] = args.param
    return out, EXIT_OK


def cmd_verify_table(args) -> tuple[list, int]:
    spec = _spec(args)
    rows = verify_stein_table(spec, samples=args.samples, seed=_seed(args),
                              zero_threshold=args.zero_threshold)
    return [r.to_json() for r in rows], EXIT_OK if all(r.passed for r in rows) else EXIT_FAIL


def cmd_cover(args) -> tuple[dict, int]:
    if args.s <= 0:
        raise UsageError("--s must be positive")
    rng = np.random.default_rng(_seed(args))
    g = expm(random_algebra_element(COVER_SPEC, rng, args.g_norm)) if args.g_norm > 0 \
        else np.eye(2, dtype=complex)
    if args.variant == ORBIT_COVER:
        target = covering_map(CoverPoint(g, args.s), ORBIT_COVER)
    else:
        lam = complex(args.lam[0], args.lam[1])
        if lam == 0:
            raise UsageError("--lam must be non-zero")
        target = covering_map(CoverPoint(g, args.s, torus(lam)), GROUP_COVER)
    try:
        rep = fiber_cardinality(target, args.variant, rng=rng)
    except TargetNotInImage as exc:
        return {"variant": args.variant, "error": str(exc)}, EXIT_FAIL
    ok = rep.fiber_count == 2 and all(r == rep.source_dim for r in rep.jacobian_ranks)
    return rep.to_json(), EXIT_OK if ok else EXIT_FAIL


def cmd_diagram(args) -> tuple[dict, int]:
    spec = _spec(args)
    out = orbit_diagram(spec).to_json()
    out["family"] = spec.family.value
    out["n"] = spec.n
    return out, EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="orbitscope",
                                 description="G-orbits, Levi forms and Stein domains in "
                                             "complexified rank-one symmetric spaces.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, spec=True):
        if spec:
            p.add_argument("--family", required=True, choices=[f.value for f in Family])
            p.add_argument("--n", type=int, required=True)
        p.add_argument("--json", metavar="PATH", help="write the report here instead of stdout")
        p.add_argument("--tol", type=float, default=1e-9)
        p.add_argument("--zero-threshold", type=float, default=1e-8)
        p.add_argument("--samples", type=int, default=200)
        p.add_argument("--seed", type=int, default=0)

    def point_input(p):
        g = p.add_mutually_exclusive_group()
        g.add_argument("--point", help="model point as JSON")
        g.add_argument("--stdin", action="store_true", help="read the point JSON from stdin")

    p = sub.add_parser("classify", help="orbit label of a model point")
    common(p)
    point_input(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("levi", help="Levi signature of a hypersurface orbit")
    common(p)
    point_input(p)
    p.add_argument("--site", choices=SITE_CASES, help="use a nilpotent base point")
    p.add_argument("--method", choices=("numeric", "algebraic", "both"), default="numeric")
    p.set_defaults(func=cmd_levi)

    p = sub.add_parser("slice", help="evaluate a slice")
    common(p)
    p.add_argument("--slice", type=int, required=True)
    p.add_argument("--param", type=float, required=True)
    p.add_argument("--extended", action="store_true")
    p.add_argument("--slice-method", choices=("closed", "exp"), default="closed")
    p.set_defaults(func=cmd_slice)

    p = sub.add_parser("verify-table", help="check the Stein classification table")
    common(p)
    p.set_defaults(func=cmd_verify_table)

    p = sub.add_parser("cover", help="fiber count of the SU(1,1) covering maps")
    common(p, spec=False)
    p.add_argument("--variant", choices=(ORBIT_COVER, GROUP_COVER), default=ORBIT_COVER)
    p.add_argument("--s", type=float, default=0.7)
    p.add_argument("--g-norm", type=float, default=0.0,
                   help="norm of a random group element applied to the target")
    p.add_argument("--lam", type=float, nargs=2, default=(1.0, 0.0), metavar=("RE", "IM"))
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("diagram", help="orbit diagram of the group")
    common(p)
    p.set_defaults(func=cmd_diagram)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        report, status = args.func(args)
    except UsageError as exc:
        print(f"orbitscope: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = dumps(report)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
