"""Verification harness for the classification of Stein G-invariant domains: Levi signs on
boundary orbits, explicit biholomorphisms onto product models, the affine-chart witness for
unions in SU(1,1), and the torus-orbit profile that rules out W11 u W12 in SU(n,1)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .levi import LeviError, numeric_levi_signature
from .lie_core import (Family, GroupSpec, GrpElement, Realness, expm, random_algebra_element,
                       standard_generators)
from .models import (ModelError, ModelPoint, ParamOutOfDomain, SliceId, group_action,
                     hermitian_pairing, point_residual, representative_point, slice_point)
from .orbits import (DomainId, canonical_slice, canonical_w, domain_contains, invariant_f,
                     orbit_diagram)

BOUNDARY_SAMPLES = 200
GROUP_NORM = 2.0
ROUND_TRIP_SAMPLES = 1000


class OutOfDomain(ModelError):
    pass


# --- Stein classification table ---------------------------------------------

STEIN, NOT_STEIN = "Stein", "NotStein"

_ROWS = ("D1(a)", "D2(a)", "S1(b)", "S2(b)",
         "D1(0) u G.w1 u S1(0)", "D1(0) u G.w4 u S2(0)",
         "D2(0) u G.w2 u S1(0)", "D2(0) u G.w3 u S2(0)")

# columns: rank-one SO0(2,1) ~ SU(1,1), SO0(n,1) n >= 3, SU(n,1) n >= 2
_VERDICTS = {
    "flat": (STEIN,) * 8,
    "SO0": (STEIN, STEIN) + (NOT_STEIN,) * 6,
    "SU": (STEIN, NOT_STEIN, NOT_STEIN, NOT_STEIN, STEIN, STEIN, NOT_STEIN, NOT_STEIN),
}

_W_MODEL = {4: "W11", 5: "W12", 6: "W21", 7: "W22"}


def table_column(spec: GroupSpec) -> str:
    if spec.diagram == 3:
        return "flat"
    return "SO0" if spec.family is Family.SO0 else "SU"


def expected_verdicts(spec: GroupSpec) -> dict[str, str]:
    return dict(zip(_ROWS, _VERDICTS[table_column(spec)]))


def _row_domains(row: int, param: float) -> DomainId:
    if row == 0:
        return DomainId("D1", param)
    if row == 1:
        return DomainId("D2", param)
    if row == 2:
        return DomainId("S1", param)
    if row == 3:
        return DomainId("S2", param)
    d_kind, w, s_kind = {4: ("D1", 1, "S1"), 5: ("D1", 4, "S2"),
                         6: ("D2", 2, "S1"), 7: ("D2", 3, "S2")}[row]
    return DomainId.union(DomainId(d_kind), DomainId("Orbit", w), DomainId(s_kind))


_ROW_PARAMS = {0: (0.0, 0.3, 0.7), 1: (0.0, 0.3, 0.7), 2: (0.0, 0.5, 2.0), 3: (0.0, 0.5, 2.0)}


# --- boundary structure ------------------------------------------------------

@dataclass(frozen=True)
class BoundaryPiece:
    """A smooth boundary orbit G.p of a domain; side is where the domain lies in f."""
    name: str
    point: ModelPoint = field(repr=False)
    side: str


def _parts(spec: GroupSpec, d: DomainId):
    slices: dict[int, float] = {}
    ws: set[int] = set()
    singular: set[str] = set()

    def add(m: DomainId):
        if m.kind == "Union":
            for x in m.members:
                add(x)
        elif m.kind in ("D1", "D2", "S1", "S2"):
            j = canonical_slice(spec, {"D1": 1, "D2": 3, "S1": 2, "S2": 4}[m.kind])
            slices[j] = min(slices.get(j, np.inf), m.param)
            if m.kind == "D1":
                singular.add("z1")
            if m.kind == "D2":
                singular.add("z3")
        elif m.kind == "Orbit":
            ws.add(canonical_w(spec, int(m.param)))
        else:
            raise OutOfDomain(f"{m.kind} has no slice description; use its union form")

    add(d)
    return slices, ws, singular


def _side(f_domain: float, f_boundary: float) -> str:
    return "below" if f_domain < f_boundary else "above"


def boundary_pieces(spec: GroupSpec, d: DomainId) -> list[BoundaryPiece]:
    """Smooth hypersurface orbits in the boundary of d, with the side the domain lies on."""
    slices, ws, singular = _parts(spec, d)
    diag = orbit_diagram(spec)
    out: list[BoundaryPiece] = []
    seen: set[int] = set()
    for j, a in sorted(slices.items()):
        if a > 0:
            p = slice_point(spec, SliceId(j), a)
            inner = slice_point(spec, SliceId(j), a * (1 + 1e-3))
            out.append(BoundaryPiece(f"l{j}({a:g})", p,
                                     _side(invariant_f(spec, inner), invariant_f(spec, p))))
            continue
        inner = slice_point(spec, SliceId(j), 1e-3)
        for code, adj in sorted(diag.slice_adjacency.items()):
            w = canonical_w(spec, int(code[1:]))
            if f"l{j}" not in adj or w in ws or w in seen or w == 5:
                continue
            seen.add(w)
            p = representative_point(spec, f"w{w}")
            out.append(BoundaryPiece(f"w{w}", p,
                                     _side(invariant_f(spec, inner), invariant_f(spec, p))))
    if "z3" in singular and spec.diagram == 9 and 5 not in ws:
        p = representative_point(spec, "w5")
        inner = slice_point(spec, SliceId(3), 1 - 1e-3)
        out.append(BoundaryPiece("w5", p, _side(invariant_f(spec, inner), invariant_f(spec, p))))
    return out


def random_group_element(spec: GroupSpec, rng, max_norm: float = GROUP_NORM) -> GrpElement:
    X = random_algebra_element(spec, rng, rng.uniform(0.0, max_norm))
    return GrpElement(spec, expm(X), Realness.REAL_FORM)


def _compatible(sig, side: str) -> bool:
    return sig.neg == 0 if side == "below" else sig.pos == 0


@dataclass
class PieceCheck:
    name: str
    side: str
    samples: int
    obstructions: int
    signatures: dict
    worst_residual: float

    def to_json(self) -> dict:
        return {"orbit": self.name, "side": self.side, "samples": self.samples,
                "obstructions": self.obstructions,
                "signatures": {str(list(k)): v for k, v in sorted(self.signatures.items())},
                "worst_residual": self.worst_residual}


def check_piece(spec: GroupSpec, piece: BoundaryPiece, rng, samples: int,
                zero_threshold: float = 1e-8) -> PieceCheck:
    sigs: dict = {}
    bad = 0
    worst = 0.0
    for k in range(samples):
        p = piece.point if k == 0 else group_action(spec, random_group_element(spec, rng),
                                                    piece.point)
        worst = max(worst, abs(point_residual(spec, p)) if spec.family is Family.SO0 else 0.0)
        try:
            sig = numeric_levi_signature(spec, p, zero_threshold, check_hypersurface=(k == 0))
        except LeviError:
            continue
        sigs[sig.counts] = sigs.get(sig.counts, 0) + 1
        if not _compatible(sig, piece.side):
            bad += 1
    return PieceCheck(piece.name, piece.side, samples, bad, sigs, worst)


# --- biholomorphisms ---------------------------------------------------------

def _model_domain_check(spec: GroupSpec, name: str) -> None:
    if spec.family is not Family.SU:
        raise OutOfDomain(f"{name} lives in the projective model")
    if name in ("W21", "W22") and spec.n != 1:
        raise OutOfDomain(f"{name} exists only for SU(1,1)")
    if name not in ("W11", "W12", "W21", "W22"):
        raise OutOfDomain(f"no product model for {name}")


def source_factors(name: str) -> tuple[str, str]:
    """Which of (u, v) ranges over the ball."""
    return {"W11": ("ball", "C"), "W12": ("C", "ball"),
            "W21": ("C", "ball"), "W22": ("ball", "C")}[name]


def _forward(spec: GroupSpec, name: str, u, v) -> ModelPoint:
    u = np.atleast_1d(np.asarray(u, dtype=complex))
    v = np.atleast_1d(np.asarray(v, dtype=complex))
    n = spec.n
    if u.shape != (n,) or v.shape != (n,):
        raise OutOfDomain(f"expected u, v in C^{n}")
    fu, fv = source_factors(name)
    if (fu == "ball" and np.linalg.norm(u) >= 1) or (fv == "ball" and np.linalg.norm(v) >= 1):
        raise OutOfDomain("argument outside the unit ball factor")
    uv = complex(np.sum(u * v))
    if name == "W11":
        z, w = np.append(u, 1.0), np.append(v.conj(), 1 + np.conj(uv))
    elif name == "W12":
        z, w = np.append(u, 1 + uv), np.append(v.conj(), 1.0)
    elif name == "W21":
        z, w = np.array([1 + uv, u[0]]), np.array([1.0, np.conj(v[0])])
    else:
        z, w = np.array([1.0, u[0]]), np.array([1 + np.conj(uv), np.conj(v[0])])
    return ModelPoint(spec, z=z, w=w)


def _inverse(spec: GroupSpec, name: str, p: ModelPoint, tol: float = 1e-12):
    z = np.asarray(p.z, dtype=complex)
    w = np.asarray(p.w, dtype=complex)
    B = hermitian_pairing(z, w)
    if abs(B) <= tol * np.linalg.norm(z) * np.linalg.norm(w):
        raise OutOfDomain("point on the incidence divisor")
    if name == "W11":
        if hermitian_pairing(z, z).real >= 0:
            raise OutOfDomain("<z,z> must be negative")
        z = z / z[-1]
        w = w * np.conj(-1.0 / hermitian_pairing(z, w))
        return z[:-1], w[:-1].conj()
    if name == "W12":
        if hermitian_pairing(w, w).real >= 0:
            raise OutOfDomain("<w,w> must be negative")
        w = w / w[-1]
        z = z * (-1.0 / hermitian_pairing(z, w))
        return z[:-1], w[:-1].conj()
    if name == "W21":
        if hermitian_pairing(w, w).real <= 0:
            raise OutOfDomain("<w,w> must be positive")
        w = w / w[0]
        z = z / hermitian_pairing(z, w)
        return z[1:], w[1:].conj()
    if hermitian_pairing(z, z).real <= 0:
        raise OutOfDomain("<z,z> must be positive")
    z = z / z[0]
    w = w * np.conj(1.0 / hermitian_pairing(z, w))
    return z[1:], w[1:].conj()


def model_biholomorphism(spec: GroupSpec, d, direction: str, coords):
    """Forward: (u, v) -> point of the domain. Inverse: point -> (u, v)."""
    name = d.kind if isinstance(d, DomainId) else str(d)
    _model_domain_check(spec, name)
    if direction == "forward":
        u, v = coords
        return _forward(spec, name, u, v)
    if direction == "inverse":
        return _inverse(spec, name, coords)
    raise ValueError(f"unknown direction {direction!r}")


def domain_sign_test(spec: GroupSpec, name: str, p: ModelPoint, tol: float = 1e-12) -> bool:
    """Sign characterization of the W-domains by the Hermitian forms."""
    q = p.normalized()
    P = hermitian_pairing(q.z, q.z).real
    Q = hermitian_pairing(q.w, q.w).real
    if abs(hermitian_pairing(q.z, q.w)) <= tol:
        return False
    return {"W11": P < 0, "W12": Q < 0, "W21": Q > 0, "W22": P > 0}[name]


def _random_source(name: str, n: int, rng):
    def ball():
        x = rng.standard_normal(n) + 1j * rng.standard_normal(n)
        return x / np.linalg.norm(x) * rng.uniform(0, 0.999) ** (1 / (2 * n))

    def plane():
        return 2.0 * (rng.standard_normal(n) + 1j * rng.standard_normal(n))

    fu, fv = source_factors(name)
    return (ball() if fu == "ball" else plane()), (ball() if fv == "ball" else plane())


@dataclass
class RoundTrip:
    name: str
    samples: int
    forward_inverse: float
    inverse_forward: float
    sign_failures: int
    membership_failures: int

    @property
    def passed(self) -> bool:
        return (self.forward_inverse < 1e-9 and self.inverse_forward < 1e-8
                and self.sign_failures == 0 and self.membership_failures == 0)


def _domain_sample(spec: GroupSpec, name: str, rng) -> ModelPoint:
    """Random point of a W-domain: G-translate of a slice point it contains."""
    slices = {"W11": (1, 2), "W12": (1, 4), "W21": (3, 2), "W22": (3, 4)}[name]
    j = int(rng.choice(slices))
    s = rng.uniform(0.05, 0.95) if j in (1, 3) else rng.uniform(0.05, 1.5)
    p = slice_point(spec, SliceId(j), s)
    return group_action(spec, random_group_element(spec, rng, 1.0), p)


def biholomorphism_round_trip(spec: GroupSpec, name: str, rng,
                              samples: int = ROUND_TRIP_SAMPLES,
                              membership_samples: int = 50) -> RoundTrip:
    _model_domain_check(spec, name)
    fi = 0.0
    sign_bad = 0
    for _ in range(samples):
        u, v = _random_source(name, spec.n, rng)
        p = _forward(spec, name, u, v)
        if not domain_sign_test(spec, name, p):
            sign_bad += 1
        u2, v2 = _inverse(spec, name, p)
        fi = max(fi, float(np.linalg.norm(u2 - u) + np.linalg.norm(v2 - v))
                 / (1 + float(np.linalg.norm(u) + np.linalg.norm(v))))
    union = _union_of_model(name)
    mem_bad = 0
    inv = 0.0
    for _ in range(membership_samples):
        p = _domain_sample(spec, name, rng)
        if not domain_contains(spec, union, p):
            mem_bad += 1
        u, v = _inverse(spec, name, p)
        inv = max(inv, _forward(spec, name, u, v).distance(p))
    return RoundTrip(name, samples, fi, inv, sign_bad, mem_bad)


def _union_of_model(name: str) -> DomainId:
    row = {v: k for k, v in _W_MODEL.items()}[name]
    return _row_domains(row, 0.0)


# --- chart witness and torus profile -----------------------------------------

def union_chart_point(u: complex, v: complex) -> ModelPoint:
    """phi(u, v) = ([u : 1], [1 : conj v]) in P^1 x conj P^1."""
    return ModelPoint(GroupSpec(Family.SU, 1), z=np.array([u, 1.0]),
                      w=np.array([1.0, np.conj(v)]))


def union_chart_preimage(u: complex, v: complex) -> bool:
    """Membership of phi(u, v) in W11 u W21, from the Hermitian forms."""
    p = union_chart_point(u, v)
    spec = p.spec
    return domain_sign_test(spec, "W11", p) or domain_sign_test(spec, "W21", p)


def union_chart_predicate(u: complex, v: complex) -> bool:
    return u != v and (abs(u) < 1 or abs(v) < 1)


def chart_witness(rng, samples: int = 2000) -> dict:
    """Agreement of the chart preimage with {u != v, |u| < 1 or |v| < 1}, and a failure of
    logarithmic convexity: two points of the preimage whose modulus-geometric-mean point is
    outside it, with arguments chosen off the diagonal."""
    mismatches = 0
    for _ in range(samples):
        u, v = (rng.standard_normal(2) * 1.2) @ np.array([1, 1j]), \
               (rng.standard_normal(2) * 1.2) @ np.array([1, 1j])
        if union_chart_preimage(u, v) != union_chart_predicate(u, v):
            mismatches += 1
    for u, v in ((0.5, 0.5), (0.5, 2.0), (2.0, 3.0), (1.5, 0.2j)):
        if union_chart_preimage(u, v) != union_chart_predicate(u, v):
            mismatches += 1
    a = (0.5, 4.0)
    b = (4.0, 0.5 * np.exp(1j))
    mid = (np.sqrt(abs(a[0]) * abs(b[0])), np.sqrt(abs(a[1]) * abs(b[1])) * 1j)
    log_convex_fails = (union_chart_preimage(*a) and union_chart_preimage(*b)
                        and not union_chart_preimage(*mid))
    return {"samples": samples, "mismatches": mismatches,
            "log_convexity_failure": bool(log_convex_fails),
            "witness": {"inside": [list(map(complex, a)), list(map(complex, b))],
                        "outside": list(map(complex, mid))}}


def torus_path_point(spec: GroupSpec, t: float, s: float) -> ModelPoint:
    """exp(i s C') . l1(t)."""
    if spec.family is not Family.SU:
        raise ParamOutOfDomain("the torus profile is defined for SU(n,1)")
    Cp = standard_generators(spec)["C'"].M
    g = GrpElement(spec, expm(1j * s * Cp), Realness.COMPLEXIFIED)
    return group_action(spec, g, slice_point(spec, SliceId(1), t))


def torus_profile_closed_form(t: float, s) -> np.ndarray:
    """f along the path, as minus a product of two exponential factors."""
    th = np.pi / 4 * (1 - t)
    s = np.asarray(s, dtype=float)
    sn, cs = np.sin(th) ** 2, np.cos(th) ** 2
    return -((np.exp(2 * s) * sn - np.exp(-2 * s) * cs) * (np.exp(-2 * s) * sn - np.exp(2 * s) * cs))


def torus_profile_roots(t: float) -> tuple[float, float]:
    r = 0.5 * np.log(1 / np.tan(np.pi / 4 * (1 - t)))
    return (-r, r)


@dataclass
class TorusProfile:
    t: float
    roots_closed: tuple
    roots_numeric: tuple
    zero_count: int
    max_profile_error: float
    stays_in_omega: bool

    @property
    def root_error(self) -> float:
        return max(abs(a - b) for a, b in zip(self.roots_closed, self.roots_numeric))

    def to_json(self) -> dict:
        return {"t": self.t, "roots_closed": list(self.roots_closed),
                "roots_numeric": list(self.roots_numeric), "zero_count": self.zero_count,
                "max_profile_error": self.max_profile_error,
                "stays_in_omega": self.stays_in_omega}


def torus_orbit_profile(spec: GroupSpec, t: float, grid: int = 401,
                        membership_points: int = 41) -> TorusProfile:
    if spec.family is not Family.SU:
        raise ParamOutOfDomain("the torus profile is defined for SU(n,1)")
    if not 0.0 < t < 1.0:
        raise ParamOutOfDomain("t must lie in (0, 1)")
    roots = torus_profile_roots(t)
    R = max(abs(roots[0]), 0.25) * 2 + 1.0
    ss = np.linspace(-R, R, grid)

    def f(s):
        return invariant_f(spec, torus_path_point(spec, t, s))

    vals = np.array([f(s) for s in ss])
    closed = torus_profile_closed_form(t, ss)
    err = float(np.max(np.abs(vals - closed) / np.maximum(1.0, np.abs(closed))))
    signs = np.sign(vals)
    signs = signs[signs != 0]
    zero_count = int(np.sum(signs[1:] != signs[:-1]))
    numeric = []
    for k in range(len(ss) - 1):
        if vals[k] == 0.0:
            numeric.append(float(ss[k]))
        elif vals[k] * vals[k + 1] < 0:
            numeric.append(float(brentq(f, ss[k], ss[k + 1], xtol=1e-14, rtol=1e-14)))
    omega = DomainId.union(DomainId("D1"), DomainId("Orbit", 1), DomainId("S1"),
                           DomainId("Orbit", 4), DomainId("S2"))
    check = list(np.linspace(-R, R, membership_points)) + list(roots)
    inside = all(domain_contains(spec, omega, torus_path_point(spec, t, s), tol=1e-7)
                 for s in check)
    return TorusProfile(t, roots, tuple(numeric) if len(numeric) == 2 else tuple(numeric),
                        zero_count, err, inside)


# --- table verification ------------------------------------------------------

@dataclass
class TableEntry:
    domain: str
    column: str
    verdict_expected: str
    verdict_observed: str
    method: list
    samples: int
    worst_residual: float
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict_expected == self.verdict_observed

    def to_json(self) -> dict:
        return {"domain": self.domain, "verdict_expected": self.verdict_expected,
                "verdict_observed": self.verdict_observed, "method": "+".join(self.method),
                "samples": self.samples, "worst_residual": self.worst_residual,
                "pass": self.passed}


def _levi_row(spec, domains, rng, samples, zero_threshold):
    """Stein when every parameter is obstruction-free; NotStein when every parameter has one."""
    per = []
    total = 0
    worst = 0.0
    for d in domains:
        checks = [check_piece(spec, pc, rng, samples, zero_threshold)
                  for pc in boundary_pieces(spec, d)]
        total += sum(c.samples for c in checks)
        worst = max([worst] + [c.worst_residual for c in checks])
        per.append({"domain": str(d), "pieces": [c.to_json() for c in checks],
                    "obstructed": any(c.obstructions for c in checks)})
    if all(not x["obstructed"] for x in per):
        obs = STEIN
    elif all(x["obstructed"] for x in per):
        obs = NOT_STEIN
    else:
        obs = "Mixed"
    return obs, total, worst, per


def verify_stein_table(spec: GroupSpec, samples: int = BOUNDARY_SAMPLES, seed: int = 0,
                       zero_threshold: float = 1e-8,
                       round_trip_samples: int = ROUND_TRIP_SAMPLES) -> list[TableEntry]:
    rng = np.random.default_rng(seed)
    col = table_column(spec)
    expected = expected_verdicts(spec)
    out: list[TableEntry] = []
    for row, name in enumerate(_ROWS):
        params = _ROW_PARAMS.get(row, (0.0,))
        domains = [_row_domains(row, a) for a in params]
        obs, total, worst, per = _levi_row(spec, domains, rng, samples, zero_threshold)
        method = ["BoundaryLevi"]
        details = {"levi": per}
        model = _W_MODEL.get(row)
        if (model and spec.family is Family.SU and expected[name] == STEIN):
            rt = biholomorphism_round_trip(spec, model, rng, round_trip_samples)
            method.append("Biholomorphism")
            details["biholomorphism"] = {"model": model, "forward_inverse": rt.forward_inverse,
                                         "inverse_forward": rt.inverse_forward,
                                         "sign_failures": rt.sign_failures,
                                         "membership_failures": rt.membership_failures}
            worst = max(worst, rt.forward_inverse, rt.inverse_forward)
            total += rt.samples
            if not rt.passed:
                obs = "Mixed"
        out.append(TableEntry(name, col, expected[name], obs, method, total, worst, details))
    if spec.family is Family.SU and spec.n == 1:
        w = chart_witness(rng)
        obs = NOT_STEIN if (w["mismatches"] == 0 and w["log_convexity_failure"]) else "Mixed"
        out.append(TableEntry("W11 u W21", col, NOT_STEIN, obs, ["ChartWitness"],
                              w["samples"], 0.0, w))
    if spec.family is Family.SU and spec.n >= 2:
        profs = [torus_orbit_profile(spec, t) for t in (0.1, 0.3, 0.5, 0.7, 0.9)]
        ok = all(p.zero_count == 2 and p.stays_in_omega and p.root_error < 1e-8 for p in profs)
        worst = max(max(p.root_error for p in profs), max(p.max_profile_error for p in profs))
        out.append(TableEntry("W11 u W12", col, NOT_STEIN, NOT_STEIN if ok else "Mixed",
                              ["OrbitConvexityProfile"], sum(401 for _ in profs), worst,
                              {"profiles": [p.to_json() for p in profs]}))
    return out
