"""Covering constructions over the S-domain of SU(1,1): the double cover G x R>0 -> S1(0),
its lift into G^C with the K^C-torus factor, and the holomorphic section over
Delta x Delta minus the diagonal with the C*-trivialization."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq, least_squares

from .lie_core import (Family, GroupSpec, GrpElement, LieCoreError, Realness, expm,
                       from_coordinates, real_form_basis, standard_generators)
from .models import ModelPoint, ParamOutOfDomain, SliceId, group_action, representative_point
from .orbits import classify_point, invariant_f

SPEC = GroupSpec(Family.SU, 1)
ORBIT_COVER, GROUP_COVER = "orbitCover", "groupCover"
SECTION_DOMAIN = "S2"


class CoveringError(LieCoreError):
    pass


class TargetNotInImage(CoveringError):
    pass


class DiagonalDegenerate(CoveringError):
    pass


@dataclass(frozen=True)
class CoverPoint:
    g: np.ndarray
    s: float
    k: np.ndarray | None = None

    def __post_init__(self):
        if not self.s > 0:
            raise ParamOutOfDomain("s must be positive")
        g = np.asarray(self.g, dtype=complex)
        if GrpElement(SPEC, g, Realness.REAL_FORM).residual() > 1e-8:
            raise CoveringError("g is not in SU(1,1)")
        object.__setattr__(self, "g", g)
        if self.k is not None:
            k = np.asarray(self.k, dtype=complex)
            if (abs(k[0, 1]) + abs(k[1, 0]) > 1e-9 * np.linalg.norm(k)
                    or abs(k[0, 0] * k[1, 1] - 1) > 1e-9):
                raise CoveringError("k must be diag(1/lambda, lambda)")
            object.__setattr__(self, "k", k)


def torus(lam: complex) -> np.ndarray:
    if lam == 0:
        raise CoveringError("lambda must be non-zero")
    return np.diag([1 / lam, lam]).astype(complex)


def lifted_slice(s: float) -> np.ndarray:
    """exp(i s C') exp(i A2) in SL(2, C)."""
    if not s > 0:
        raise ParamOutOfDomain("s must be positive")
    g = standard_generators(SPEC)
    return expm(1j * s * g["C'"].M) @ expm(1j * g["A2"].M)


def project(M: np.ndarray) -> ModelPoint:
    """pi(M) = M . ([0:1], [0:1])."""
    return group_action(SPEC, GrpElement(SPEC, M), representative_point(SPEC, "z1"))


def slice2(s: float) -> ModelPoint:
    return project(lifted_slice(s))


def covering_map(p: CoverPoint, variant: str = ORBIT_COVER):
    if variant == ORBIT_COVER:
        return group_action(SPEC, GrpElement(SPEC, p.g, Realness.REAL_FORM), slice2(p.s))
    if variant == GROUP_COVER:
        k = p.k if p.k is not None else np.eye(2, dtype=complex)
        return p.g @ lifted_slice(p.s) @ np.linalg.inv(k)
    raise ValueError(f"unknown variant {variant!r}")


def _f_slice(s: float) -> float:
    return invariant_f(SPEC, slice2(s))


def slice_parameter(target: ModelPoint) -> float:
    """Solve f(l2(s)) = f(target); f grows monotonically along the slice."""
    ft = invariant_f(SPEC, target)
    if ft <= 0:
        raise TargetNotInImage("target is not on a principal orbit through l2")
    lo, hi = 1e-8, 1.0
    while _f_slice(hi) < ft:
        hi *= 2
        if hi > 64:
            raise TargetNotInImage("slice parameter out of range")
    return float(brentq(lambda s: _f_slice(s) - ft, lo, hi, xtol=1e-15, rtol=1e-15))


def _su11(x: np.ndarray) -> np.ndarray:
    return expm(from_coordinates(SPEC, x))


def _proj_residual(a: ModelPoint, b: ModelPoint) -> np.ndarray:
    parts = []
    for x, y in ((a.z, b.z), (a.w, b.w)):
        x = x / np.linalg.norm(x)
        y = y / np.linalg.norm(y)
        c = np.vdot(y, x)
        if abs(c) > 0:
            y = y * (c / abs(c))
        parts.append(x - y)
    d = np.concatenate(parts)
    return np.concatenate([d.real, d.imag])


def _solve_g(p0: ModelPoint, target: ModelPoint, rng, starts: int,
             stop_after: int | None = None) -> list[np.ndarray]:
    def resid(x):
        if np.linalg.norm(x) > 30:
            return np.full(8, 1e3)
        try:
            q = group_action(SPEC, GrpElement(SPEC, _su11(x)), p0)
        except (np.linalg.LinAlgError, ValueError, LieCoreError):
            return np.full(8, 1e3)
        return _proj_residual(q, target)

    sols = []
    for k in range(starts):
        x0 = np.zeros(3) if k == 0 else rng.standard_normal(3) * rng.uniform(0, 2)
        r = least_squares(resid, x0, xtol=1e-15, ftol=1e-15, gtol=1e-15)
        if np.linalg.norm(r.fun) < 1e-9:
            sols.append(_su11(r.x))
            if stop_after and len(sols) >= stop_after:
                break
    return sols


def isotropy(p0: ModelPoint, rng=None, starts: int = 40) -> list[np.ndarray]:
    """Elements h of SU(1,1) with h . p0 = p0, found from random starts and the
    identity, deduplicated."""
    rng = rng if rng is not None else np.random.default_rng(0)
    cands = [np.eye(2, dtype=complex), -np.eye(2, dtype=complex)]
    cands += _solve_g(p0, p0, rng, starts)
    # polish each candidate: h . p0 = p0 up to projective scale
    out: list[np.ndarray] = []
    for h in cands:
        if group_action(SPEC, GrpElement(SPEC, h), p0).distance(p0) > 1e-8:
            continue
        if all(np.linalg.norm(h - o) > 1e-6 for o in out):
            out.append(h)
    return out


@dataclass
class FiberReport:
    variant: str
    fiber_count: int
    preimages: list
    jacobian_ranks: list
    source_dim: int

    def to_json(self) -> dict:
        pre = []
        for q in self.preimages:
            item = {"g": [[[float(z.real), float(z.imag)] for z in row] for row in q.g],
                    "s": float(q.s)}
            if q.k is not None:
                item["k"] = [float(q.k[1, 1].real), float(q.k[1, 1].imag)]
            pre.append(item)
        return {"variant": self.variant, "fiber_count": self.fiber_count, "preimages": pre,
                "jacobian_ranks": self.jacobian_ranks}


def jacobian_rank(p: CoverPoint, variant: str, h: float = 1e-6, rtol: float = 1e-6) -> int:
    """Rank of the differential at p in real coordinates (X in su(1,1), ds[, dlambda])."""
    basis = real_form_basis(SPEC)

    def image(dx: np.ndarray) -> np.ndarray:
        g = p.g @ expm(np.tensordot(dx[:3], np.stack(basis), axes=1))
        s = p.s + dx[3]
        if variant == ORBIT_COVER:
            v = covering_map(CoverPoint(g, s), variant).as_vector()
        else:
            k = p.k if p.k is not None else np.eye(2, dtype=complex)
            dl = complex(dx[4], dx[5])
            k2 = k @ np.diag([np.exp(-dl), np.exp(dl)])
            v = covering_map(CoverPoint(g, s, k2), variant).ravel()
        return np.concatenate([v.real, v.imag])

    dim = 4 if variant == ORBIT_COVER else 6
    cols = []
    for a in range(dim):
        e = np.zeros(dim)
        e[a] = h
        cols.append((image(e) - image(-e)) / (2 * h))
    J = np.stack(cols, axis=1)
    s = np.linalg.svd(J, compute_uv=False)
    return int(np.sum(s > rtol * s[0]))


def fiber_cardinality(target, variant: str = ORBIT_COVER, rng=None,
                      starts: int = 12) -> FiberReport:
    rng = rng if rng is not None else np.random.default_rng(0)
    if variant == ORBIT_COVER:
        pt = target
    elif variant == GROUP_COVER:
        M = np.asarray(getattr(target, "M", target), dtype=complex)
        if abs(np.linalg.det(M) - 1) > 1e-9:
            raise TargetNotInImage("target is not in SL(2, C)")
        pt = project(M)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    lab = classify_point(SPEC, pt)
    if not (lab.kind == "principal" and lab.slice == 2):
        raise TargetNotInImage(f"target lies on {lab}, outside the image")
    s = slice_parameter(pt)
    p0 = slice2(s)
    sols = _solve_g(p0, pt, rng, starts, stop_after=1)
    if not sols:
        raise TargetNotInImage("no group element reaches the target")
    g0 = sols[0]
    pre = []
    for hh in isotropy(p0, rng, starts):
        g = g0 @ hh
        if variant == ORBIT_COVER:
            pre.append(CoverPoint(g, s))
            continue
        kinv = np.linalg.inv(lifted_slice(s)) @ np.linalg.inv(g) @ M
        if abs(kinv[0, 1]) + abs(kinv[1, 0]) > 1e-8:
            continue
        pre.append(CoverPoint(g, s, np.diag(1.0 / np.diag(kinv))))
    ranks = [jacobian_rank(q, variant) for q in pre]
    return FiberReport(variant, len(pre), pre, ranks, 4 if variant == ORBIT_COVER else 6)


def section(u: complex, v: complex) -> np.ndarray:
    """[[1, 1/(u-v)], [v, u/(u-v)]], with det 1."""
    if abs(u - v) < 1e-14:
        raise DiagonalDegenerate("u and v must differ")
    if abs(u) >= 1 or abs(v) >= 1:
        raise ParamOutOfDomain("u and v must lie in the unit disk")
    return np.array([[1.0, 1.0 / (u - v)], [v, u / (u - v)]], dtype=complex)


def section_and_trivialization(u: complex, v: complex, lam: complex | None = None) -> np.ndarray:
    M = section(u, v)
    return M if lam is None else M @ torus(lam)


def section_base_point(u: complex, v: complex) -> ModelPoint:
    """([1 : u], [conj v : 1])."""
    return ModelPoint(SPEC, z=np.array([1.0, u]), w=np.array([np.conj(v), 1.0]))
