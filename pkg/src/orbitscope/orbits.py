"""G-invariants, orbit classification, invariant domains and the orbit-diagram catalog."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq

from .lie_core import (DEFAULT_TOL, Family, GroupSpec, GrpElement, LieCoreError, Realness,
                       expm, random_algebra_element, real_form_basis, sigma_algebra, standard_generators)
from .models import (ModelPoint, hermitian_pairing, point_residual, representative_point,
                     slice_point)

RANK_RTOL = 1e-8

__all__ = [
    "OrbitLabel", "OrbitDiagram", "DomainId", "ClassificationReport", "hermitian_pairing",
    "invariant_f", "orbit_tangent_rank", "tangent_map", "classify_point", "classify",
    "domain_contains", "orbit_diagram", "nilcone_key", "nilcone_calibration", "nilcone_samples",
    "canonical_w", "f_on_slice", "IncidenceDivisor", "Unclassifiable", "DomainNotInFamily",
]


class OrbitError(LieCoreError):
    pass


class IncidenceDivisor(OrbitError):
    pass


class Unclassifiable(OrbitError):
    def __init__(self, message, nearest=None, distance=None):
        super().__init__(message)
        self.nearest = nearest
        self.distance = distance


class DomainNotInFamily(OrbitError):
    pass


# --- labels and diagrams -----------------------------------------------------

@dataclass(frozen=True)
class OrbitLabel:
    """kind is one of "z1", "z2", "z3", "principal", "nonclosed"."""
    kind: str
    slice: int | None = None
    param: float | None = None
    w: int | None = None

    def __post_init__(self):
        if self.kind not in ("z1", "z2", "z3", "principal", "nonclosed"):
            raise OrbitError(f"unknown label kind {self.kind!r}")
        if self.kind == "principal" and (self.slice is None or self.param is None):
            raise OrbitError("principal labels need a slice and a parameter")
        if self.kind == "nonclosed" and self.w not in (1, 2, 3, 4, 5):
            raise OrbitError("non-closed labels need a w index in 1..5")

    @property
    def code(self) -> str:
        if self.kind == "principal":
            return f"l{self.slice}"
        if self.kind == "nonclosed":
            return f"w{self.w}"
        return self.kind

    def same_orbit(self, other: "OrbitLabel", param_tol: float = 1e-6) -> bool:
        if self.code != other.code:
            return False
        if self.kind == "principal":
            return abs(self.param - other.param) <= param_tol
        return True

    def __str__(self):
        if self.kind == "principal":
            return f"l{self.slice}({self.param:.6g})"
        return self.code


@dataclass(frozen=True)
class OrbitDiagram:
    diagram: int
    nodes: tuple
    closure_edges: dict
    slice_adjacency: dict
    slice_ends: dict

    def to_json(self) -> dict:
        return {
            "diagram": self.diagram,
            "nodes": list(self.nodes),
            "closure_edges": {k: list(v) for k, v in sorted(self.closure_edges.items())},
            "slice_adjacency": {k: list(v) for k, v in sorted(self.slice_adjacency.items())},
            "slice_ends": {k: list(v) for k, v in sorted(self.slice_ends.items())},
        }


def _diagram(d: int) -> OrbitDiagram:
    if d == 3:
        ws = ("w1", "w2", "w3", "w4")
        slices = ("l1", "l2", "l3", "l4")
        adj = {"w1": ("l1", "l2"), "w2": ("l3", "l2"), "w3": ("l3", "l4"), "w4": ("l1", "l4")}
    elif d == 4:
        ws = ("w1", "w2")
        slices = ("l1", "l2", "l3")
        adj = {"w1": ("l1", "l2"), "w2": ("l3", "l2")}
    elif d == 9:
        ws = ("w1", "w2", "w3", "w4", "w5")
        slices = ("l1", "l2", "l3", "l4", "l5")
        adj = {"w1": ("l1", "l2"), "w2": ("l3", "l2"), "w3": ("l3", "l4"), "w4": ("l1", "l4"),
               "w5": ("l3", "l5")}
    elif d == 10:
        ws = ("w1", "w2", "w5")
        slices = ("l1", "l2", "l3", "l5")
        adj = {"w1": ("l1", "l2"), "w2": ("l3", "l2"), "w5": ("l3", "l5")}
    else:
        raise OrbitError(f"unknown diagram ({d})")
    closure = {w: (("z3",) if w == "w5" else ("z2",)) for w in ws}
    ends = {"l1": ("z2", "z1"), "l3": ("z2", "z3"), "l2": ("z2", "inf"), "l4": ("z2", "inf"),
            "l5": ("z3", "inf")}
    ends = {k: v for k, v in ends.items() if k in slices}
    nodes = ("z1", "z2", "z3") + slices + ws
    return OrbitDiagram(d, nodes, closure, adj, ends)


def orbit_diagram(spec_or_id) -> OrbitDiagram:
    """Catalog entry for diagram (3), (4), (9) or (10), given by number or by GroupSpec."""
    d = spec_or_id.diagram if isinstance(spec_or_id, GroupSpec) else int(spec_or_id)
    return _diagram(d)


def canonical_w(spec: GroupSpec, j: int) -> int:
    """Index of G.w_j within the group's orbit diagram.

    In diagram (4) the orbits adjoining l4 coincide with those adjoining l2, so w3 and w4 of
    the general pattern are the orbits of w2 and w1.
    """
    if spec.diagram == 4:
        return {1: 1, 2: 2, 3: 2, 4: 1}.get(j, j)
    return j


def canonical_slice(spec: GroupSpec, j: int) -> int:
    return 2 if (spec.diagram == 4 and j == 4) else j


# --- invariants --------------------------------------------------------------

def invariant_f(spec: GroupSpec, p: ModelPoint, tol: float = DEFAULT_TOL) -> float:
    if spec.family is Family.SO0:
        a = np.abs(p.xi) ** 2
        return float(a[:-1].sum() - a[-1] - 1.0)
    q = p.normalized()
    B = hermitian_pairing(q.z, q.w)
    if abs(B) <= tol:
        raise IncidenceDivisor("point lies on the incidence divisor <z,w> = 0")
    P = hermitian_pairing(q.z, q.z).real
    Q = hermitian_pairing(q.w, q.w).real
    return float(-P * Q / abs(B) ** 2)


def _su_forms(p: ModelPoint):
    q = p.normalized()
    return (hermitian_pairing(q.z, q.z).real, hermitian_pairing(q.w, q.w).real,
            hermitian_pairing(q.z, q.w))


def _sign(v: float, tol: float) -> int:
    return 0 if abs(v) <= tol else (1 if v > 0 else -1)


def tangent_map(spec: GroupSpec, p: ModelPoint) -> np.ndarray:
    """Real matrix of g -> T_p(model), X -> X.p, in real_form_basis coordinates.

    For the projective model each component is taken orthogonal to the representative,
    which identifies T[z]P^n with the Hermitian complement of z.
    """
    cols = []
    if spec.family is Family.SO0:
        for X in real_form_basis(spec):
            v = X @ p.xi
            cols.append(np.concatenate([v.real, v.imag]))
        return np.stack(cols, axis=1)
    q = p.normalized()
    for X in real_form_basis(spec):
        a = X @ q.z
        a = a - np.vdot(q.z, a) * q.z
        b = sigma_algebra(spec, X) @ q.w
        b = b - np.vdot(q.w, b) * q.w
        cols.append(np.concatenate([a.real, a.imag, b.real, b.imag]))
    return np.stack(cols, axis=1)


def orbit_tangent_rank(spec: GroupSpec, p: ModelPoint, rtol: float = RANK_RTOL) -> int:
    s = np.linalg.svd(tangent_map(spec, p), compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > rtol * s[0]))


def f_on_slice(spec: GroupSpec, j: int, param: float) -> float:
    """Closed form of f along slice j."""
    if spec.family is Family.SO0:
        if j in (1, 3):
            return -2.0 * np.cos(np.pi / 2 * (1 - param)) ** 2
        if j in (2, 4):
            return 2.0 * np.sinh(2 * param) ** 2
    else:
        if j in (1, 3):
            return -np.cos(np.pi / 2 * (1 - param)) ** 2
        if j in (2, 4):
            return np.sinh(2 * param) ** 2
        if j == 5:
            return -np.cosh(2 * param) ** 2
    raise OrbitError(f"no slice {j} for {spec}")


# --- nilcone keys and calibration --------------------------------------------

def _lorentz(u, v) -> float:
    return float(u[:-1] @ v[:-1] - u[-1] * v[-1])


def nilcone_key(spec: GroupSpec, p: ModelPoint, tol: float = DEFAULT_TOL) -> tuple:
    """Sign invariant distinguishing the non-closed orbits adjoining z2.

    SO0: (time sign of the null vector x, and for n = 2 the sign of kappa in I(x cross y) = kappa x).
    SU: the pair (sign<z,z>, sign<w,w>), exactly one of which vanishes.
    """
    if spec.family is Family.SO0:
        x, y = p.xi.real, p.xi.imag
        t = 1 if x[-1] > 0 else -1
        if spec.n != 2:
            return (t,)
        c = np.cross(x, y)
        c[-1] = -c[-1]
        kappa = float(c @ x) / float(x @ x)
        return (t, 1 if kappa > 0 else -1)
    P, Q, B = _su_forms(p)
    scale = abs(B)
    sP, sQ = _sign(P, tol * scale), _sign(Q, tol * scale)
    if sP != 0 and sQ != 0:
        # the smaller-magnitude form is the one that vanishes on the nilcone
        if abs(P) <= abs(Q):
            sP = 0
        else:
            sQ = 0
    return (sP, sQ)


def _path_generator(spec: GroupSpec) -> np.ndarray:
    gens = standard_generators(spec)
    return gens["C"].M if spec.family is Family.SO0 else gens["C'"].M


def _crossing(spec: GroupSpec, start: ModelPoint, X: np.ndarray, target: float = 0.0):
    """First s > 0 where f(exp(isX).start) crosses `target`, bracketed on a doubling grid."""
    def fs(s):
        p = ModelPoint(spec, xi=expm(1j * s * X) @ start.xi) if spec.family is Family.SO0 \
            else _act(spec, expm(1j * s * X), start)
        return invariant_f(spec, p) - target

    lo, hi = 0.0, 0.05
    f0 = fs(lo)
    while np.sign(fs(hi)) == np.sign(f0):
        lo, hi = hi, hi * 1.5
        if hi > 15:
            raise OrbitError("no level crossing found along the calibration path")
    root = brentq(fs, lo, hi, xtol=1e-15, rtol=1e-15, maxiter=500)
    return root


def _act(spec: GroupSpec, g: np.ndarray, p: ModelPoint) -> ModelPoint:
    from .models import group_action
    return group_action(spec, GrpElement(spec, g), p)


@lru_cache(maxsize=None)
def _calibration_cached(family: Family, n: int, eps: float) -> tuple:
    spec = GroupSpec(family, n)
    X = _path_generator(spec)
    diag = orbit_diagram(spec)
    by_pair = {v: int(k[1:]) for k, v in diag.slice_adjacency.items()}
    table = {}
    records = []
    for a in (1, 3):
        start = slice_point(spec, a, eps)
        for sign in (1.0, -1.0):
            Xs = sign * X
            root = _crossing(spec, start, Xs)
            g = expm(1j * root * Xs)
            on = _act(spec, g, start)
            key = nilcone_key(spec, on)
            beyond = _act(spec, expm(1j * (root + 1e-3) * Xs), start)
            b = _classify_core(spec, beyond, DEFAULT_TOL, calibrated=False).slice
            w = by_pair[(f"l{a}", f"l{b}")]
            if key in table and table[key] != w:
                raise OrbitError(f"calibration conflict for key {key}")
            table[key] = w
            records.append({"from": f"l{a}", "to": f"l{b}", "sign": int(sign), "key": list(key),
                            "w": w, "crossing": root})
    return tuple(sorted(table.items())), tuple(tuple(sorted(r.items())) for r in records)


def nilcone_calibration(spec: GroupSpec, eps: float = 1e-3) -> dict:
    """Map nilcone keys to w indices by following exp(+-isC) paths out of l1(eps), l3(eps)
    until f changes sign and reading off which slice is entered."""
    table, _ = _calibration_cached(spec.family, spec.n, eps)
    return dict(table)


def calibration_paths(spec: GroupSpec, eps: float = 1e-3) -> list[dict]:
    _, records = _calibration_cached(spec.family, spec.n, eps)
    return [dict(r) for r in records]


def nilcone_samples(spec: GroupSpec, rng, count: int, near: str = "z2",
                    eps: float = 1e-2, reach: float = 0.5) -> list[ModelPoint]:
    """Random points on the level set of f through a singular orbit, close to it.

    Each sample starts at a random G-translate of a slice point next to the singular orbit
    (l1 or l3 near z2, alternating; l3 near z3) and follows exp(isY) for a random unit Y
    until f crosses the level of the singular orbit (0 at z2, -1 at z3).
    """
    if near == "z2":
        starts, level = ((1, eps), (3, eps)), 0.0
    elif near == "z3":
        if not (spec.family is Family.SU and spec.n >= 2):
            raise OrbitError("z3 has an adjoining hypersurface orbit only for SU(n,1), n >= 2")
        starts, level = ((3, 1.0 - eps),), -1.0
    else:
        raise OrbitError(f"no nilcone sampler near {near!r}")
    grid = np.linspace(0.0, reach, 26)
    out: list[ModelPoint] = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > 20 * count:
            raise OrbitError("too few level crossings; increase reach")
        j, t = starts[attempts % len(starts)]
        Y = random_algebra_element(spec, rng)
        Y = Y / np.linalg.norm(Y)
        g = GrpElement(spec, expm(random_algebra_element(spec, rng)), Realness.REAL_FORM)
        p0 = _act(spec, g.M, slice_point(spec, j, t))

        def path(s):
            return _act(spec, expm(1j * s * Y), p0)

        vals = [invariant_f(spec, path(s)) - level for s in grid]
        k = next((i for i in range(1, len(grid)) if np.sign(vals[i]) != np.sign(vals[0])), None)
        if k is None:
            continue
        root = brentq(lambda s: invariant_f(spec, path(s)) - level, grid[k - 1], grid[k],
                      xtol=1e-15, rtol=1e-15)
        out.append(path(root))
    return out


# --- classification ----------------------------------------------------------

@dataclass(frozen=True)
class ClassificationReport:
    label: OrbitLabel
    f: float
    s_z: int | None
    s_w: int | None
    rank: int
    residual: float

    def to_json(self) -> dict:
        return {
            "label": self.label.code,
            "slice": self.label.slice,
            "param": self.label.param,
            "f": self.f,
            "s_z": self.s_z,
            "s_w": self.s_w,
            "rank": self.rank,
            "residual": self.residual,
        }


def _so0_principal_t(x) -> float:
    Q = _lorentz(x, x)
    yy = Q + 1.0
    th = np.arctan2(np.sqrt(max(yy, 0.0)), np.sqrt(max(-Q, 0.0)))
    return float(1.0 - 2.0 * th / np.pi)


def _classify_core(spec: GroupSpec, p: ModelPoint, tol: float, calibrated: bool = True):
    f = invariant_f(spec, p)
    if spec.family is Family.SO0:
        x, y = p.xi.real, p.xi.imag
        scale = 1.0 + float(np.vdot(p.xi, p.xi).real)
        dz = tol * scale
        if abs(f + 2.0) <= dz or f < -2.0:
            return OrbitLabel("z1" if x[-1] > 0 else "z3")
        if f < -dz:
            t = _so0_principal_t(x)
            return OrbitLabel("principal", 1 if x[-1] > 0 else 3, t)
        if abs(f) <= dz:
            if np.linalg.norm(x) <= np.sqrt(dz):
                return OrbitLabel("z2")
            key = nilcone_key(spec, p, tol)
            if not calibrated:
                return OrbitLabel("z2")
            return OrbitLabel("nonclosed", w=nilcone_calibration(spec)[key])
        s = 0.5 * float(np.arcsinh(np.sqrt(f / 2.0)))
        j = 2
        if spec.n == 2:
            c = np.cross(x, y)
            j = 2 if -c[-1] < 0 else 4
        return OrbitLabel("principal", j, s)
    P, Q, B = _su_forms(p)
    sP, sQ = _sign(P, tol), _sign(Q, tol)
    if sP == 0 and sQ == 0:
        return OrbitLabel("z2")
    if sP == 0 or sQ == 0:
        if not calibrated:
            return OrbitLabel("z2")
        return OrbitLabel("nonclosed", w=nilcone_calibration(spec)[(sP, sQ)])
    if abs(1.0 + f) <= tol:
        if sP < 0:
            return OrbitLabel("z1")
        if spec.n >= 2 and orbit_tangent_rank(spec, p) > 2 * spec.n:
            return OrbitLabel("nonclosed", w=5)
        return OrbitLabel("z3")
    if sP < 0 and sQ < 0:
        t = (2.0 / np.pi) * float(np.arctan2(np.sqrt(max(-f, 0.0)), np.sqrt(max(1.0 + f, 0.0))))
        return OrbitLabel("principal", 1, t)
    if sP > 0 and sQ > 0:
        if f < -1.0:
            return OrbitLabel("principal", 5, 0.5 * float(np.arccosh(np.sqrt(-f))))
        t = (2.0 / np.pi) * float(np.arctan2(np.sqrt(max(-f, 0.0)), np.sqrt(max(1.0 + f, 0.0))))
        return OrbitLabel("principal", 3, t)
    s = 0.5 * float(np.arcsinh(np.sqrt(max(f, 0.0))))
    return OrbitLabel("principal", 2 if sP < 0 else 4, s)


def _nearest_label(spec: GroupSpec, p: ModelPoint):
    best = None
    for code in ("z1", "z2", "z3"):
        q = representative_point(spec, code)
        d = p.distance(q) if spec.family is Family.SU else float(np.linalg.norm(p.xi - q.xi))
        if best is None or d < best[1]:
            best = (code, d)
    return best


def classify(spec: GroupSpec, p: ModelPoint, tol: float = DEFAULT_TOL,
             residual_tol: float = 1e-6) -> ClassificationReport:
    if p.spec != spec:
        raise OrbitError("point belongs to a different model")
    if spec.family is Family.SO0:
        res = point_residual(spec, p)
        if res > residual_tol * (1.0 + float(np.vdot(p.xi, p.xi).real)):
            code, dist = _nearest_label(spec, p)
            raise Unclassifiable(f"quadric defect {res:.3g} too large; nearest {code}",
                                 nearest=code, distance=dist)
    else:
        res = point_residual(spec, p, tol)
        if res > 0:
            code, dist = _nearest_label(spec, p)
            raise Unclassifiable("point lies on the incidence divisor", nearest=code,
                                 distance=dist)
    label = _classify_core(spec, p, tol)
    f = invariant_f(spec, p)
    if spec.family is Family.SU:
        P, Q, _ = _su_forms(p)
        sz, sw = _sign(P, tol), _sign(Q, tol)
    else:
        sz = sw = None
    return ClassificationReport(label, f, sz, sw, orbit_tangent_rank(spec, p), res)


def classify_point(spec: GroupSpec, p: ModelPoint, tol: float = DEFAULT_TOL) -> OrbitLabel:
    return classify(spec, p, tol).label


# --- invariant domains -------------------------------------------------------

_DOMAIN_KINDS = ("D1", "D2", "S1", "S2", "W11", "W12", "W21", "W22", "Orbit", "Union")


@dataclass(frozen=True)
class DomainId:
    """kind in D1, D2 (param a in [0,1)), S1, S2 (param b >= 0), W11, W12, W21, W22,
    Orbit (the non-closed orbit G.w_j, index in param) and Union (members)."""
    kind: str
    param: float = 0.0
    members: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in _DOMAIN_KINDS:
            raise OrbitError(f"unknown domain kind {self.kind!r}")
        if self.kind in ("D1", "D2") and not 0.0 <= self.param < 1.0:
            raise OrbitError("D-domains need 0 <= a < 1")
        if self.kind in ("S1", "S2") and not 0.0 <= self.param < np.inf:
            raise OrbitError("S-domains need b >= 0")
        if self.kind == "Orbit" and int(self.param) not in (1, 2, 3, 4, 5):
            raise OrbitError("Orbit domains need a w index in 1..5")
        if self.kind == "Union":
            if not self.members:
                raise OrbitError("a union needs members")
            object.__setattr__(self, "members", tuple(self.members))

    @classmethod
    def union(cls, *members) -> "DomainId":
        return cls("Union", members=tuple(members))

    def check(self, spec: GroupSpec) -> None:
        if self.kind in ("W11", "W12") and spec.family is not Family.SU:
            raise DomainNotInFamily(f"{self.kind} is defined in the projective model only")
        if self.kind in ("W21", "W22") and not (spec.family is Family.SU and spec.n == 1):
            raise DomainNotInFamily(f"{self.kind} exists only for SU(1,1)")
        if self.kind == "Orbit":
            j = int(self.param)
            allowed = {3: (1, 2, 3, 4), 4: (1, 2, 3, 4), 9: (1, 2, 3, 4, 5)}[spec.diagram]
            if j not in allowed:
                raise DomainNotInFamily(f"w{j} is not a node of diagram ({spec.diagram})")
        for m in self.members:
            m.check(spec)

    def __str__(self):
        if self.kind in ("D1", "D2", "S1", "S2"):
            return f"{self.kind}({self.param:g})"
        if self.kind == "Orbit":
            return f"G.w{int(self.param)}"
        if self.kind == "Union":
            return " u ".join(str(m) for m in self.members)
        return self.kind


def _contains_label(spec: GroupSpec, d: DomainId, lab: OrbitLabel, p: ModelPoint, tol) -> bool:
    k = d.kind
    if k == "Union":
        return any(_contains_label(spec, m, lab, p, tol) for m in d.members)
    if k == "D1":
        return lab.kind == "z1" or (lab.kind == "principal" and lab.slice == 1
                                    and lab.param > d.param)
    if k == "D2":
        return lab.kind == "z3" or (lab.kind == "principal" and lab.slice == 3
                                    and lab.param > d.param)
    if k in ("S1", "S2"):
        j = canonical_slice(spec, 2 if k == "S1" else 4)
        return lab.kind == "principal" and lab.slice == j and lab.param > d.param
    if k == "Orbit":
        return lab.kind == "nonclosed" and lab.w == canonical_w(spec, int(d.param))
    P, Q, B = _su_forms(p)
    if abs(B) <= tol:
        return False
    return {"W11": P < -tol, "W12": Q < -tol, "W21": Q > tol, "W22": P > tol}[k]


def domain_contains(spec: GroupSpec, d: DomainId, p: ModelPoint, tol: float = DEFAULT_TOL) -> bool:
    d.check(spec)
    if spec.family is Family.SU:
        P, Q, B = _su_forms(p)
        if abs(B) <= tol:
            return False
    lab = classify_point(spec, p, tol)
    return _contains_label(spec, d, lab, p, tol)
