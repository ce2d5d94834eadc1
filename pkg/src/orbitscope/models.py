"""Explicit models of G^C/K^C: the complex hyperquadric (SO0) and P^n x conj(P^n) minus the
incidence divisor (SU)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_core import (DEFAULT_TOL, Family, GroupSpec, GrpElement, LieCoreError, SpecMismatch,
                       expm, sigma_group, standard_generators)

S_MAX = 20.0


class ModelError(LieCoreError):
    pass


class LabelNotInDiagram(ModelError):
    pass


class ParamOutOfDomain(ModelError):
    pass


def hermitian_pairing(z, w) -> complex:
    """<z, w> = z_1 conj(w_1) + ... + z_n conj(w_n) - z_{n+1} conj(w_{n+1})."""
    z = np.asarray(z, dtype=complex)
    w = np.asarray(w, dtype=complex)
    if z.shape != w.shape or z.ndim != 1:
        raise SpecMismatch(f"shape mismatch {z.shape} vs {w.shape}")
    prod = z * w.conj()
    return complex(prod[:-1].sum() - prod[-1])


def _normalize(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    v = v / np.linalg.norm(v)
    k = int(np.argmax(np.abs(v)))
    return v * (abs(v[k]) / v[k])


@dataclass(frozen=True)
class ModelPoint:
    spec: GroupSpec
    xi: np.ndarray | None = field(default=None, repr=False)
    z: np.ndarray | None = field(default=None, repr=False)
    w: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        N = self.spec.size
        if self.spec.family is Family.SO0:
            if self.xi is None or self.z is not None or self.w is not None:
                raise SpecMismatch("SO0 points carry xi only")
            xi = np.array(self.xi, dtype=complex)
            if xi.shape != (N,):
                raise SpecMismatch(f"xi must have length {N}")
            xi.setflags(write=False)
            object.__setattr__(self, "xi", xi)
        else:
            if self.z is None or self.w is None or self.xi is not None:
                raise SpecMismatch("SU points carry z and w")
            for name in ("z", "w"):
                v = np.array(getattr(self, name), dtype=complex)
                if v.shape != (N,):
                    raise SpecMismatch(f"{name} must have length {N}")
                if not np.all(np.isfinite(v)) or np.linalg.norm(v) == 0:
                    raise ModelError(f"{name} must be a finite nonzero vector")
                v.setflags(write=False)
                object.__setattr__(self, name, v)

    def normalized(self) -> "ModelPoint":
        if self.spec.family is Family.SO0:
            return self
        return ModelPoint(self.spec, z=_normalize(self.z), w=_normalize(self.w))

    def as_vector(self) -> np.ndarray:
        """Flat complex vector: xi, or the concatenation of normalized z and w."""
        if self.spec.family is Family.SO0:
            return np.array(self.xi)
        p = self.normalized()
        return np.concatenate([p.z, p.w])

    def distance(self, other: "ModelPoint") -> float:
        """Euclidean for SO0; for SU, unit representatives of each factor phase-aligned."""
        if other.spec != self.spec:
            raise SpecMismatch("points belong to different models")
        if self.spec.family is Family.SO0:
            return float(np.linalg.norm(self.xi - other.xi))
        total = 0.0
        for a, b in ((self.z, other.z), (self.w, other.w)):
            a = a / np.linalg.norm(a)
            b = b / np.linalg.norm(b)
            c = np.vdot(b, a)
            if abs(c) > 0:
                b = b * (c / abs(c))
            total += float(np.linalg.norm(a - b)) ** 2
        return float(np.sqrt(total))

    def to_json(self) -> dict:
        out = {"family": self.spec.family.value, "n": self.spec.n}
        if self.spec.family is Family.SO0:
            out["xi"] = complex_list(self.xi)
        else:
            out["z"] = complex_list(self.z)
            out["w"] = complex_list(self.w)
            p = self.normalized()
            out["normalized"] = {"z": complex_list(p.z), "w": complex_list(p.w)}
        return out

    @classmethod
    def from_json(cls, data: dict, spec: GroupSpec | None = None) -> "ModelPoint":
        if spec is None:
            spec = GroupSpec(data["family"], data["n"])
        if spec.family is Family.SO0:
            return cls(spec, xi=parse_complex_list(data["xi"]))
        return cls(spec, z=parse_complex_list(data["z"]), w=parse_complex_list(data["w"]))


def complex_list(v) -> list[list[float]]:
    return [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex)]


def parse_complex_list(items) -> np.ndarray:
    out = []
    for c in items:
        if isinstance(c, (int, float)):
            out.append(complex(c))
        else:
            re, im = c
            out.append(complex(float(re), float(im)))
    return np.array(out, dtype=complex)


@dataclass(frozen=True)
class SliceId:
    j: int
    extended: bool = False

    def __post_init__(self):
        if self.j not in (1, 2, 3, 4, 5):
            raise ModelError(f"slice index must be in 1..5, got {self.j}")

    def check(self, spec: GroupSpec, param: float) -> None:
        if self.j == 5 and not (spec.family is Family.SU and spec.n >= 2):
            raise LabelNotInDiagram("slice 5 exists only for SU(n,1) with n >= 2")
        param = float(param)
        if self.j in (1, 3):
            upper_ok = param <= 1.0 if self.extended else param < 1.0
            if not (param > 0.0 and upper_ok):
                dom = "(0, 1]" if self.extended else "(0, 1)"
                raise ParamOutOfDomain(f"slice {self.j} parameter {param} outside {dom}")
        elif not (0.0 < param <= S_MAX):
            raise ParamOutOfDomain(f"slice {self.j} parameter {param} outside (0, {S_MAX:g}]")


def _e(N, k, val=1.0):
    v = np.zeros(N, dtype=complex)
    v[k] = val
    return v


def _singular(spec: GroupSpec, label: str) -> ModelPoint:
    N, n = spec.size, spec.n
    if spec.family is Family.SO0:
        xi = {"z1": _e(N, n), "z2": _e(N, n - 1, 1j), "z3": _e(N, n, -1.0)}[label]
        return ModelPoint(spec, xi=xi)
    if label == "z1":
        return ModelPoint(spec, z=_e(N, n), w=_e(N, n))
    if label == "z2":
        z = _e(N, n - 1, 1j) + _e(N, n)
        w = _e(N, n - 1, -1j) + _e(N, n)
        return ModelPoint(spec, z=z, w=w)
    return ModelPoint(spec, z=_e(N, n - 1), w=_e(N, n - 1))


def _su_vec(N, tail) -> np.ndarray:
    v = np.zeros(N, dtype=complex)
    v[N - len(tail):] = tail
    return v


def representative_point(spec: GroupSpec, label, printed: bool = False) -> ModelPoint:
    """Base points z1, z2, z3 and representatives w1..w5 of the non-closed orbits.

    For SO0 the w-representatives are arranged so that wj carries the label fixed by the
    slice-adjacency calibration; ``printed=True`` returns the conventional textbook
    coordinates instead (w1 and w3 of the n = 2 case swapped, and for n > 2 two points
    on the same orbit).
    """
    code = getattr(label, "code", label)
    code = str(code).lower()
    N, n = spec.size, spec.n
    if code in ("z1", "z2", "z3"):
        return _singular(spec, code)
    allowed = {3: ("w1", "w2", "w3", "w4"), 4: ("w1", "w2"), 9: ("w1", "w2", "w3", "w4", "w5")}
    if code not in allowed[spec.diagram]:
        raise LabelNotInDiagram(f"{code} is not a node of diagram ({spec.diagram}) for {spec}")
    if spec.family is Family.SO0:
        if n == 2:
            table = {"w1": (-1, 1j, -1), "w2": (1, 1j, -1), "w3": (1, 1j, 1), "w4": (-1, 1j, 1)}
            if not printed:
                table["w1"], table["w3"] = table["w3"], table["w1"]
            return ModelPoint(spec, xi=np.array(table[code], dtype=complex))
        last = {"w1": -1.0, "w2": -1.0} if printed else {"w1": 1.0, "w2": -1.0}
        first = {"w1": -1.0, "w2": 1.0} if printed else {"w1": 1.0, "w2": 1.0}
        xi = _e(N, 0, first[code]) + _e(N, n - 1, 1j) + _e(N, n, last[code])
        return ModelPoint(spec, xi=xi)
    if code == "w5":
        return ModelPoint(spec, z=_su_vec(N, [1, -1j, 1]), w=_su_vec(N, [1, 1j, 1]))
    table = {
        "w1": ([0, 1], [-1j, 1]),
        "w2": ([1j, 1], [1, 0]),
        "w3": ([1, 0], [-1j, 1]),
        "w4": ([1j, 1], [0, 1]),
    }
    z, w = table[code]
    return ModelPoint(spec, z=_su_vec(N, z), w=_su_vec(N, w))


def slice_generator(spec: GroupSpec, j: int) -> tuple[np.ndarray, str]:
    """(X, base) with slice_j(s) = exp(i s X) . base."""
    gens = standard_generators(spec)
    if j == 1:
        return -gens["A2"].M, "z2"
    if j == 3:
        return gens["A2"].M, "z2"
    if spec.family is Family.SO0:
        C = gens["C"].M
        if j == 2:
            return C, "z2"
        if j == 4:
            return -C, "z2"
    else:
        Cp = gens["C'"].M
        if j == 2:
            return Cp, "z2"
        if j == 4:
            return -Cp, "z2"
        if j == 5:
            return gens["C"].M, "z3"
    raise LabelNotInDiagram(f"no slice {j} for {spec}")


def _closed_form(spec: GroupSpec, j: int, s: float) -> ModelPoint:
    N = spec.size
    if spec.family is Family.SO0:
        if j in (1, 3):
            th = np.pi / 2 * (1 - s) if j == 1 else np.pi / 2 * (1 + s)
            return ModelPoint(spec, xi=_su_vec(N, [1j * np.sin(th), np.cos(th)]))
        sign = 1.0 if j == 2 else -1.0
        return ModelPoint(spec, xi=_su_vec(N, [sign * np.sinh(2 * s), 1j * np.cosh(2 * s), 0]))
    if j in (1, 3):
        th = np.pi / 4 * (1 - s) if j == 1 else np.pi / 4 * (1 + s)
        return ModelPoint(spec, z=_su_vec(N, [1j * np.sin(th), np.cos(th)]),
                          w=_su_vec(N, [-1j * np.sin(th), np.cos(th)]))
    if j in (2, 4):
        e = s if j == 4 else -s
        return ModelPoint(spec, z=_su_vec(N, [1j * np.exp(e), np.exp(-e)]),
                          w=_su_vec(N, [-1j * np.exp(-e), np.exp(e)]))
    return ModelPoint(spec, z=_su_vec(N, [np.sinh(s), 1j * np.cosh(s), 0]),
                      w=_su_vec(N, [np.sinh(s), -1j * np.cosh(s), 0]))


def slice_point(spec: GroupSpec, slice_id, param: float, method: str = "closed",
                check: bool = True) -> ModelPoint:
    """Point l_j(param); `method` selects the closed coordinate form or exp(i s X) . base."""
    if not isinstance(slice_id, SliceId):
        slice_id = SliceId(int(slice_id))
    if check:
        slice_id.check(spec, param)
    elif slice_id.j == 5 and not (spec.family is Family.SU and spec.n >= 2):
        raise LabelNotInDiagram("slice 5 exists only for SU(n,1) with n >= 2")
    s = float(param)
    if method == "closed":
        return _closed_form(spec, slice_id.j, s)
    if method != "exp":
        raise ModelError(f"unknown method {method!r}")
    X, base = slice_generator(spec, slice_id.j)
    g = GrpElement(spec, expm(1j * s * X))
    return group_action(spec, g, representative_point(spec, base))


def group_action(spec: GroupSpec, g, p: ModelPoint) -> ModelPoint:
    if p.spec != spec or (isinstance(g, GrpElement) and g.spec != spec):
        raise SpecMismatch("group element, point and spec disagree")
    M = np.asarray(g.M if isinstance(g, GrpElement) else g, dtype=complex)
    if M.shape != (spec.size, spec.size):
        raise SpecMismatch("group element has the wrong shape")
    if spec.family is Family.SO0:
        return ModelPoint(spec, xi=M @ p.xi)
    return ModelPoint(spec, z=M @ p.z, w=sigma_group(spec, M) @ p.w)


def quadric_defect(xi) -> complex:
    xi = np.asarray(xi, dtype=complex)
    sq = xi * xi
    return complex(sq[:-1].sum() - sq[-1] + 1.0)


def point_residual(spec: GroupSpec, p: ModelPoint, tol: float = DEFAULT_TOL) -> float:
    """0 on exact model points; grows with the quadric defect or with proximity to the
    incidence divisor (1.0 on the divisor itself)."""
    if spec.family is Family.SO0:
        return float(abs(quadric_defect(p.xi)))
    q = p.normalized()
    pair = abs(hermitian_pairing(q.z, q.w))
    return 0.0 if pair > tol else float(1.0 - pair / tol)
