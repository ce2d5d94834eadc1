"""Matrix Lie algebra machinery for so(n,1) and su(n,1) inside their complexifications."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

DEFAULT_TOL = 1e-9
CLUSTER_TOL = 1e-8
EXP_TAYLOR_ORDER = 18


class LieCoreError(ValueError):
    pass


class SpecMismatch(LieCoreError):
    pass


class NonSplitBase(LieCoreError):
    pass


class Family(str, enum.Enum):
    SO0 = "SO0"
    SU = "SU"


class Realness(str, enum.Enum):
    REAL_FORM = "RealForm"
    COMPLEXIFIED = "Complexified"


@dataclass(frozen=True)
class GroupSpec:
    family: Family
    n: int

    def __post_init__(self):
        try:
            fam = Family(self.family)
        except ValueError as exc:
            raise LieCoreError(f"unknown family {self.family!r}") from exc
        object.__setattr__(self, "family", fam)
        if isinstance(self.n, bool) or int(self.n) != self.n:
            raise LieCoreError("n must be an integer")
        object.__setattr__(self, "n", int(self.n))
        low = 2 if fam is Family.SO0 else 1
        if self.n < low:
            raise LieCoreError(f"{fam.value} requires n >= {low}, got {self.n}")

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def reduced(self) -> bool:
        """Whether alpha(A) lives on [0, pi] (SO0) rather than [0, pi/2] (SU)."""
        return self.family is Family.SO0

    @property
    def diagram(self) -> int:
        if self.family is Family.SO0:
            return 3 if self.n == 2 else 4
        return 3 if self.n == 1 else 9

    @property
    def complex_dim(self) -> int:
        """Complex dimension of G^C/K^C."""
        return self.n if self.family is Family.SO0 else 2 * self.n

    @property
    def alpha_of_A2(self) -> float:
        return np.pi / 2 if self.reduced else np.pi / 4

    def __str__(self):
        return f"{self.family.value}({self.n},1)"


def _as_spec(spec) -> GroupSpec:
    if isinstance(spec, GroupSpec):
        return spec
    family, n = spec
    return GroupSpec(family, n)


def indefinite_metric(spec: GroupSpec) -> np.ndarray:
    """I_{n,1} = diag(1, ..., 1, -1)."""
    d = np.ones(spec.size)
    d[-1] = -1.0
    return np.diag(d)


def _frozen(M) -> np.ndarray:
    A = np.array(M, dtype=complex)
    A.setflags(write=False)
    return A


@dataclass(frozen=True)
class AlgElement:
    spec: GroupSpec
    M: np.ndarray = field(repr=False)
    realness: Realness = Realness.COMPLEXIFIED

    def __post_init__(self):
        M = _frozen(self.M)
        if M.shape != (self.spec.size, self.spec.size):
            raise SpecMismatch(f"expected {self.spec.size}x{self.spec.size} matrix, got {M.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "realness", Realness(self.realness))

    def residual(self) -> float:
        """Defect of the real-form (or complexified) defining relations."""
        return algebra_residual(self.spec, self.M, self.realness)

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.M)))
        return self.residual() <= tol * scale


@dataclass(frozen=True)
class GrpElement:
    spec: GroupSpec
    M: np.ndarray = field(repr=False)
    realness: Realness = Realness.COMPLEXIFIED

    def __post_init__(self):
        M = _frozen(self.M)
        if M.shape != (self.spec.size, self.spec.size):
            raise SpecMismatch(f"expected {self.spec.size}x{self.spec.size} matrix, got {M.shape}")
        object.__setattr__(self, "M", M)
        object.__setattr__(self, "realness", Realness(self.realness))

    def residual(self) -> float:
        return group_residual(self.spec, self.M, self.realness)

    def is_valid(self, tol: float = DEFAULT_TOL) -> bool:
        scale = max(1.0, float(np.linalg.norm(self.M)) ** 2)
        return self.residual() <= tol * scale


def algebra_residual(spec: GroupSpec, M, realness=Realness.REAL_FORM) -> float:
    M = np.asarray(M, dtype=complex)
    Ip = indefinite_metric(spec)
    if spec.family is Family.SO0:
        res = np.linalg.norm(M.T @ Ip + Ip @ M)
        if Realness(realness) is Realness.REAL_FORM:
            res = max(res, np.linalg.norm(M.imag))
        return float(res)
    if Realness(realness) is Realness.REAL_FORM:
        res = np.linalg.norm(M.conj().T @ Ip + Ip @ M)
    else:
        # complexification of su(n,1) is sl(n+1, C)
        res = 0.0
    return float(max(res, abs(np.trace(M))))


def group_residual(spec: GroupSpec, M, realness=Realness.REAL_FORM) -> float:
    M = np.asarray(M, dtype=complex)
    Ip = indefinite_metric(spec)
    res = abs(np.linalg.det(M) - 1.0)
    if spec.family is Family.SO0:
        res = max(res, np.linalg.norm(M.T @ Ip @ M - Ip))
        if Realness(realness) is Realness.REAL_FORM:
            res = max(res, np.linalg.norm(M.imag))
    elif Realness(realness) is Realness.REAL_FORM:
        res = max(res, np.linalg.norm(M.conj().T @ Ip @ M - Ip))
    return float(res)


def _mat(X) -> np.ndarray:
    return np.asarray(X.M if isinstance(X, (AlgElement, GrpElement)) else X, dtype=complex)


def bracket(X, Y) -> np.ndarray:
    X, Y = _mat(X), _mat(Y)
    return X @ Y - Y @ X


def trace_form(X, Y) -> complex:
    """tr(XY), used in place of the Killing form (positive multiple on simple algebras)."""
    return complex(np.trace(_mat(X) @ _mat(Y)))


# --- involutions -----------------------------------------------------------

def theta(spec: GroupSpec, M) -> np.ndarray:
    Ip = indefinite_metric(spec)
    return Ip @ _mat(M) @ Ip


def sigma_algebra(spec: GroupSpec, M) -> np.ndarray:
    M = _mat(M)
    if spec.family is Family.SO0:
        return M.conj()
    Ip = indefinite_metric(spec)
    return -Ip @ M.conj().T @ Ip


def sigma_group(spec: GroupSpec, g) -> np.ndarray:
    g = _mat(g)
    if spec.family is Family.SO0:
        return g.conj()
    Ip = indefinite_metric(spec)
    return Ip @ np.linalg.inv(g.conj().T) @ Ip


def apply_involution(kind: str, X):
    """Apply theta, sigma or tau to an AlgElement or GrpElement.

    theta and tau share the matrix formula X -> I X I; theta is meant for
    real-form inputs and tau is its holomorphic extension to G^C.
    """
    if not isinstance(X, (AlgElement, GrpElement)):
        raise SpecMismatch("apply_involution expects an AlgElement or GrpElement")
    kind = str(kind).lower()
    spec = X.spec
    if kind in ("theta", "tau"):
        M = theta(spec, X.M)
    elif kind == "sigma":
        M = sigma_algebra(spec, X.M) if isinstance(X, AlgElement) else sigma_group(spec, X.M)
    else:
        raise LieCoreError(f"unknown involution {kind!r}")
    return type(X)(spec, M, X.realness)


def cartan_split(spec: GroupSpec, X) -> tuple[np.ndarray, np.ndarray]:
    """Return (k, p) with theta k = k, theta p = -p and X = k + p."""
    M = _mat(X)
    t = theta(spec, M)
    return (M + t) / 2, (M - t) / 2


# --- exponential -------------------------------------------------------------

def expm(M) -> np.ndarray:
    """Scaling and squaring with a fixed-order Taylor series."""
    M = _mat(M)
    n = M.shape[0]
    norm = np.linalg.norm(M, 1)
    s = int(np.ceil(np.log2(norm / 0.5))) if norm > 0.5 else 0
    A = M / (2.0**s)
    E = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, EXP_TAYLOR_ORDER + 1):
        term = term @ A / k
        E = E + term
    for _ in range(s):
        E = E @ E
    return E


def exp_matrix(X) -> GrpElement:
    if not isinstance(X, AlgElement):
        raise SpecMismatch("exp_matrix expects an AlgElement")
    return GrpElement(X.spec, expm(X.M), X.realness)


# --- real-form bases ---------------------------------------------------------

def _unit(N, i, j):
    E = np.zeros((N, N), dtype=complex)
    E[i, j] = 1.0
    return E


@lru_cache(maxsize=None)
def _basis_cached(family: Family, n: int) -> tuple:
    N = n + 1
    t = n  # index of the negative direction
    out = []
    if family is Family.SO0:
        for i in range(n):
            for j in range(i + 1, n):
                out.append(_unit(N, i, j) - _unit(N, j, i))
        for i in range(n):
            out.append(_unit(N, i, t) + _unit(N, t, i))
    else:
        for i in range(n):
            for j in range(i + 1, n):
                out.append(_unit(N, i, j) - _unit(N, j, i))
                out.append(1j * (_unit(N, i, j) + _unit(N, j, i)))
        for i in range(n):
            out.append(_unit(N, i, t) + _unit(N, t, i))
            out.append(1j * (_unit(N, i, t) - _unit(N, t, i)))
        for k in range(n):
            out.append(1j * (_unit(N, k, k) - _unit(N, k + 1, k + 1)))
    for B in out:
        B.setflags(write=False)
    return tuple(out)


def real_form_basis(spec: GroupSpec) -> list[np.ndarray]:
    """A real basis of the real form g (so(n,1) or su(n,1))."""
    return list(_basis_cached(spec.family, spec.n))


def _realify(M) -> np.ndarray:
    M = np.asarray(M, dtype=complex).ravel()
    return np.concatenate([M.real, M.imag])


@lru_cache(maxsize=None)
def _basis_pinv(family: Family, n: int) -> np.ndarray:
    basis = _basis_cached(family, n)
    R = np.stack([_realify(B) for B in basis], axis=1)
    return np.linalg.pinv(R)


def coordinates(spec: GroupSpec, X) -> np.ndarray:
    """Real coordinates of X in real_form_basis (least squares if X is not in g)."""
    return _basis_pinv(spec.family, spec.n) @ _realify(_mat(X))


def from_coordinates(spec: GroupSpec, c) -> np.ndarray:
    basis = _basis_cached(spec.family, spec.n)
    return np.tensordot(np.asarray(c, dtype=float), np.stack(basis), axes=1)


def ad_matrix(spec: GroupSpec, X) -> np.ndarray:
    """Matrix of ad_X on g in real_form_basis coordinates (X must lie in g)."""
    X = _mat(X)
    cols = [coordinates(spec, bracket(X, B)) for B in real_form_basis(spec)]
    return np.stack(cols, axis=1)


def random_algebra_element(spec: GroupSpec, rng, scale: float = 1.0) -> np.ndarray:
    c = rng.standard_normal(len(real_form_basis(spec)))
    c *= scale / max(np.linalg.norm(c), 1e-300)
    return from_coordinates(spec, c)


# --- standard generators -----------------------------------------------------

def standard_generators(spec: GroupSpec) -> dict[str, AlgElement]:
    """A2 spans a, C spans c; for SU also C' spanning c'.

    Indices below are zero-based: the last two coordinates carry A2 and C'.
    """
    spec = _as_spec(spec)
    N, n = spec.size, spec.n
    a = spec.alpha_of_A2
    A2 = np.zeros((N, N), dtype=complex)
    A2[n - 1, n] = A2[n, n - 1] = a
    out = {"A2": AlgElement(spec, A2, Realness.REAL_FORM)}
    if spec.family is Family.SO0:
        C = np.zeros((N, N), dtype=complex)
        C[n - 2, n - 1] = -2.0
        C[n - 1, n - 2] = 2.0
        out["C"] = AlgElement(spec, C, Realness.REAL_FORM)
    else:
        Cp = np.zeros((N, N), dtype=complex)
        Cp[n - 1, n - 1] = 1j
        Cp[n, n] = -1j
        out["C'"] = AlgElement(spec, Cp, Realness.REAL_FORM)
        if n >= 2:
            C = np.zeros((N, N), dtype=complex)
            C[n - 2, n - 1] = -1.0
            C[n - 1, n - 2] = 1.0
            out["C"] = AlgElement(spec, C, Realness.REAL_FORM)
    return out


# --- restricted roots --------------------------------------------------------

@dataclass(frozen=True)
class RootDecomp:
    base: AlgElement
    unit: float
    spaces: dict = field(repr=False)
    centralizer_k: tuple = field(repr=False, default=())
    split_line: tuple = field(repr=False, default=())

    def dim(self, label: int) -> int:
        return len(self.spaces.get(label, ()))

    @property
    def dims(self) -> dict[int, int]:
        return {k: len(v) for k, v in sorted(self.spaces.items())}


def _cluster(values: np.ndarray, tol: float) -> list[float]:
    centers: list[list[float]] = []
    for v in np.sort(values):
        if centers and abs(v - np.mean(centers[-1])) <= tol:
            centers[-1].append(v)
        else:
            centers.append([v])
    return [float(np.mean(c)) for c in centers]


def _null_space(A: np.ndarray, rtol: float) -> np.ndarray:
    u, s, vh = np.linalg.svd(A)
    top = s[0] if s.size else 0.0
    rank = int(np.sum(s > rtol * max(top, 1.0)))
    return vh[rank:].conj().T


def restricted_root_decomposition(spec: GroupSpec, base, unit: float | None = None,
                                  tol: float = CLUSTER_TOL) -> RootDecomp:
    """Eigenspaces of ad(base) on g, labelled by multiples of the root value `unit`.

    `unit` is lambda(base); by default the smallest positive eigenvalue.
    """
    spec = _as_spec(spec)
    if not isinstance(base, AlgElement):
        base = AlgElement(spec, base, Realness.REAL_FORM)
    ad = ad_matrix(spec, base.M)
    scale = max(np.linalg.norm(ad, 2), 1e-300)
    eig = np.linalg.eigvals(ad / scale)
    if np.max(np.abs(eig.imag)) > tol:
        raise NonSplitBase("ad(base) has non-real spectrum")
    centers = _cluster(eig.real, tol)
    if unit is None:
        positive = [c for c in centers if c > tol]
        if not positive:
            raise NonSplitBase("ad(base) has no positive eigenvalue")
        lam = min(positive)
    else:
        lam = unit / scale
    spaces: dict[int, tuple] = {}
    for c in centers:
        ratio = c / lam
        label = int(round(ratio))
        if abs(ratio - label) > 1e-6 or abs(label) > 2:
            raise NonSplitBase(f"eigenvalue ratio {ratio:.6g} is not in {{0, +-1, +-2}}")
        vecs = _null_space(ad / scale - c * np.eye(ad.shape[0]), 1e-7)
        spaces[label] = tuple(from_coordinates(spec, v.real) for v in vecs.T)
    for label in (-2, -1, 0, 1, 2):
        spaces.setdefault(label, ())
    zero = spaces[0]
    kpart = [cartan_split(spec, Z)[0] for Z in zero]
    ck = _span_basis(kpart)
    return RootDecomp(base=base, unit=float(lam * scale), spaces=spaces,
                      centralizer_k=tuple(ck), split_line=(base.M,))


def _span_basis(mats, rtol: float = 1e-8, scale: float | None = None) -> list[np.ndarray]:
    """Real orthonormal basis (Frobenius) of the real span of the given matrices.

    Singular values below rtol * scale are dropped; scale defaults to the largest one."""
    mats = [np.asarray(M, dtype=complex) for M in mats]
    if not mats:
        return []
    R = np.stack([_realify(M) for M in mats], axis=1)
    u, s, _ = np.linalg.svd(R, full_matrices=False)
    ref = s[0] if scale is None else scale
    rank = int(np.sum(s > rtol * max(ref, 1e-300))) if s.size else 0
    shape = mats[0].shape
    m = shape[0] * shape[1]
    return [(u[:m, k] + 1j * u[m:, k]).reshape(shape) for k in range(rank)]


def table_root_dims(spec: GroupSpec) -> tuple[int, int]:
    """(dim g^alpha, dim g^{2alpha}) for the a-decomposition along A2."""
    A2 = standard_generators(spec)["A2"]
    rd = restricted_root_decomposition(spec, A2, unit=spec.alpha_of_A2)
    return rd.dim(1), rd.dim(2)


# --- fundamental domain ------------------------------------------------------

def fundamental_bound(spec: GroupSpec) -> float:
    return np.pi if spec.reduced else np.pi / 2


def reduce_to_fundamental_domain(spec: GroupSpec, t: float) -> float:
    """Representative in [0, L] of t = alpha(A) modulo sign flips and lattice shifts."""
    spec = _as_spec(spec)
    L = fundamental_bound(spec)
    period = 2 * L
    r = float(np.mod(t, period))
    if r > L:
        r = period - r
    if abs(r - period) < 1e-12 * period or r < 0:
        r = 0.0
    return min(max(r, 0.0), L)
