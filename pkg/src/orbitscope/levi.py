"""Levi forms of hypersurface G-orbits: an analytic engine (complex Hessian of the invariant f
in a holomorphic chart) and an algebraic engine (brackets of fundamental vector fields at
nilpotent base points), with helpers to cross-validate them."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .lie_core import (Family, GroupSpec, GrpElement, LieCoreError, _span_basis, bracket, expm,
                       from_coordinates, real_form_basis, restricted_root_decomposition,
                       standard_generators, theta, trace_form)
from .models import ModelPoint, group_action, representative_point
from .orbits import classify_point, invariant_f, orbit_tangent_rank

ZERO_THRESHOLD = 1e-8
FD_STEP = 1e-4

SITE_CASES = ("Reduced_x0", "Reduced_y0", "NonReduced_z3_x", "NonReduced_z2_x0",
              "NonReduced_z2_y0")


class LeviError(LieCoreError):
    pass


class NotHypersurface(LeviError):
    pass


class DegenerateGradient(LeviError):
    pass


class SiteUnsupported(LeviError):
    pass


# --- signatures --------------------------------------------------------------

@dataclass(frozen=True)
class LeviSignature:
    pos: int
    neg: int
    zero: int
    orientation: str = "positive means pseudoconvex from the side f < f(p)"
    method: str = "numeric"
    eigenvalues: tuple = field(default=(), repr=False, compare=False)

    @property
    def counts(self) -> tuple[int, int, int]:
        return (self.pos, self.neg, self.zero)

    @property
    def character(self) -> str:
        """Character of the set {L(Z,Z)}: a half-line ("definite"), the whole normal line
        ("indefinite") or {0} ("identically-zero")."""
        if self.pos == 0 and self.neg == 0:
            return "identically-zero"
        if self.pos > 0 and self.neg > 0:
            return "indefinite"
        return "definite"

    @property
    def strict_character(self) -> str:
        """Like `character`, but one-signed forms with null directions are "semidefinite"."""
        c = self.character
        if c == "definite" and self.zero > 0:
            return "semidefinite"
        return c

    def flipped(self) -> "LeviSignature":
        return LeviSignature(self.neg, self.pos, self.zero, self.orientation, self.method,
                             tuple(-e for e in self.eigenvalues[::-1]))

    def to_json(self) -> dict:
        return {"pos": self.pos, "neg": self.neg, "zero": self.zero,
                "character": self.character, "orientation": self.orientation}


def signature_of(K: np.ndarray, zero_threshold: float = ZERO_THRESHOLD, **kw) -> LeviSignature:
    K = (K + K.conj().T) / 2
    if K.size == 0:
        return LeviSignature(0, 0, 0, eigenvalues=(), **kw)
    ev = np.linalg.eigvalsh(K)
    thr = zero_threshold * max(1.0, float(np.linalg.norm(K, 2)))
    pos = int(np.sum(ev > thr))
    neg = int(np.sum(ev < -thr))
    return LeviSignature(pos, neg, len(ev) - pos - neg, eigenvalues=tuple(float(e) for e in ev),
                         **kw)


# --- analytic engine ---------------------------------------------------------

def _eps(N: int) -> np.ndarray:
    e = np.ones(N)
    e[-1] = -1.0
    return e


@dataclass(frozen=True)
class Chart:
    """Holomorphic chart around a model point: coordinates c0 and the map c -> f."""
    spec: GroupSpec
    kind: str
    pivots: tuple
    c0: np.ndarray = field(repr=False)
    branch: complex = 1.0

    def point(self, c) -> ModelPoint:
        c = np.asarray(c, dtype=complex)
        N = self.spec.size
        if self.kind == "quadric":
            (k,) = self.pivots
            e = _eps(N)
            xi = np.insert(c, k, 0.0)
            rest = 1.0 + np.sum(np.delete(e * xi * xi, k))
            xi[k] = self.branch * np.sqrt(-rest / e[k] + 0j)
            return ModelPoint(self.spec, xi=xi)
        k1, k2 = self.pivots
        z = np.insert(c[:N - 1], k1, 1.0)
        zeta = np.insert(c[N - 1:], k2, 1.0)
        return ModelPoint(self.spec, z=z, w=zeta.conj())

    def f(self, c) -> float:
        return invariant_f(self.spec, self.point(c))


def chart_at(spec: GroupSpec, p: ModelPoint) -> Chart:
    """Graph chart on the quadric solving for the coordinate with the largest |d/dxi_k|;
    affine charts on both projective factors at the largest-modulus components."""
    N = spec.size
    if spec.family is Family.SO0:
        xi = np.asarray(p.xi)
        k = int(np.argmax(np.abs(xi)))
        e = _eps(N)
        rest = 1.0 + np.sum(np.delete(e * xi * xi, k))
        root = np.sqrt(-rest / e[k] + 0j)
        branch = 1.0 if abs(root - xi[k]) <= abs(root + xi[k]) else -1.0
        return Chart(spec, "quadric", (k,), np.delete(xi, k), branch)
    z = np.asarray(p.z)
    zeta = np.asarray(p.w).conj()
    k1 = int(np.argmax(np.abs(z)))
    k2 = int(np.argmax(np.abs(zeta)))
    z = z / z[k1]
    zeta = zeta / zeta[k2]
    c0 = np.concatenate([np.delete(z, k1), np.delete(zeta, k2)])
    return Chart(spec, "projective", (k1, k2), c0)


def complex_hessian(spec: GroupSpec, p: ModelPoint):
    """(H, g, chart): H[a,b] = d^2 f / dc_a dconj(c_b) and g[a] = df/dc_a in the chart at p."""
    chart = chart_at(spec, p)
    N = spec.size
    e = _eps(N)
    if chart.kind == "quadric":
        (k,) = chart.pivots
        xi = np.asarray(chart.point(chart.c0).xi)
        idx = [j for j in range(N) if j != k]
        J = np.zeros((N, N - 1), dtype=complex)
        for a, j in enumerate(idx):
            J[j, a] = 1.0
            J[k, a] = -e[j] * xi[j] / (e[k] * xi[k])
        H = J.T @ np.diag(e) @ J.conj()
        g = J.T @ (e * xi.conj())
        return H, g, chart
    k1, k2 = chart.pivots
    q = chart.point(chart.c0)
    z = np.asarray(q.z)
    zeta = np.asarray(q.w).conj()
    P = float(np.sum(e * np.abs(z) ** 2))
    Q = float(np.sum(e * np.abs(zeta) ** 2))
    B = complex(np.sum(e * z * zeta))
    zero = np.zeros(N)
    Pa = np.concatenate([e * z.conj(), zero])
    Qa = np.concatenate([zero, e * zeta.conj()])
    Ba = np.concatenate([e * zeta, e * z])
    v = 1.0 / abs(B) ** 2
    u = P * Q
    ua = Pa * Q + P * Qa
    va = -Ba * v / B
    U = (Q * np.diag(np.concatenate([e, zero])) + np.outer(Pa, Qa.conj())
         + np.outer(Qa, Pa.conj()) + P * np.diag(np.concatenate([zero, e])))
    H = -(v * U + np.outer(ua, va.conj()) + np.outer(va, ua.conj())
          + u * v * v * np.outer(Ba, Ba.conj()))
    F = -(ua * v + u * va)
    keep = [j for j in range(2 * N) if j != k1 and j != N + k2]
    return H[np.ix_(keep, keep)], F[keep], chart


def finite_difference_hessian(chart: Chart, h: float = FD_STEP) -> np.ndarray:
    """Complex Hessian of f by central differences in the real coordinates of the chart."""
    c0 = np.asarray(chart.c0, dtype=complex)
    m = c0.size
    x0 = np.concatenate([c0.real, c0.imag])

    def F(x):
        return chart.f(x[:m] + 1j * x[m:])

    R = np.zeros((2 * m, 2 * m))
    for a in range(2 * m):
        for b in range(a, 2 * m):
            ea = np.zeros(2 * m)
            eb = np.zeros(2 * m)
            ea[a] = h
            eb[b] = h
            val = (F(x0 + ea + eb) - F(x0 + ea - eb) - F(x0 - ea + eb) + F(x0 - ea - eb)) / (4 * h * h)
            R[a, b] = R[b, a] = val
    Fxx, Fyy = R[:m, :m], R[m:, m:]
    Fxy = R[:m, m:]
    return 0.25 * ((Fxx + Fyy) + 1j * (Fxy - Fxy.T))


def levi_matrix(spec: GroupSpec, p: ModelPoint) -> tuple[np.ndarray, np.ndarray]:
    """Levi matrix of the level set of f through p on an orthonormal basis of the complex
    tangent space, and the chart gradient."""
    H, g, _ = complex_hessian(spec, p)
    gn = float(np.linalg.norm(g))
    if gn <= 1e-12 * max(1.0, float(np.linalg.norm(H))):
        raise DegenerateGradient("df vanishes at the point")
    _, _, vh = np.linalg.svd(g.reshape(1, -1))
    U = vh[1:].conj().T
    K = U.T @ H @ U.conj()
    return (K + K.conj().T) / 2, g


def numeric_levi_signature(spec: GroupSpec, p: ModelPoint,
                           zero_threshold: float = ZERO_THRESHOLD,
                           check_hypersurface: bool = True) -> LeviSignature:
    if check_hypersurface:
        rank = orbit_tangent_rank(spec, p)
        if rank != 2 * spec.complex_dim - 1:
            raise NotHypersurface(f"orbit has real dimension {rank}, "
                                  f"expected {2 * spec.complex_dim - 1}")
    K, _ = levi_matrix(spec, p)
    return signature_of(K, zero_threshold, method="numeric")


# --- nilpotent sites ---------------------------------------------------------

def tau_z(zhat: np.ndarray, spec: GroupSpec, Y: np.ndarray) -> np.ndarray:
    """Involution of g fixing the isotropy algebra of z = zhat.K^C."""
    z2 = zhat @ zhat
    return z2 @ theta(spec, Y) @ np.linalg.inv(z2)


@dataclass(frozen=True)
class NilpotentSite:
    spec: GroupSpec
    case: str
    zhat: np.ndarray = field(repr=False)
    X: np.ndarray = field(repr=False)
    A: np.ndarray = field(repr=False)
    B: np.ndarray = field(repr=False)
    X0: np.ndarray = field(repr=False)
    direction: int = 1
    label: int = 1

    @property
    def lift(self) -> np.ndarray:
        """exp(+-i X0)."""
        return expm(self.direction * 1j * self.X0)

    @property
    def xhat(self) -> np.ndarray:
        return self.lift @ self.zhat

    @property
    def F0(self) -> np.ndarray:
        """Normal generator Ad_{exp(+-iX0)} theta X0."""
        e = self.lift
        return e @ theta(self.spec, self.X0) @ np.linalg.inv(e)

    def point(self) -> ModelPoint:
        base = representative_point(self.spec, "z1")
        return group_action(self.spec, GrpElement(self.spec, self.xhat), base)

    def tau(self, Y) -> np.ndarray:
        return tau_z(self.zhat, self.spec, np.asarray(Y, dtype=complex))

    def b_decomposition(self):
        """ad(B)-eigenspaces of g labelled in units of lambda."""
        c = complex(np.vdot(self.X0.ravel(), bracket(self.B, self.X0).ravel())
                    / np.vdot(self.X0.ravel(), self.X0.ravel())).real
        unit = c / self.label
        return restricted_root_decomposition(self.spec, self.B, unit=unit)

    def split(self, mats):
        """(h-part basis, q-part basis) of the real span of `mats`."""
        if not mats:
            return [], []
        scale = max(float(np.linalg.norm(M)) for M in mats)
        h = _span_basis([(M + self.tau(M)) / 2 for M in mats], scale=scale)
        q = _span_basis([(M - self.tau(M)) / 2 for M in mats], scale=scale)
        return [m.real if self.spec.family is Family.SO0 else m for m in h], \
               [m.real if self.spec.family is Family.SO0 else m for m in q]


_EXPECTED_W = {
    ("Reduced_x0", 3): 3, ("Reduced_y0", 3): 1,
    ("Reduced_x0", 4): 2, ("Reduced_y0", 4): 1,
    ("NonReduced_z2_x0", 3): 3, ("NonReduced_z2_y0", 3): 1,
    ("NonReduced_z2_x0", 9): 3, ("NonReduced_z2_y0", 9): 1,
    ("NonReduced_z3_x", 9): 5,
}


def expected_orbit(site: NilpotentSite) -> int:
    """Index of the non-closed orbit through the site point."""
    return _EXPECTED_W[(site.case, site.spec.diagram)]


def _build_site(spec: GroupSpec, case: str, sign: float) -> NilpotentSite:
    gens = standard_generators(spec)
    A2 = gens["A2"].M
    if case.startswith("Reduced"):
        zhat, root = expm(1j * A2), 1
    elif case == "NonReduced_z3_x":
        zhat, root = expm(2j * A2), 1
    else:
        zhat, root = expm(1j * A2), 2
    rd = restricted_root_decomposition(spec, gens["A2"], unit=spec.alpha_of_A2)
    space = rd.spaces[root]
    if not space:
        raise SiteUnsupported(f"no root space of label {root} for {spec}")
    X = sign * np.asarray(space[0], dtype=complex)
    X = X / np.linalg.norm(X)
    tX = theta(spec, X)
    A = bracket(tX, X)
    c = complex(np.vdot(X.ravel(), bracket(A, X).ravel()) / np.vdot(X.ravel(), X.ravel())).real
    s = np.sqrt(2.0 / c)
    X, tX = X * s, tX * s
    A = bracket(tX, X)
    X0 = 0.5 * (A - (X + tX))
    direction = -1 if case.endswith("y0") else 1
    label = 2 if case.startswith("NonReduced_z2") else 1
    return NilpotentSite(spec, case, zhat, X, A, X - tX, X0, direction, label)


def nilpotent_site(spec: GroupSpec, case: str) -> NilpotentSite:
    """Base point exp(+-iX0).z with X0 = (A - (X + theta X))/2 built from a root vector X.

    The sign of X is chosen so that the site lies on the orbit listed in `expected_orbit`
    (replacing X by -X exchanges the two orbits reached from the same singular point).
    """
    if case not in SITE_CASES:
        raise SiteUnsupported(f"unknown site case {case!r}")
    reduced_case = case.startswith("Reduced")
    if reduced_case != spec.reduced:
        raise SiteUnsupported(f"{case} does not apply to {spec}")
    if case == "NonReduced_z3_x" and spec.n < 2:
        raise SiteUnsupported("the z3 site needs SU(n,1) with n >= 2")
    site = _build_site(spec, case, 1.0)
    want = expected_orbit(site)
    lab = classify_point(spec, site.point())
    if lab.kind == "nonclosed" and lab.w == want:
        return site
    site = _build_site(spec, case, -1.0)
    lab = classify_point(spec, site.point())
    if not (lab.kind == "nonclosed" and lab.w == want):
        raise LeviError(f"site {case} for {spec} does not reach w{want} (got {lab})")
    return site


def available_sites(spec: GroupSpec) -> list[str]:
    if spec.reduced:
        return ["Reduced_x0", "Reduced_y0"]
    out = ["NonReduced_z2_x0", "NonReduced_z2_y0"]
    if spec.n >= 2:
        out.append("NonReduced_z3_x")
    return out


# --- algebraic engine --------------------------------------------------------

def _p_part(spec: GroupSpec, Y: np.ndarray) -> np.ndarray:
    return (Y - theta(spec, Y)) / 2


class TangentModel:
    """T_x(G^C/K^C) realized as Ad_xhat p^C inside g^C, with complex coordinates in a real
    basis of p, the star map X -> X*, and the complex tangent space of the orbit."""

    def __init__(self, site: NilpotentSite):
        spec = site.spec
        self.site = site
        self.spec = spec
        self.xh = site.xhat
        self.xh_inv = np.linalg.inv(self.xh)
        self.g_basis = real_form_basis(spec)
        pb = _span_basis([_p_part(spec, b) for b in self.g_basis])
        self.p_basis = np.stack([b.real if spec.family is Family.SO0 else b for b in pb])
        self.m = len(pb)
        self._P = self.p_basis.reshape(self.m, -1).T
        self._Ppinv = np.linalg.pinv(self._P)
        S = np.stack([self.star(b) for b in self.g_basis], axis=1)
        self.S = S
        self.Sr = np.vstack([S.real, S.imag])
        self._Sr_pinv = np.linalg.pinv(self.Sr, rcond=1e-10)
        u, s, _ = np.linalg.svd(self.Sr)
        self.real_rank = int(np.sum(s > 1e-9 * s[0]))
        TS = u[:, :self.real_rank]
        self.TS = TS
        # complex tangent space: vectors v with v and i.v both in TS
        m = self.m
        iTS = np.vstack([-TS[m:], TS[:m]])
        M = np.hstack([TS, -iTS])
        _, s2, vh2 = np.linalg.svd(M)
        null = vh2[int(np.sum(s2 > 1e-9 * s2[0])):].T
        inter = TS @ null[:self.real_rank]
        C = inter[:m] + 1j * inter[m:]
        Uc, sc, _ = np.linalg.svd(C)
        self.c_rank = int(np.sum(sc > 1e-9 * sc[0])) if sc.size else 0
        self.E = Uc[:, :self.c_rank]
        self.normal_dual = Uc[:, self.c_rank:]

    def coords(self, V: np.ndarray) -> np.ndarray:
        """Complex p-coordinates of the Ad_xhat p^C component of V in g^C."""
        W = _p_part(self.spec, self.xh_inv @ V @ self.xh)
        return self._Ppinv @ W.ravel()

    def vector(self, c: np.ndarray) -> np.ndarray:
        return self.xh @ np.tensordot(c, self.p_basis, axes=1) @ self.xh_inv

    def star(self, X) -> np.ndarray:
        return self.coords(np.asarray(X, dtype=complex))

    def preimage(self, c: np.ndarray) -> tuple[np.ndarray, float]:
        """Minimum-norm real-form element Y with Y* = c, and the solve residual."""
        rhs = np.concatenate([c.real, c.imag])
        y = self._Sr_pinv @ rhs
        return from_coordinates(self.spec, y), float(np.linalg.norm(self.Sr @ y - rhs))

    def in_TS(self, c: np.ndarray) -> float:
        r = np.concatenate([c.real, c.imag])
        return float(np.linalg.norm(r - self.TS @ (self.TS.T @ r)))

    def in_TcS(self, c: np.ndarray) -> float:
        return float(np.linalg.norm(c - self.E @ (self.E.conj().T @ c)))


@dataclass
class AlgebraicLevi:
    site: NilpotentSite
    L: np.ndarray
    hermitian_defect: float
    preimage_residual: float
    normal_in_TS: float
    normal_in_TcS: float
    df_JF0: float
    model: TangentModel = field(repr=False)

    def coefficient(self, Z: np.ndarray, W: np.ndarray) -> complex:
        return _levi_value(self.model, self._omega, Z, W)

    @property
    def _omega(self):
        return _normal_functional(self.model, self.site)

    def signature(self, zero_threshold: float = ZERO_THRESHOLD, aligned: bool = False):
        sig = signature_of(self.L, zero_threshold, method="algebraic",
                           orientation="positive means L(Z,Z) is a positive multiple of F0")
        if aligned:
            sig = align(sig, self.df_JF0)
        return sig


def align(sig: LeviSignature, df_JF0: float) -> LeviSignature:
    """Convert an algebraic signature (oriented by F0) to the numeric orientation.

    The two agree exactly when df(J F0) < 0, i.e. when J F0 points into {f < f(p)}.
    """
    out = sig if df_JF0 < 0 else sig.flipped()
    return LeviSignature(out.pos, out.neg, out.zero,
                         "positive means pseudoconvex from the side f < f(p)", "algebraic",
                         out.eigenvalues)


def _normal_functional(model: TangentModel, site: NilpotentSite) -> np.ndarray:
    """Complex linear functional vanishing on T_C S with value 1 on F0."""
    nvec = model.normal_dual[:, 0]
    f0 = model.coords(site.F0)
    return nvec.conj() / np.vdot(nvec, f0)


def _levi_value(model: TangentModel, omega: np.ndarray, Zc: np.ndarray, Wc: np.ndarray) -> complex:
    Z = model.vector(Zc)
    YJ, _ = model.preimage(1j * Wc)
    Y, _ = model.preimage(Wc)
    val = 0.5 * model.coords(bracket(YJ, Z)) - 0.5j * model.coords(bracket(Y, Z))
    return complex(omega @ val)


def df_along(spec: GroupSpec, xhat: np.ndarray, V: np.ndarray, h: float = 1e-6) -> float:
    """Derivative of f at xhat.K^C along the holomorphic direction V in g^C."""
    base = representative_point(spec, "z1")

    def f(t):
        g = GrpElement(spec, expm(t * V) @ xhat)
        return invariant_f(spec, group_action(spec, g, base))

    return (f(h) - f(-h)) / (2 * h)


def algebraic_levi(spec: GroupSpec, site: NilpotentSite) -> AlgebraicLevi:
    if site.spec != spec:
        raise SiteUnsupported("site belongs to a different spec")
    model = TangentModel(site)
    if model.real_rank != 2 * model.m - 1:
        raise NotHypersurface(f"orbit tangent rank {model.real_rank} at the site")
    omega = _normal_functional(model, site)
    k = model.c_rank
    L = np.zeros((k, k), dtype=complex)
    res = 0.0
    for a in range(k):
        for b in range(k):
            L[a, b] = _levi_value(model, omega, model.E[:, a], model.E[:, b])
    for b in range(k):
        res = max(res, model.preimage(model.E[:, b])[1], model.preimage(1j * model.E[:, b])[1])
    f0 = model.coords(site.F0)
    defect = float(np.linalg.norm(L - L.conj().T))
    H = (L + L.conj().T) / 2
    return AlgebraicLevi(site, H, defect, res, model.in_TS(f0), model.in_TcS(f0),
                         df_along(spec, site.xhat, 1j * site.F0), model)


def algebraic_levi_signature(spec: GroupSpec, site: NilpotentSite,
                             zero_threshold: float = ZERO_THRESHOLD,
                             aligned: bool = False) -> LeviSignature:
    return algebraic_levi(spec, site).signature(zero_threshold, aligned)


def tangent_star(spec: GroupSpec, site: NilpotentSite, X) -> np.ndarray:
    """X* at the site point, as an element of Ad_xhat p^C inside g^C."""
    X = np.asarray(getattr(X, "M", X), dtype=complex)
    xh = site.xhat
    xi = np.linalg.inv(xh)
    return xh @ _p_part(spec, xi @ X @ xh) @ xi


# --- structured checks at sites ----------------------------------------------

def site_blocks(site: NilpotentSite) -> dict:
    """Real bases of the b-root spaces split along h + q."""
    rd = site.b_decomposition()
    out = {}
    for label in (-2, -1, 0, 1, 2):
        h, q = site.split(list(rd.spaces[label]))
        out[("h", label)] = h
        out[("q", label)] = q
    return out


def nilcone_levi_coefficients(spec: GroupSpec, site: NilpotentSite, rng,
                              draws: int = 100) -> dict:
    """Normal coefficients of L(F, F) for random F in the blocks Ad(g_q^0) and
    Ad((g_q^{-lambda})_0) at an x0-type site, from the bracket engine and from the
    trace-form expressions."""
    if site.direction != 1 or site.label != 1:
        raise SiteUnsupported("coefficients are defined at x0 sites built from lambda")
    lev = algebraic_levi(spec, site)
    model = lev.model
    omega = _normal_functional(model, site)
    blocks = site_blocks(site)
    e = site.lift
    ei = np.linalg.inv(e)
    q0 = blocks[("q", 0)]
    qm = blocks[("q", -1)]
    tX0 = theta(spec, site.X0)
    if qm:
        # complement of R theta X0 inside g_q^{-lambda}
        proj = [M - (np.vdot(tX0.ravel(), M.ravel()) / np.vdot(tX0.ravel(), tX0.ravel())) * tX0
                for M in qm]
        qm0 = _span_basis(proj, scale=1.0)
    else:
        qm0 = []
    out = {"n": [], "p": [], "n_trace": [], "p_trace": [], "tangent_residual": 0.0}
    for _ in range(draws):
        if q0:
            Z0 = np.tensordot(rng.standard_normal(len(q0)), np.stack(q0), axes=1)
            F = model.coords(e @ Z0 @ ei)
            out["tangent_residual"] = max(out["tangent_residual"], model.in_TcS(F))
            out["n"].append(_levi_value(model, omega, F, F).real)
            out["n_trace"].append(trace_form(Z0, Z0).real)
        if qm0:
            Xm = np.tensordot(rng.standard_normal(len(qm0)), np.stack(qm0), axes=1)
            F = model.coords(e @ Xm @ ei)
            out["tangent_residual"] = max(out["tangent_residual"], model.in_TcS(F))
            out["p"].append(_levi_value(model, omega, F, F).real)
            Cb = bracket(site.X0, Xm)
            out["p_trace"].append(-trace_form(Cb, Cb).real)
    return out


def star_closed_form_residuals(spec: GroupSpec, site: NilpotentSite) -> dict:
    """Compare X* with the closed expressions through Ad_{exp(+-iX0)} at an x0 site:
    B* = i lambda(B) Ad X0, (g_h^lambda)* = 0, (g_q^lambda)* = Ad X_lambda, and for the
    2-lambda sites w = (X - tau X)/2 transported by Ad for X in g^lambda."""
    e = site.lift
    ei = np.linalg.inv(e)

    def ad(Y):
        return e @ Y @ ei

    blocks = site_blocks(site)
    lab = site.label
    out = {}
    lam_B = complex(np.vdot(site.X0.ravel(), bracket(site.B, site.X0).ravel())
                    / np.vdot(site.X0.ravel(), site.X0.ravel())).real
    out["B"] = float(np.linalg.norm(tangent_star(spec, site, site.B)
                                    - site.direction * 1j * lam_B * ad(site.X0)))
    out["h_lambda"] = max([float(np.linalg.norm(tangent_star(spec, site, Y)))
                           for Y in blocks[("h", lab)]] or [0.0])
    out["q_lambda"] = max([float(np.linalg.norm(tangent_star(spec, site, Y) - ad(Y)))
                           for Y in blocks[("q", lab)]] or [0.0])
    if lab == 2:
        rd = site.b_decomposition()
        out["w_plus"] = max([float(np.linalg.norm(tangent_star(spec, site, Y)
                                                  - ad((Y - site.tau(Y)) / 2)))
                             for Y in rd.spaces[1]] or [0.0])
    return out


def block_cross_terms(spec: GroupSpec, site: NilpotentSite) -> dict:
    """Levi cross terms between the complex tangent blocks at a 2-lambda site: the
    tangent space of the rank-one subgroup orbit, W+ (from g^lambda) and W- (from
    g^-lambda)."""
    if site.label != 2:
        raise SiteUnsupported("block structure is defined at sites built from 2 alpha")
    lev = algebraic_levi(spec, site)
    model = lev.model
    omega = _normal_functional(model, site)
    e = site.lift
    ei = np.linalg.inv(e)
    rd = site.b_decomposition()

    def wvec(Y):
        return model.coords(e @ ((Y - site.tau(Y)) / 2) @ ei)

    def cspan(vecs):
        if not vecs:
            return np.zeros((model.m, 0), dtype=complex)
        M = np.stack(vecs, axis=1)
        u, s, _ = np.linalg.svd(M, full_matrices=False)
        return u[:, :int(np.sum(s > 1e-9 * s[0]))]

    Wp = cspan([wvec(Y) for Y in rd.spaces[1]])
    Wm = cspan([wvec(Y) for Y in rd.spaces[-1]])
    # subgroup generated by the a-root spaces 0, +-2alpha
    A2 = standard_generators(spec)["A2"]
    rda = restricted_root_decomposition(spec, A2, unit=spec.alpha_of_A2)
    gprime = list(rda.spaces[0]) + list(rda.spaces[2]) + list(rda.spaces[-2])
    Gp = cspan([model.star(Y) for Y in gprime])
    # intersect with the complex tangent space
    M = np.hstack([Gp, -model.E])
    _, s, vh = np.linalg.svd(M)
    null = vh[int(np.sum(s > 1e-9 * s[0])):].conj().T
    Tp = cspan([Gp @ null[:Gp.shape[1], k] for k in range(null.shape[1])])
    blocks = {"T'": Tp, "W+": Wp, "W-": Wm}
    dims = {k: v.shape[1] for k, v in blocks.items()}
    residual = max(model.in_TcS(v[:, k]) for v in blocks.values() for k in range(v.shape[1]))
    worst = 0.0
    names = list(blocks)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            for ka in range(blocks[a].shape[1]):
                for kb in range(blocks[b].shape[1]):
                    za, zb = blocks[a][:, ka], blocks[b][:, kb]
                    worst = max(worst, abs(_levi_value(model, omega, za, zb)),
                                abs(_levi_value(model, omega, zb, za)))
    diag = {}
    for k, v in blocks.items():
        K = np.array([[_levi_value(model, omega, v[:, a], v[:, b]) for b in range(v.shape[1])]
                      for a in range(v.shape[1])])
        diag[k] = signature_of(K, method="algebraic").counts if K.size else (0, 0, 0)
    return {"dims": dims, "cross": worst, "block_residual": residual, "blocks": diag}
