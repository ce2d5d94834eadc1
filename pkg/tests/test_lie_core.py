import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitscope.lie_core import (AlgElement, Family, GroupSpec, GrpElement, LieCoreError,
                                 NonSplitBase, Realness, SpecMismatch, algebra_residual,
                                 apply_involution, bracket, cartan_split, coordinates, expm,
                                 exp_matrix, from_coordinates, group_residual,
                                 random_algebra_element, real_form_basis,
                                 reduce_to_fundamental_domain, restricted_root_decomposition,
                                 sigma_group, standard_generators, table_root_dims, theta)

SPECS = [GroupSpec(Family.SO0, n) for n in (2, 3, 4)] + [GroupSpec(Family.SU, n) for n in (1, 2, 3)]


def test_spec_diagrams():
    assert GroupSpec(Family.SO0, 2).diagram == 3
    assert GroupSpec(Family.SO0, 4).diagram == 4
    assert GroupSpec(Family.SU, 1).diagram == 3
    assert GroupSpec(Family.SU, 3).diagram == 9
    assert GroupSpec(Family.SU, 2).size == 3


def test_spec_rejects_bad_n():
    with pytest.raises((LieCoreError, ValueError)):
        GroupSpec(Family.SO0, 1)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_theta_negates_a_generator(spec):
    A = standard_generators(spec)["A2"].M
    assert np.allclose(theta(spec, A), -A)


def test_sigma_of_identity():
    for spec in SPECS:
        I = np.eye(spec.size, dtype=complex)
        assert np.allclose(sigma_group(spec, I), I)


def test_sigma_of_section_matrix_fixes_line():
    spec = GroupSpec(Family.SU, 1)
    u, v = 0.5, -0.5j
    M = np.array([[1, 1 / (u - v)], [v, u / (u - v)]], dtype=complex)
    y = sigma_group(spec, M) @ np.array([0, 1], dtype=complex)
    target = np.array([np.conj(v), 1])
    assert abs(y[0] * target[1] - y[1] * target[0]) < 1e-12


def test_exp_zero_and_z2():
    spec = GroupSpec(Family.SO0, 2)
    assert np.allclose(expm(np.zeros((3, 3))), np.eye(3))
    A2 = standard_generators(spec)["A2"].M
    assert np.allclose(expm(1j * A2) @ np.array([0, 0, 1]), [0, 1j, 0], atol=1e-14)


def test_exp_inverse_law(rng):
    spec = GroupSpec(Family.SU, 2)
    worst = 0.0
    for _ in range(100):
        X = random_algebra_element(spec, rng)
        worst = max(worst, np.linalg.norm(expm(X) @ expm(-X) - np.eye(3)))
    assert worst < 1e-12


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_exp_lands_in_group(spec, rng):
    X = AlgElement(spec, random_algebra_element(spec, rng, 0.7), Realness.REAL_FORM)
    assert X.is_valid()
    g = exp_matrix(X)
    assert group_residual(spec, g.M) < 1e-11


def test_generators():
    A2 = standard_generators(GroupSpec(Family.SO0, 2))["A2"].M
    expected = np.zeros((3, 3))
    expected[1, 2] = expected[2, 1] = np.pi / 2
    assert np.allclose(A2, expected)
    Cp = standard_generators(GroupSpec(Family.SU, 2))["C'"].M
    assert np.allclose(Cp, np.diag([0, 1j, -1j]))


def test_su_bracket_lies_on_a_line():
    spec = GroupSpec(Family.SU, 2)
    g = standard_generators(spec)
    C, A = g["C"].M, g["A2"].M
    br = bracket(theta(spec, C), C)
    c = np.vdot(A.ravel(), br.ravel()) / np.vdot(A.ravel(), A.ravel())
    assert np.linalg.norm(br - c * A) < 1e-12


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_generators_are_in_real_form(spec):
    for X in standard_generators(spec).values():
        assert algebra_residual(spec, X.M) < 1e-12


@pytest.mark.parametrize("n", [2, 3, 4, 5])
def test_root_dims_so0(n):
    assert table_root_dims(GroupSpec(Family.SO0, n)) == (n - 1, 0)


@pytest.mark.parametrize("n", [2, 3, 4])
def test_root_dims_su(n):
    assert table_root_dims(GroupSpec(Family.SU, n)) == (2 * (n - 1), 1)


@pytest.mark.parametrize("spec", SPECS, ids=str)
def test_root_decomposition_total_dimension(spec):
    rd = restricted_root_decomposition(spec, standard_generators(spec)["A2"])
    assert sum(rd.dims.values()) == len(real_form_basis(spec))
    assert rd.dim(1) == rd.dim(-1) and rd.dim(2) == rd.dim(-2)


def test_root_decomposition_rejects_elliptic_base():
    spec = GroupSpec(Family.SU, 2)
    with pytest.raises(NonSplitBase):
        restricted_root_decomposition(spec, standard_generators(spec)["C'"])


def test_fundamental_domain():
    red, nonred = GroupSpec(Family.SO0, 3), GroupSpec(Family.SU, 2)
    assert reduce_to_fundamental_domain(red, -np.pi / 3) == pytest.approx(np.pi / 3)
    assert reduce_to_fundamental_domain(red, 2 * np.pi) == pytest.approx(0.0, abs=1e-12)
    assert reduce_to_fundamental_domain(nonred, 3 * np.pi / 4) == pytest.approx(np.pi / 4)


@given(st.floats(-20, 20))
def test_fundamental_domain_in_range(t):
    for spec in (GroupSpec(Family.SO0, 2), GroupSpec(Family.SU, 2)):
        r = reduce_to_fundamental_domain(spec, t)
        bound = np.pi if spec.reduced else np.pi / 2
        assert -1e-12 <= r <= bound + 1e-12


@given(st.integers(0, 2**31 - 1))
def test_coordinates_round_trip(seed):
    rng = np.random.default_rng(seed)
    for spec in (GroupSpec(Family.SO0, 3), GroupSpec(Family.SU, 2)):
        X = random_algebra_element(spec, rng)
        assert np.allclose(from_coordinates(spec, coordinates(spec, X)), X)


@given(st.integers(0, 2**31 - 1))
def test_cartan_split_properties(seed):
    rng = np.random.default_rng(seed)
    spec = GroupSpec(Family.SU, 2)
    X = random_algebra_element(spec, rng)
    k, p = cartan_split(spec, X)
    assert np.allclose(k + p, X)
    assert np.allclose(theta(spec, k), k) and np.allclose(theta(spec, p), -p)


@given(st.integers(0, 2**31 - 1))
def test_involutions_commute(seed):
    rng = np.random.default_rng(seed)
    spec = GroupSpec(Family.SU, 2)
    X = AlgElement(spec, random_algebra_element(spec, rng) * (1 + 0.5j))
    a = apply_involution("sigma", apply_involution("theta", X)).M
    b = apply_involution("theta", apply_involution("sigma", X)).M
    assert np.allclose(a, b)


def test_shape_mismatch():
    with pytest.raises(SpecMismatch):
        AlgElement(GroupSpec(Family.SO0, 2), np.zeros((4, 4)))
    with pytest.raises(SpecMismatch):
        apply_involution("theta", np.zeros((3, 3)))


def test_group_element_validity(rng):
    spec = GroupSpec(Family.SO0, 2)
    assert GrpElement(spec, np.eye(3), Realness.REAL_FORM).is_valid()
    assert not GrpElement(spec, 2 * np.eye(3), Realness.REAL_FORM).is_valid()
