import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitscope.lie_core import (Family, GroupSpec, GrpElement, Realness, SpecMismatch, expm,
                                 random_algebra_element)
from orbitscope.models import (LabelNotInDiagram, ModelError, ModelPoint, ParamOutOfDomain,
                               SliceId, group_action, hermitian_pairing, point_residual,
                               representative_point, slice_point)
from orbitscope.orbits import invariant_f

SO = {n: GroupSpec(Family.SO0, n) for n in (2, 3, 4, 5)}
SU = {n: GroupSpec(Family.SU, n) for n in (1, 2, 3, 4)}


def same_line(a, b, tol=1e-12):
    a, b = np.asarray(a, complex), np.asarray(b, complex)
    k = int(np.argmax(np.abs(b)))
    return np.linalg.norm(a * b[k] - b * a[k]) < tol * np.linalg.norm(a) * np.linalg.norm(b)


def test_hermitian_pairing_values():
    assert hermitian_pairing([0, 1], [0, 1]) == -1
    assert hermitian_pairing([1, 0], [1, 0]) == 1
    assert hermitian_pairing([1j, 1], [-1j, 1]) == pytest.approx(-2)


def test_so0_z2():
    assert np.allclose(representative_point(SO[3], "z2").xi, [0, 0, 1j, 0])


def test_su_w5_in_padded_coordinates():
    p = representative_point(SU[3], "w5")
    assert same_line(p.z, [0, 1, -1j, 1]) and same_line(p.w, [0, 1, 1j, 1])


def test_su_z1():
    p = representative_point(SU[1], "z1")
    assert same_line(p.z, [0, 1]) and same_line(p.w, [0, 1])


def test_slice_l2_so0():
    p = slice_point(SO[2], 2, 0.5)
    assert np.allclose(p.xi, [np.sinh(1), 1j * np.cosh(1), 0])


@pytest.mark.parametrize("n", [2, 3, 5])
def test_slice_l1_endpoint_is_z1(n):
    p = slice_point(SO[n], SliceId(1, extended=True), 1.0)
    assert np.allclose(p.xi, representative_point(SO[n], "z1").xi, atol=1e-15)


def test_slice_l5_su():
    s = 0.3
    p = slice_point(SU[3], 5, s)
    assert same_line(p.z, [0, np.sinh(s), 1j * np.cosh(s), 0])
    assert same_line(p.w, [0, np.sinh(s), -1j * np.cosh(s), 0])


@pytest.mark.parametrize("spec", list(SO.values())[:3] + list(SU.values())[:3], ids=str)
@pytest.mark.parametrize("j", [1, 2, 3, 4, 5])
def test_closed_form_matches_exponential(spec, j):
    if j == 5 and not (spec.family is Family.SU and spec.n >= 2):
        with pytest.raises(LabelNotInDiagram):
            slice_point(spec, j, 0.4)
        return
    for s in (0.1, 0.4, 0.9):
        a = slice_point(spec, j, s, method="closed")
        b = slice_point(spec, j, s, method="exp")
        if spec.family is Family.SO0:
            assert np.allclose(a.xi, b.xi, atol=1e-12)
        else:
            assert a.distance(b) < 1e-12


def test_slice_parameter_domains():
    with pytest.raises(ParamOutOfDomain):
        slice_point(SO[2], 1, 1.0)
    with pytest.raises(ParamOutOfDomain):
        slice_point(SO[2], 2, 0.0)
    with pytest.raises(ModelError):
        SliceId(6)


def test_group_action_identity():
    p = slice_point(SU[2], 2, 0.3)
    q = group_action(SU[2], GrpElement(SU[2], np.eye(3)), p)
    assert p.distance(q) == 0


def test_point_residual():
    p = representative_point(SO[3], "z1")
    assert point_residual(SO[3], p) == 0
    xi = slice_point(SO[3], 2, 0.4).xi
    eps = 1e-3
    q = ModelPoint(SO[3], xi=xi + eps * np.eye(4)[0])
    assert point_residual(SO[3], q) == pytest.approx(abs(2 * eps * xi[0] + eps**2), rel=1e-9)
    assert point_residual(SU[1], representative_point(SU[1], "z1")) == 0
    bad = ModelPoint(SU[1], z=[1, 0], w=[0, 1])
    assert point_residual(SU[1], bad) > 0


def test_model_point_validation():
    with pytest.raises(SpecMismatch):
        ModelPoint(SO[2], xi=[1, 2])
    with pytest.raises(SpecMismatch):
        ModelPoint(SU[1], xi=[1, 2])
    with pytest.raises(ModelError):
        ModelPoint(SU[1], z=[0, 0], w=[0, 1])


def test_unknown_representative():
    with pytest.raises(LabelNotInDiagram):
        representative_point(SO[3], "w3")
    with pytest.raises(LabelNotInDiagram):
        representative_point(SU[1], "w5")


@pytest.mark.parametrize("spec", [SO[2], SO[3], SU[1], SU[2]], ids=str)
def test_json_round_trip(spec):
    p = slice_point(spec, 2, 0.37)
    q = ModelPoint.from_json(p.to_json())
    assert q.spec == spec and p.distance(q) < 1e-15


@given(st.integers(0, 2**31 - 1), st.floats(0.05, 0.95))
def test_action_preserves_quadric_and_f(seed, s):
    rng = np.random.default_rng(seed)
    for spec in (SO[3], SU[2]):
        g = expm(random_algebra_element(spec, rng, 0.5))
        p = slice_point(spec, 1, s)
        q = group_action(spec, GrpElement(spec, g, Realness.REAL_FORM), p)
        assert point_residual(spec, q) < 1e-9
        assert invariant_f(spec, q) == pytest.approx(invariant_f(spec, p), abs=1e-9)


@given(st.integers(0, 2**31 - 1))
def test_projective_normalization_is_scale_free(seed):
    rng = np.random.default_rng(seed)
    p = slice_point(SU[2], 3, 0.5)
    c = complex(*rng.uniform(0.2, 3, 2))
    q = ModelPoint(SU[2], z=c * p.z, w=np.conj(c) * 2 * p.w)
    assert p.distance(q) < 1e-12
