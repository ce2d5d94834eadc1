import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitscope.covering import (GROUP_COVER, ORBIT_COVER, SECTION_DOMAIN, SPEC, CoverPoint,
                                 CoveringError, DiagonalDegenerate, TargetNotInImage,
                                 covering_map, fiber_cardinality, jacobian_rank, lifted_slice,
                                 project, section, section_and_trivialization,
                                 section_base_point, slice2, torus)
from orbitscope.lie_core import expm, random_algebra_element
from orbitscope.models import ParamOutOfDomain, representative_point, slice_point
from orbitscope.orbits import DomainId, classify_point, domain_contains

I2 = np.eye(2, dtype=complex)


def test_lifted_slice_projects_to_l2():
    assert slice2(0.5).distance(slice_point(SPEC, 2, 0.5)) < 1e-13
    assert abs(np.linalg.det(lifted_slice(0.5)) - 1) < 1e-13


def test_small_s_tends_to_z2():
    assert slice2(1e-9).distance(representative_point(SPEC, "z2")) < 1e-8


def test_plus_minus_identity_agree():
    for s in (0.2, 0.7):
        a = covering_map(CoverPoint(I2, s))
        b = covering_map(CoverPoint(-I2, s))
        assert a.distance(slice_point(SPEC, 2, s)) < 1e-13 and a.distance(b) < 1e-13


@given(st.integers(0, 2**31 - 1), st.floats(0.05, 2.0))
def test_image_lies_in_s1(seed, s):
    rng = np.random.default_rng(seed)
    g = expm(random_algebra_element(SPEC, rng))
    assert domain_contains(SPEC, DomainId("S1"), covering_map(CoverPoint(g, s)), tol=1e-8)


def test_orbit_cover_fiber_at_l2():
    rep = fiber_cardinality(slice_point(SPEC, 2, 0.7), ORBIT_COVER)
    assert rep.fiber_count == 2 and rep.jacobian_ranks == [4, 4]
    gs = sorted((q.g for q in rep.preimages), key=lambda g: g[0, 0].real)
    assert np.allclose(gs[0], -I2, atol=1e-7) and np.allclose(gs[1], I2, atol=1e-7)
    assert all(abs(q.s - 0.7) < 1e-12 for q in rep.preimages)


def test_group_cover_fiber_at_lifted_slice():
    rep = fiber_cardinality(lifted_slice(0.7), GROUP_COVER)
    assert rep.fiber_count == 2 and rep.jacobian_ranks == [6, 6]
    for q in rep.preimages:
        sign = np.sign(q.g[0, 0].real)
        assert np.allclose(q.g, sign * I2, atol=1e-7) and np.allclose(q.k, sign * I2, atol=1e-7)


def test_group_cover_with_torus_factor(rng):
    g = expm(random_algebra_element(SPEC, rng, 0.5))
    target = covering_map(CoverPoint(g, 0.4, torus(0.8 + 0.3j)), GROUP_COVER)
    rep = fiber_cardinality(target, GROUP_COVER, rng=rng)
    assert rep.fiber_count == 2
    for q in rep.preimages:
        assert np.allclose(covering_map(q, GROUP_COVER), target, atol=1e-8)


def test_targets_outside_image():
    with pytest.raises(TargetNotInImage):
        fiber_cardinality(slice_point(SPEC, 1, 0.5), ORBIT_COVER)
    with pytest.raises(TargetNotInImage):
        fiber_cardinality(2 * I2, GROUP_COVER)


def test_cover_point_validation():
    with pytest.raises(ParamOutOfDomain):
        CoverPoint(I2, 0.0)
    with pytest.raises(CoveringError):
        CoverPoint(2 * I2, 0.5)
    with pytest.raises(CoveringError):
        CoverPoint(I2, 0.5, np.array([[1, 1], [0, 1]]))
    with pytest.raises(CoveringError):
        torus(0)


def test_jacobian_rank_at_identity():
    assert jacobian_rank(CoverPoint(I2, 0.3), ORBIT_COVER) == 4
    assert jacobian_rank(CoverPoint(I2, 0.3, I2), GROUP_COVER) == 6


def test_section_at_sample_point():
    u, v = 0.5, -0.5j
    M = section(u, v)
    assert abs(np.linalg.det(M) - 1) < 1e-12
    assert project(M).distance(section_base_point(u, v)) < 1e-12
    assert np.allclose(section_and_trivialization(u, v, 1.0), M)


def test_section_image_domain():
    p = project(section(0.3, -0.2j))
    assert domain_contains(SPEC, DomainId(SECTION_DOMAIN), p)
    assert classify_point(SPEC, p).slice == 4


def test_section_domain_checks():
    with pytest.raises(DiagonalDegenerate):
        section(0.3, 0.3)
    with pytest.raises(ParamOutOfDomain):
        section(1.2, 0.3)


@given(st.complex_numbers(max_magnitude=0.95), st.complex_numbers(max_magnitude=0.95),
       st.complex_numbers(min_magnitude=0.1, max_magnitude=5))
def test_trivialization_determinant(u, v, lam):
    if abs(u - v) < 1e-3:
        return
    M = section_and_trivialization(u, v, lam)
    assert abs(np.linalg.det(M) - 1) < 1e-9 * max(1.0, np.linalg.norm(M) ** 2)
    assert project(M).distance(section_base_point(u, v)) < 1e-9
