import numpy as np
import pytest
from hypothesis import given, strategies as st

from orbitscope.lie_core import Family, GroupSpec, GrpElement, Realness, expm, random_algebra_element
from orbitscope.levi import (LeviSignature, NotHypersurface, SiteUnsupported, algebraic_levi,
                             algebraic_levi_signature, available_sites, block_cross_terms,
                             complex_hessian, expected_orbit, finite_difference_hessian,
                             nilcone_levi_coefficients, nilpotent_site, numeric_levi_signature,
                             signature_of, star_closed_form_residuals, tangent_star)
from orbitscope.models import group_action, representative_point, slice_point
from orbitscope.orbits import classify_point

SO2, SO3, SO4 = (GroupSpec(Family.SO0, n) for n in (2, 3, 4))
SU1, SU2, SU3 = (GroupSpec(Family.SU, n) for n in (1, 2, 3))
SITES = [(sp, c) for sp in (SO2, SO3, SO4, SU1, SU2, SU3) for c in available_sites(sp)]


def test_signature_of_counts():
    sig = signature_of(np.diag([2.0, -1.0, 1e-12]))
    assert sig.counts == (1, 1, 1) and sig.character == "indefinite"
    assert signature_of(np.zeros((2, 2))).character == "identically-zero"
    semi = signature_of(np.diag([1.0, 0.0]))
    assert semi.character == "definite" and semi.strict_character == "semidefinite"
    assert semi.flipped().counts == (0, 1, 1)


def test_signature_json():
    d = LeviSignature(1, 0, 1).to_json()
    assert d["pos"] == 1 and d["character"] == "definite"


def test_so31_hypersurface_counts():
    assert numeric_levi_signature(SO3, representative_point(SO3, "w1")).counts == (1, 0, 1)


@pytest.mark.parametrize("code", ["w1", "w2", "w3", "w4"])
@pytest.mark.parametrize("spec", [SO2, SU1], ids=str)
def test_flat_orbits(spec, code):
    assert numeric_levi_signature(spec, representative_point(spec, code)).counts == (0, 0, 1)


def test_w5_indefinite():
    sig = numeric_levi_signature(SU2, representative_point(SU2, "w5"))
    assert sig.pos >= 1 and sig.neg >= 1


def test_not_hypersurface():
    with pytest.raises(NotHypersurface):
        numeric_levi_signature(SU2, representative_point(SU2, "z3"))


@pytest.mark.parametrize("spec,case", SITES, ids=str)
def test_site_lies_on_expected_orbit(spec, case):
    site = nilpotent_site(spec, case)
    lab = classify_point(spec, site.point())
    assert lab.kind == "nonclosed" and lab.w == expected_orbit(site)


@pytest.mark.parametrize("spec,case", SITES, ids=str)
def test_algebraic_engine_consistency(spec, case):
    lev = algebraic_levi(spec, nilpotent_site(spec, case))
    assert lev.hermitian_defect < 1e-12
    assert lev.preimage_residual < 1e-12
    assert lev.normal_in_TS < 1e-12
    assert lev.normal_in_TcS > 0.5
    assert abs(lev.df_JF0) > 1.0


@pytest.mark.parametrize("spec,case", SITES, ids=str)
def test_algebraic_agrees_with_numeric(spec, case):
    site = nilpotent_site(spec, case)
    alg = algebraic_levi_signature(spec, site, aligned=True)
    assert alg.counts == numeric_levi_signature(spec, site.point()).counts


@pytest.mark.parametrize("spec,case,character", [
    (SO3, "Reduced_x0", "definite"), (SO3, "Reduced_y0", "definite"),
    (SO4, "Reduced_x0", "definite"), (SO4, "Reduced_y0", "definite"),
    (SU2, "NonReduced_z2_x0", "definite"), (SU2, "NonReduced_z2_y0", "definite"),
    (SU3, "NonReduced_z2_x0", "definite"), (SU2, "NonReduced_z3_x", "indefinite"),
    (SU3, "NonReduced_z3_x", "indefinite"), (SO2, "Reduced_x0", "identically-zero"),
    (SU1, "NonReduced_z2_y0", "identically-zero")], ids=str)
def test_algebraic_character(spec, case, character):
    assert algebraic_levi_signature(spec, nilpotent_site(spec, case)).character == character


def test_site_rejection():
    with pytest.raises(SiteUnsupported):
        nilpotent_site(SO3, "NonReduced_z2_x0")
    with pytest.raises(SiteUnsupported):
        nilpotent_site(SU1, "NonReduced_z3_x")
    with pytest.raises(SiteUnsupported):
        nilpotent_site(SU2, "bogus")


def test_star_of_zero():
    site = nilpotent_site(SO3, "Reduced_x0")
    assert np.linalg.norm(tangent_star(SO3, site, np.zeros((4, 4)))) == 0


@pytest.mark.parametrize("spec,case", SITES, ids=str)
def test_star_closed_forms(spec, case):
    res = star_closed_form_residuals(spec, nilpotent_site(spec, case))
    assert max(res.values()) < 1e-12


@pytest.mark.parametrize("spec,case", [(SO3, "Reduced_x0"), (SO4, "Reduced_x0"),
                                       (SU2, "NonReduced_z3_x"), (SU3, "NonReduced_z3_x")], ids=str)
def test_coefficient_signs(spec, case, rng):
    c = nilcone_levi_coefficients(spec, nilpotent_site(spec, case), rng, draws=30)
    assert c["tangent_residual"] < 1e-10
    assert all(x <= 1e-10 for x in c["n"])
    assert all(x >= -1e-10 for x in c["p"])
    assert len(c["n"]) + len(c["p"]) > 0


def test_coefficients_need_x0_site(rng):
    with pytest.raises(SiteUnsupported):
        nilcone_levi_coefficients(SO3, nilpotent_site(SO3, "Reduced_y0"), rng)


@pytest.mark.parametrize("spec", [SU2, SU3], ids=str)
def test_block_structure(spec):
    r = block_cross_terms(spec, nilpotent_site(spec, "NonReduced_z2_x0"))
    assert r["cross"] < 1e-12 and r["block_residual"] < 1e-12
    assert r["dims"]["T'"] == 1
    assert r["dims"]["W+"] == r["dims"]["W-"] == spec.n - 1


def _hessian_error(spec, p):
    H, _, chart = complex_hessian(spec, p)
    return np.linalg.norm(H - finite_difference_hessian(chart)) / np.linalg.norm(H)


@given(st.integers(0, 2**31 - 1), st.sampled_from([1, 2, 3, 4]), st.floats(0.1, 0.9))
def test_hessian_matches_finite_differences(seed, j, s):
    rng = np.random.default_rng(seed)
    for spec in (SO3, SU2):
        g = GrpElement(spec, expm(random_algebra_element(spec, rng, 0.3)), Realness.REAL_FORM)
        assert _hessian_error(spec, group_action(spec, g, slice_point(spec, j, s))) <= 1e-5


@given(st.integers(0, 2**31 - 1))
def test_levi_signature_is_invariant(seed):
    rng = np.random.default_rng(seed)
    p = representative_point(SO3, "w2")
    g = GrpElement(SO3, expm(random_algebra_element(SO3, rng)), Realness.REAL_FORM)
    assert numeric_levi_signature(SO3, group_action(SO3, g, p)).counts == (1, 0, 1)
