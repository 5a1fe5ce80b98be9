from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lgorb.arith import Cyclotomic, EFunction, ZetaProduct, combination_mod
from lgorb.errors import NonPolynomialCharacter
from lgorb.invariants import (
    _sectors,
    _trace_series,
    chi_fiber_on_locus,
    chi_orb_commuting_pairs,
    chi_orb_level,
    chi_orb_level_reduced,
    chi_orb_total,
    e_function_level,
    e_function_total,
    e_sector,
    equivariant_omega_character,
    lefschetz_numbers,
    level_reports,
    sector_data,
    sector_invariant_dimensions,
    zeta_from_e,
    zeta_orb_level,
    zeta_orb_total,
    zeta_sector,
)
from lgorb.polynomial import from_string, loop_basis
from lgorb.symmetry import (
    MonomialElement,
    build_symmetry_data,
    element_eigenvalues_on_locus,
    fixed_locus,
    restrict_polynomial,
)

from conftest import instance
from helpers import (
    LOOP3,
    LOOP_CASES_UPTO_2,
    character_oracle_failures,
    consistency_failures,
    fermat_lefschetz_failures,
    golden_e1,
    golden_es,
)

# the worked example


def test_loop7_golden_e_functions(loop7_data):
    level1, level_s = loop7_data.levels
    assert e_function_level(loop7_data, level1) == golden_e1()
    assert e_function_level(loop7_data, level_s) == golden_es()


def test_loop7_sector_dimensions(loop7_data):
    one_s = _sectors(loop7_data)[5]
    assert one_s.rep.sigma == (2, 3, 0, 1) and not any(one_s.rep.lam)
    dims = sector_invariant_dimensions(one_s)
    assert sum(dims.values()) == 8
    alphas = sorted(a for a, k in dims.items() for _ in range(k))
    assert alphas == [F(3, 7), F(5, 7), F(6, 7), 1, 1, F(8, 7), F(9, 7), F(11, 7)]
    # Table 1 weights are alpha - 1
    table = sorted([F(-4, 7), 0, F(-1, 7), F(-2, 7), F(2, 7), F(1, 7), 0, F(4, 7)])
    assert sorted(a - 1 for a in alphas) == table


def test_loop7_sector_alphas_from_even_monomials(loop7_data):
    # independent enumeration: loop basis monomials of 2 y1^3 y2 + 2 y1 y2^5 of even total degree
    expect = sorted(F(2 * (k1 + 1) + (k2 + 1), 7) for k1, k2 in loop_basis((3, 5)) if (k1 + k2) % 2 == 0)
    one_s = _sectors(loop7_data)[5]
    dims = sector_invariant_dimensions(one_s)
    assert sorted(a for a, k in dims.items() for _ in range(k)) == expect


def test_loop7_chi_values(loop7_data):
    level1, level_s = loop7_data.levels
    assert chi_orb_level(loop7_data, level1) == -21
    assert chi_orb_level(loop7_data, level_s) == -14
    assert chi_orb_level_reduced(loop7_data, level1) == -26
    assert chi_orb_level_reduced(loop7_data, level_s) == -16
    assert chi_orb_commuting_pairs(loop7_data) == chi_orb_total(loop7_data) == -35


def test_loop7_chi_fiber(loop7_data):
    f = loop7_data.f
    s = MonomialElement((2, 3, 0, 1), (0,) * 4, 224)
    assert chi_fiber_on_locus(f, fixed_locus([MonomialElement.identity(4, 224)], f.weights)) == -224
    assert chi_fiber_on_locus(f, fixed_locus([s], f.weights)) == -14
    assert chi_fiber_on_locus(f, fixed_locus([MonomialElement.diagonal((112,) * 4, 224)], f.weights)) == 0


def test_loop7_zeta_from_e(loop7_data):
    assert zeta_from_e(e_function_total(loop7_data), 4) == zeta_orb_total(loop7_data, reduced=True)


def test_loop7_consistency(loop7_data):
    assert consistency_failures(loop7_data) == []


def test_conjugation_invariance(loop7_data):
    for cls in loop7_data.classes:
        ref = sector_data(loop7_data, cls)
        for g in cls.members:
            other = sector_data(loop7_data, g)
            assert other.age == ref.age and other.n_g == ref.n_g
            assert sector_invariant_dimensions(other) == sector_invariant_dimensions(ref)
            assert zeta_sector(other) == zeta_sector(ref)
            assert e_sector(other, 4) == e_sector(ref, 4)


# A2 with no symmetries


def test_cubic_with_trivial_group():
    data = build_symmetry_data(*instance("x1^3"))
    (lv,) = data.levels
    assert chi_orb_level(data, lv) == 3
    z = zeta_orb_level(data, lv)
    assert z == ZetaProduct.binomial(3)
    assert z.degree() == 3
    zr = zeta_orb_level(data, lv, reduced=True)
    assert zr == ZetaProduct.binomial(3) / ZetaProduct.binomial(1)
    assert zr.degree() == 2
    (sector,) = _sectors(data)
    assert lefschetz_numbers(sector) == {1: 0, 2: 0, 3: 3}
    E = e_function_total(data)
    assert E == EFunction({(F(1, 6), F(-1, 6)): -1, (F(-1, 6), F(1, 6)): -1}, 1)
    expected = ZetaProduct({(1, F(1, 3)): 1, (1, F(2, 3)): 1})
    assert zeta_from_e(E, 1) == expected == zr


def test_zeta_from_zero_e():
    assert zeta_from_e(EFunction({}, 3), 3).is_one()


@pytest.mark.parametrize("a", range(2, 8))
def test_fermat_lefschetz_against_point_action(a):
    assert fermat_lefschetz_failures(a) == []


# the equivariant character


def test_character_examples():
    cubic = restrict_polynomial(from_string("x1^3"), fixed_locus([MonomialElement.identity(1, 3)], from_string("x1^3").weights))
    assert equivariant_omega_character(cubic, [(0, 1)]) == [0, 1, 1]
    sq = from_string("x1^2")
    quad = restrict_polynomial(sq, fixed_locus([MonomialElement.identity(1, 2)], sq.weights))
    assert equivariant_omega_character(quad, [(F(1, 2), 1)]) == [0, -1]


def test_character_rejects_bad_eigen_data():
    f = from_string("x1^3")
    g = restrict_polynomial(f, fixed_locus([MonomialElement.identity(1, 3)], f.weights))
    # a weight that does not match the grading cannot give a polynomial character
    with pytest.raises(NonPolynomialCharacter):
        equivariant_omega_character(g, [(0, 2)])


def test_character_value_sum_on_loop7_sector(loop7_data):
    one_s = _sectors(loop7_data)[5]
    half = MonomialElement.diagonal((112,) * 4, 224)
    eig = element_eigenvalues_on_locus(half, one_s.locus)
    chi = equivariant_omega_character(one_s.restricted, eig)
    assert sum(chi, Cyclotomic.rational(0)) == 1


@pytest.mark.parametrize("a", LOOP_CASES_UPTO_2)
def test_character_against_monomial_basis(a):
    assert character_oracle_failures(a) == []


def test_character_matches_trace_series_on_loop7_sectors(loop7_data):
    for sec in _sectors(loop7_data):
        if sec.n_g == 0:
            continue
        top = sum(sec.locus.d - w for w in sec.locus.weights)
        for h in sec.image:
            eig = element_eigenvalues_on_locus(h, fixed_locus([MonomialElement.identity(sec.n_g, h.modulus)], sec.locus.induced_weights))
            chi = equivariant_omega_character(sec.restricted, eig)
            series = _trace_series(h, tuple(sec.locus.weights), sec.locus.d)
            assert chi == [combination_mod(series.get(k, {}), h.modulus) for k in range(top + 1)]


# level reports


def test_level_reports_json(loop7_data):
    reps = level_reports(loop7_data)
    assert [r.level.name for r in reps] == ["1", "(1 3)(2 4)"]
    js = reps[1].to_json()
    assert set(js) == {"level", "chi", "chi_reduced", "zeta", "zeta_reduced", "e"}
    assert js["chi"] == -14 and js["chi_reduced"] == -16
    for r in reps:
        assert r.zeta.degree() == r.chi and r.zeta_reduced.degree() == r.chi_reduced


def test_eprime_counts_absolute_values(loop7_data):
    level1 = loop7_data.levels[0]
    plain = e_function_level(loop7_data, level1)
    prime = e_function_level(loop7_data, level1, eprime=True)
    assert all(c > 0 for c in prime.terms.values())
    assert prime.total() >= abs(plain.total())


# consistency on small families


SMALL = [
    ("x1^3", "trivial", []),
    ("x1^2*x2 + x2^3", "full", []),
    ("x1^3 + x2^3", "J", ["(1 2)"]),
    ("x1^2 + x2^2 + x3^2", "full", ["(1 2 3)"]),
    (LOOP3, "full", ["(1 2 3)"]),
    (LOOP3, "trivial", ["(1 2 3)"]),
    ("x1^3*x2 + x2^3*x1", "full", ["(1 2)"]),
    ("x1^4 + x2^4 + x3^4 + x4^4", "J", ["(1 2 3)"]),
]


@pytest.mark.parametrize("poly,G,S", SMALL, ids=[s[0] + "|" + str(s[1]) + "|" + ",".join(s[2]) for s in SMALL])
def test_consistency_on_small_instances(poly, G, S):
    data = build_symmetry_data(*instance(poly, G, S))
    assert consistency_failures(data) == []


@settings(max_examples=25, deadline=None)
@given(st.sampled_from(["x1^2*x2 + x2^4", "x1^3 + x2^4", "x1^2*x2 + x2^2*x1", "x1^2 + x2^3*x3 + x3^3"]), st.data())
def test_consistency_on_random_subgroups(poly, draw):
    f, Gf, S = instance(poly, "full")
    subs = Gf.subgroups()
    G = draw.draw(st.sampled_from(subs))
    assert consistency_failures(build_symmetry_data(f, G, S)) == []
