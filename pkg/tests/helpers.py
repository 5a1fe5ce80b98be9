"""Shared instance lists and the internal consistency checks."""

from fractions import Fraction

from lgorb.arith import Cyclotomic, EFunction, ZetaProduct, combination_mod
from lgorb.invariants import (
    _sectors,
    _trace_series,
    chi_orb_commuting_pairs,
    chi_orb_level,
    chi_orb_level_reduced,
    chi_orb_total,
    chi_orb_total_reduced,
    e_function_level,
    e_function_total,
    equivariant_omega_character,
    lefschetz_numbers,
    sector_invariant_dimensions,
    zeta_from_e,
    zeta_orb_level,
    zeta_orb_total,
    zeta_sector,
)
from lgorb.polynomial import LOOP, block_matrix, from_string, loop_basis, milnor_number, validate_invertible
from lgorb.symmetry import (
    MonomialElement,
    PermutationGroup,
    DiagonalGroup,
    build_symmetry_data,
    element_eigenvalues_on_locus,
    fixed_locus,
    full_symmetry_group,
    induced_action,
    restrict_polynomial,
)

from conftest import DELTA, LOOP7

# (name, polynomial, G spec, S generators, invariants checked)
CONJECTURE_INSTANCES = [
    ("loop7", LOOP7, [DELTA], ["(1 3)(2 4)"], ("chi", "zeta", "e")),
    ("fermat4", "x1^4 + x2^4 + x3^4 + x4^4", "J", ["(1 2 3)"], ("chi", "zeta")),
    ("fermat5", "x1^5 + x2^5 + x3^5 + x4^5 + x5^5", "J", ["(1 2)(3 4)"], ("chi", "zeta")),
]

LOOP3 = "x1^2*x2 + x2^2*x3 + x3^2*x1"

SEVENTH = Fraction(1, 7)


def ratio_power(x, c=1):
    """The term c * (tbar / t)^x."""
    return {(-x, x): c}


def golden_e1():
    coeffs = {-8: 1, -6: 1, -4: 2, -3: 1, -2: 3, -1: 1, 0: 8, 1: 1, 2: 3, 3: 1, 4: 2, 6: 1, 8: 1}
    terms = {}
    for k, c in coeffs.items():
        terms.update(ratio_power(k * SEVENTH, c))
    return EFunction(terms, 4)


def golden_es():
    coeffs = {-4: 2, -2: 2, -1: 2, 0: 4, 1: 2, 2: 2, 4: 2}
    terms = {}
    for k, c in coeffs.items():
        terms.update(ratio_power(k * SEVENTH, c))
    return EFunction(terms, 4)


def consistency_failures(data, commuting_pairs=True):
    """Every internal identity that must hold on a single (f, G x| S)."""
    bad = []
    n = data.n
    chi_sum, zeta_prod, e_sum = 0, None, None
    for lv in data.levels:
        chi = chi_orb_level(data, lv)
        chi_red = chi_orb_level_reduced(data, lv)
        z = zeta_orb_level(data, lv)
        zr = zeta_orb_level(data, lv, reduced=True)
        e = e_function_level(data, lv)
        if z.degree() != chi:
            bad.append(f"deg zeta != chi at level {lv.name}")
        if zr.degree() != chi_red:
            bad.append(f"deg reduced zeta != reduced chi at level {lv.name}")
        if commuting_pairs and chi_orb_commuting_pairs(data, lv) != chi:
            bad.append(f"commuting-pair chi differs at level {lv.name}")
        chi_sum += chi
        zeta_prod = z if zeta_prod is None else zeta_prod * z
        e_sum = e if e_sum is None else e_sum + e
    if chi_sum != chi_orb_total(data) or chi_orb_total_reduced(data) != chi_sum - len(data.classes):
        bad.append("level chi does not sum to total")
    if zeta_prod != zeta_orb_total(data):
        bad.append("level zeta does not multiply to total")
    if e_sum != e_function_total(data):
        bad.append("level E does not sum to total")
    if zeta_from_e(e_function_total(data), n) != zeta_orb_total(data, reduced=True):
        bad.append("zeta from E differs from reduced zeta")
    if data.order == 1:
        (sector,) = _sectors(data)
        if sum(sector_invariant_dimensions(sector).values()) != milnor_number(data.f.weights):
            bad.append("trivial sector dimensions do not sum to mu")
    return bad



# oracles independent of the sector pipeline

LOOP_CASES_UPTO_2 = [(2,), (3,), (5,)] + [(a1, a2) for a1 in range(2, 6) for a2 in range(a1, 6)]


def fermat_lefschetz_failures(a):
    """x^a: the monodromy rotates the a points of the fiber. Count fixed points
    and orbits by hand and compare with the sector route."""
    f = from_string(f"x1^{a}")
    data = build_symmetry_data(f, DiagonalGroup.trivial(1, a), PermutationGroup.trivial(1))
    (sector,) = _sectors(data)
    points = [Fraction(j, a) for j in range(a)]

    def h(p, k):
        return (p + Fraction(k, a)) % 1

    bad = []
    brute = {k: sum(1 for p in points if h(p, k) == p) for k in range(1, a + 1)}
    if lefschetz_numbers(sector) != brute:
        bad.append(f"x^{a}: Lefschetz numbers differ from the point count")
    seen, z = set(), ZetaProduct()
    for p in points:
        if p not in seen:
            orbit = {h(p, k) for k in range(a)}
            seen |= orbit
            z = z * ZetaProduct.binomial(len(orbit))
    if zeta_sector(sector) != z:
        bad.append(f"x^{a}: zeta differs from the orbit product")
    return bad


def character_oracle_failures(a):
    """Every diagonal symmetry of a loop with at most 2 variables (plus the swap
    when the exponents agree): the trace on the basis x^k dx must equal the
    Koszul character and the pipeline's trace series."""
    if len(a) == 1:
        rows = [(a[0] + 1,)]
        basis = [(k,) for k in range(a[0])]
    else:
        rows = block_matrix(LOOP, a)
        basis = loop_basis(a)
    f = validate_invertible(rows)
    ws = f.weights
    G = full_symmetry_group(f)
    N = G.modulus
    L = fixed_locus([MonomialElement.identity(f.n, N)], ws)
    g = restrict_polynomial(f, L)
    top = sum(ws.d - w for w in ws.w)
    elements = [MonomialElement.diagonal(lam, N) for lam in G.sorted_elements]
    if len(a) == 2 and a[0] == a[1]:
        elements.append(MonomialElement((1, 0), (0, 0), N))
    bad = []
    for c in elements:
        direct = [Cyclotomic.rational(0)] * (top + 1)
        for k in basis:
            deg = sum((ki + 1) * w for ki, w in zip(k, ws.w))
            if c.sigma == tuple(range(f.n)):
                direct[deg] = direct[deg] + Cyclotomic.root(-sum(Fraction((ki + 1) * li, N) for ki, li in zip(k, c.lam)))
            elif k == tuple(reversed(k)):
                # the swap sends x^k dx1 dx2 to -x^k dx1 dx2
                direct[deg] = direct[deg] - 1
        if equivariant_omega_character(g, element_eigenvalues_on_locus(c, L)) != direct:
            bad.append(f"loop {a}: character differs at {c}")
        series = _trace_series(induced_action(c, L), tuple(L.weights), L.d)
        if [combination_mod(series.get(k, {}), N) for k in range(top + 1)] != direct:
            bad.append(f"loop {a}: trace series differs at {c}")
    return bad


# criterion number -> PASS/FAIL line, filled by the acceptance tests
ACCEPTANCE_LINES = {}
