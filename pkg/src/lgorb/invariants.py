"""Orbifold Euler characteristic, monodromy zeta function and E-function.

Every sector [g] is handled through its fixed locus L = Fix(g) and the image
H of the centralizer C(g) in the monomial maps of L. The map C(g) -> H is a
homomorphism, so averaging over C(g) equals averaging over H; this lets
sectors that share a locus and an image group share all work.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .arith import Cyclotomic, EFunction, ZetaProduct, combination_mod, divisors, format_rational, mobius
from .errors import (
    NonIntegralBurnsideAverage,
    NonIntegralLefschetzExponent,
    NonIntegralMolienAverage,
    NonPolynomialCharacter,
)
from .polynomial import QhPolynomial, WeightSystem, milnor_number
from .symmetry import (
    ConjugacyClass,
    FixedLocus,
    Level,
    MonomialElement,
    SymmetryData,
    age,
    cycles,
    induced_action,
    restrict_polynomial,
)


# ---------------------------------------------------------------------------
# the Euler characteristic atom


@lru_cache(maxsize=None)
def _chi_fiber(weights: tuple, d: int) -> int:
    m = len(weights)
    if m == 0:
        return 0
    return 1 + (-1) ** (m - 1) * milnor_number(WeightSystem(weights, d))


def chi_fiber_on_locus(f, L: FixedLocus) -> int:
    """Euler characteristic of {f = 1} inside the linear subspace L."""
    return _chi_fiber(tuple(L.weights), L.d)


def _fixed_weights(h: MonomialElement, weights: tuple) -> tuple:
    """Weights of the coordinates of Fix(h) for a single monomial map."""
    out = []
    for cyc in cycles(h.sigma):
        if sum(h.lam[i] for i in cyc) % h.modulus == 0:
            out.append(weights[cyc[0]])
    return tuple(sorted(out))


def _burnside(values, order: int, what: str) -> int:
    total = sum(values)
    if total % order:
        raise NonIntegralBurnsideAverage(f"{what}: {total}/{order} is not an integer")
    return total // order


# ---------------------------------------------------------------------------
# sectors


@dataclass
class SectorData:
    rep: MonomialElement
    level: Level
    locus: FixedLocus
    n_g: int
    age: Fraction
    restricted: QhPolynomial
    centralizer: tuple
    image: tuple  # distinct induced maps of the centralizer on the locus
    J_locus: MonomialElement

    @property
    def parity(self) -> int:
        return self.n_g % 2


def sector_data(data: SymmetryData, cls: ConjugacyClass | MonomialElement) -> SectorData:
    if isinstance(cls, MonomialElement):
        rep = cls
        owner = data.class_of(rep)
        cent = owner.centralizer if rep == owner.rep else tuple(y for y in data.elements if y * rep == rep * y)
        level = owner.level
    else:
        rep, cent, level = cls.rep, cls.centralizer, cls.level
    L = data.locus([rep])
    image = tuple(sorted({induced_action(c, L) for c in cent}))
    JL = induced_action(data.J, L)
    return SectorData(rep, level, L, L.dim, age(rep), restrict_polynomial(data.f, L), tuple(cent), image, JL)


def _sectors(data: SymmetryData) -> list[SectorData]:
    if "sectors" not in data.cache:
        data.cache["sectors"] = [sector_data(data, c) for c in data.classes]
    return data.cache["sectors"]


@lru_cache(maxsize=None)
def _sector_chi(weights: tuple, d: int, image: tuple) -> int:
    return _burnside((_chi_fiber(_fixed_weights(h, weights), d) for h in image), len(image), "quotient Euler characteristic")


@lru_cache(maxsize=None)
def _sector_exponents(weights: tuple, d: int, image: tuple, JL: MonomialElement) -> tuple:
    """Exponents s_m (m | d) of the unshifted zeta function on Fix(g)/C(g)."""
    lef = {}
    for k in divisors(d):
        Jk = JL.power(k)
        lef[k] = _burnside(
            (_chi_fiber(_fixed_weights(Jk * h, weights), d) for h in image), len(image), f"Lefschetz number L_{k}"
        )
    out = []
    for m in divisors(d):
        acc = sum(mobius(m // k) * lef[k] for k in divisors(m))
        if acc % m:
            raise NonIntegralLefschetzExponent(f"m s_m = {acc} not divisible by m = {m}")
        if acc:
            out.append((m, acc // m))
    return tuple(out)


def lefschetz_numbers(sector: SectorData, upto: int | None = None) -> dict[int, int]:
    """L_k for k = 1..d (or upto)."""
    w, d = sector.locus.weights, sector.locus.d
    out = {}
    for k in range(1, (upto or d) + 1):
        Jk = sector.J_locus.power(k)
        out[k] = _burnside((_chi_fiber(_fixed_weights(Jk * h, w), d) for h in sector.image), len(sector.image), "L_k")
    return out


def chi_sector(sector: SectorData) -> int:
    return _sector_chi(tuple(sector.locus.weights), sector.locus.d, sector.image)


def zeta_sector(sector: SectorData, f=None, reduced: bool = False) -> ZetaProduct:
    if sector.n_g == 0:
        z = ZetaProduct()
    else:
        exps = _sector_exponents(tuple(sector.locus.weights), sector.locus.d, sector.image, sector.J_locus)
        z = ZetaProduct({(m, 0): s for m, s in exps}).twist(sector.age)
    if reduced:
        z = z / ZetaProduct.binomial(1, -sector.age)
    return z


# ---------------------------------------------------------------------------
# equivariant character of the top-form module


def _poly_mul(a: list, b: list) -> list:
    out = [Cyclotomic.rational(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x.is_zero():
            continue
        for j, y in enumerate(b):
            if not y.is_zero():
                out[i + j] = out[i + j] + x * y
    return out


def equivariant_omega_character(fg: QhPolynomial, eig) -> list[Cyclotomic]:
    """Graded trace of a symmetry on the top-form module of fg.

    ``eig`` lists (phase, weight) pairs, one per coordinate eigenvalue.
    Returns coefficients of T(t) in degrees 0..sum(d - w), computed by exact
    division of the Koszul numerator by the denominator.
    """
    eig = [(Fraction(p) % 1, int(w)) for p, w in eig]
    d = fg.weights.d
    one, zero = Cyclotomic.rational(1), Cyclotomic.rational(0)
    num = [one]
    den = [one]
    shift = 0
    lead = one
    for p, w in eig:
        ebar = Cyclotomic.root(-p)
        lead = lead * ebar
        shift += w
        num = _poly_mul(num, [one] + [zero] * (d - w - 1) + [-Cyclotomic.root(p)])
        den = _poly_mul(den, [one] + [zero] * (w - 1) + [-ebar])
    num = [zero] * shift + [lead * c for c in num]
    # exact long division num / den (den has constant term 1)
    num = list(num)
    q = [zero] * max(len(num) - len(den) + 1, 1)
    for i in range(len(q)):
        c = num[i]
        q[i] = c
        if not c.is_zero():
            for j, b in enumerate(den):
                if i + j < len(num):
                    num[i + j] = num[i + j] - c * b
    if any(not c.is_zero() for c in num):
        raise NonPolynomialCharacter("Koszul numerator is not divisible by the denominator")
    top = sum(d - w for _, w in eig)
    while len(q) > top + 1:
        if not q[-1].is_zero():
            raise NonPolynomialCharacter("character has terms beyond the top degree")
        q.pop()
    return q + [zero] * (top + 1 - len(q))


def _trace_series(h: MonomialElement, weights: tuple, d: int) -> dict:
    """Graded trace of h on the top-form module, as {degree: {phase numerator: count}} modulo h.modulus."""
    N = h.modulus
    top = sum(d - w for w in weights)
    series = {0: {0: 1}}
    for cyc in cycles(h.sigma):
        ell = len(cyc)
        r = sum(h.lam[i] for i in cyc) % N
        w = weights[cyc[0]]
        sign = -1 if ell % 2 == 0 else 1
        # (-1)^(l-1) e[-r] t^(wl) (1 - e[r] t^((d-w)l)) / (1 - e[-r] t^(wl))
        fac = defaultdict(lambda: defaultdict(int))
        a, b = w * ell, (d - w) * ell
        j = 0
        while a * (j + 1) <= top:
            deg = a * (j + 1)
            fac[deg][(-r * (j + 1)) % N] += sign
            if deg + b <= top:
                fac[deg + b][(-r * j) % N] -= sign
            j += 1
        new = defaultdict(lambda: defaultdict(int))
        for d1, c1 in series.items():
            for d2, c2 in fac.items():
                if d1 + d2 > top:
                    continue
                slot = new[d1 + d2]
                for p1, n1 in c1.items():
                    for p2, n2 in c2.items():
                        slot[(p1 + p2) % N] += n1 * n2
        series = new
    return series


@lru_cache(maxsize=None)
def _invariant_dims(weights: tuple, d: int, image: tuple) -> tuple:
    if not weights:
        return ((Fraction(0), 1),)
    N = image[0].modulus
    acc = defaultdict(lambda: defaultdict(int))
    for h in image:
        for deg, coeffs in _trace_series(h, weights, d).items():
            slot = acc[deg]
            for p, c in coeffs.items():
                slot[p] += c
    out = []
    for deg in sorted(acc):
        val = combination_mod(acc[deg], N)
        if not val.is_rational():
            raise NonIntegralMolienAverage(f"degree {deg}: average is irrational")
        q = val.rational_value() / len(image)
        if q.denominator != 1 or q < 0:
            raise NonIntegralMolienAverage(f"degree {deg}: average {q} is not a nonnegative integer")
        if q:
            out.append((Fraction(deg, d), int(q)))
    return tuple(out)


def sector_invariant_dimensions(sector: SectorData) -> dict[Fraction, int]:
    return dict(_invariant_dims(tuple(sector.locus.weights), sector.locus.d, sector.image))


def e_sector(sector: SectorData, n: int, eprime: bool = False) -> EFunction:
    m = sector.n_g
    shift = sector.age - Fraction(n, 2)
    sign = 1 if eprime else (-1) ** m
    return EFunction._raw(dict(_e_terms(_invariant_dims(tuple(sector.locus.weights), sector.locus.d, sector.image), m, shift, sign)), n)


@lru_cache(maxsize=None)
def _e_terms(dims: tuple, m: int, shift: Fraction, sign: int) -> tuple:
    terms = defaultdict(int)
    for alpha, dim in dims:
        terms[(m - alpha + shift, alpha + shift)] += sign * dim
    return tuple(terms.items())


# ---------------------------------------------------------------------------
# levels and totals


def _level_sectors(data: SymmetryData, level: Level | None):
    return [s for s in _sectors(data) if level is None or s.level == level]


def chi_orb_level(data: SymmetryData, level: Level) -> int:
    return sum(chi_sector(s) for s in _level_sectors(data, level))


def chi_orb_level_reduced(data: SymmetryData, level: Level) -> int:
    return chi_orb_level(data, level) - len(data.classes_in(level))


def chi_orb_total(data: SymmetryData) -> int:
    return sum(chi_orb_level(data, lv) for lv in data.levels)


def chi_orb_total_reduced(data: SymmetryData) -> int:
    return chi_orb_total(data) - len(data.classes)


def chi_orb_commuting_pairs(data: SymmetryData, level: Level | None = None) -> int:
    """(1/|K|) sum over commuting pairs (g1, g2), g1 in the level, of chi(V^<g1,g2>)."""
    total = 0
    for cls in data.classes:
        if level is not None and cls.level != level:
            continue
        for g1 in cls.members:
            for g2 in data.elements:
                if g1 * g2 == g2 * g1:
                    total += chi_fiber_on_locus(data.f, data.locus([g1, g2]))
    return _burnside([total], data.order, "commuting-pair average")


def zeta_orb_level(data: SymmetryData, level: Level, reduced: bool = False) -> ZetaProduct:
    out = ZetaProduct()
    for s in _level_sectors(data, level):
        out = out * zeta_sector(s, data.f, reduced)
    return out


def zeta_orb_total(data: SymmetryData, reduced: bool = False) -> ZetaProduct:
    out = ZetaProduct()
    for lv in data.levels:
        out = out * zeta_orb_level(data, lv, reduced)
    return out


def e_function_level(data: SymmetryData, level: Level, eprime: bool = False) -> EFunction:
    out = EFunction({}, data.n)
    for s in _level_sectors(data, level):
        out = out + e_sector(s, data.n, eprime)
    return out


def e_function_total(data: SymmetryData, eprime: bool = False) -> EFunction:
    out = EFunction({}, data.n)
    for lv in data.levels:
        out = out + e_function_level(data, lv, eprime)
    return out


def zeta_from_e(E: EFunction, n: int) -> ZetaProduct:
    """prod (1 - (-1)^n e[s] t)^(-a_s) where E(1, tbar) = sum a_s tbar^s."""
    return ZetaProduct({(1, s + Fraction(n, 2)): -a for s, a in E.at_t_one().items()})


# ---------------------------------------------------------------------------
# reports


@dataclass
class LevelReport:
    level: Level
    chi: int
    chi_reduced: int
    zeta: ZetaProduct
    zeta_reduced: ZetaProduct
    e: EFunction

    def to_json(self) -> dict:
        return {
            "level": self.level.name,
            "chi": self.chi,
            "chi_reduced": self.chi_reduced,
            "zeta": self.zeta.to_json(),
            "zeta_reduced": self.zeta_reduced.to_json(),
            "e": self.e.to_json(),
        }


def level_report(data: SymmetryData, level: Level) -> LevelReport:
    return LevelReport(
        level,
        chi_orb_level(data, level),
        chi_orb_level_reduced(data, level),
        zeta_orb_level(data, level),
        zeta_orb_level(data, level, reduced=True),
        e_function_level(data, level),
    )


def level_reports(data: SymmetryData) -> list[LevelReport]:
    return [level_report(data, lv) for lv in data.levels]


def format_efunction(E: EFunction) -> str:
    if not E.terms:
        return "0"
    parts = []
    for (u, v), c in sorted(E.terms.items(), key=lambda kv: (kv[0][1] - kv[0][0], kv[0])):
        mono = f"t^{format_rational(u)} tb^{format_rational(v)}"
        parts.append(f"{c}*{mono}")
    return " + ".join(parts)
