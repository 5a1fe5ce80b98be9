"""BHHT dual pairs, the mirror map on monomial forms, and duality checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product

from .arith import EFunction, ZetaProduct, format_rational
from .errors import AssumptionViolated, SupportOutsideFixedLocus
from .invariants import (
    _sectors,
    chi_orb_level,
    chi_orb_level_reduced,
    chi_orb_total_reduced,
    e_function_level,
    e_function_total,
    sector_invariant_dimensions,
    zeta_orb_level,
    zeta_orb_total,
)
from .polynomial import (
    FERMAT,
    LOOP,
    InvertiblePolynomial,
    adjugate,
    block_rows,
    loop_basis,
    milnor_basis_exact,
    restricted_invertible,
    transpose,
    transpose_matrix,
)
from .symmetry import (
    DiagonalGroup,
    PermutationGroup,
    SymmetryData,
    act_perm,
    age,
    build_symmetry_data,
    cycles,
    dual_subgroup,
    format_cycles,
    in_symmetry_group,
)


# ---------------------------------------------------------------------------
# the mirror map


def mirror_map(f: InvertiblePolynomial, lam, k) -> tuple[int, ...]:
    """psi of the form prod_{i in I} x_i^{k_i} dx_i in the sector of lam.

    ``lam`` and the result are integer phase vectors modulo |det E|; ``k``
    is a full-length exponent vector vanishing off I_lam.
    """
    N = abs(f.det)
    I = [i for i in range(f.n) if lam[i] % N == 0]
    for i in range(f.n):
        if i not in I and k[i]:
            raise SupportOutsideFixedLocus(f"exponent on x{i + 1}, which is not fixed by {lam}")
    b = [k[i] + 1 if i in I else 0 for i in range(f.n)]
    adj, dt = adjugate(f.E)
    sign = 1 if dt > 0 else -1
    beta = tuple((sign * sum(b[i] * adj[i][j] for i in range(f.n))) % N for j in range(f.n))
    assert in_symmetry_group(transpose_matrix(f.E), beta, N)
    return beta


def _block_basis(kind, rows, w, d, a):
    if kind == LOOP:
        return loop_basis(a)
    if kind == FERMAT:
        return [(j,) for j in range(a[0] - 1)]
    return milnor_basis_exact(rows, w, d)


@lru_cache(maxsize=None)
def omega_basis(f: InvertiblePolynomial, coords: tuple) -> tuple:
    """Monomial basis of the top-form module of f restricted to C^coords, as full-length exponent vectors."""
    coords = tuple(sorted(coords))
    g = restricted_invertible(f, coords)
    if g is None:
        return ((0,) * f.n,)
    parts = []
    for blk in g.blocks:
        rows, w, _ = block_rows(g, blk)
        parts.append((blk.vars, _block_basis(blk.kind, rows, w, g.weights.d, blk.a)))
    full = []
    for choice in product(*(basis for _, basis in parts)):
        vec = [0] * f.n
        for (vs, _), e in zip(parts, choice):
            for pos, v in zip(vs, e):
                vec[coords[pos]] = v
        full.append(tuple(vec))
    return tuple(full)


def form_is_invariant(k, coords, G: DiagonalGroup) -> bool:
    N = G.modulus
    return all(sum((k[i] + 1) * g[i] for i in coords) % N == 0 for g in G.gens())


# ---------------------------------------------------------------------------
# assumptions of the level-one formula


def check_assumption1(f: InvertiblePolynomial) -> None:
    seen = {}
    for blk in f.blocks:
        if blk.kind == LOOP and len(blk.vars) % 2 == 0:
            if blk.a in seen:
                raise AssumptionViolated(1, f"two even loops of type {blk.a}: variables {seen[blk.a]} and {blk.vars}")
            seen[blk.a] = blk.vars


def check_assumption2(f: InvertiblePolynomial, S: PermutationGroup) -> None:
    """Block-level form: even loops carry no odd-index rotation, other blocks have odd S-orbits."""
    for blk in f.blocks:
        vs = set(blk.vars)
        orbit = {frozenset(s[v] for v in vs) for s in S.elements}
        if blk.kind == LOOP and len(vs) % 2 == 0:
            L = len(vs)
            for s in S.elements:
                if {s[v] for v in vs} == vs:
                    k = _order_on(s, blk.vars)
                    if (L // k) % 2:
                        raise AssumptionViolated(2, f"{format_cycles(s)} rotates the even loop on {blk.vars} with order {k}")
        elif len(orbit) % 2 == 0:
            raise AssumptionViolated(2, f"{blk.kind} block on {blk.vars} has an S-orbit of even size {len(orbit)}")


def _order_on(s, vs) -> int:
    img = {v: s[v] for v in vs}
    k, cur = 1, dict(img)
    while any(cur[v] != v for v in vs):
        cur = {v: img[cur[v]] for v in vs}
        k += 1
    return k


def assumption2_direct(f: InvertiblePolynomial, G: DiagonalGroup, S: PermutationGroup):
    """Witness (lam, sigma) with sigma preserving I_lam and odd on it, or None."""
    N = G.modulus
    for lam in sorted(G.elements):
        I = {i for i in range(f.n) if lam[i] % N == 0}
        for s in sorted(S.elements):
            if {s[i] for i in I} != I:
                continue
            restricted = [c for c in cycles(s) if c[0] in I]
            if sum(len(c) - 1 for c in restricted) % 2:
                return lam, s
    return None


def check_assumptions(f, G, S) -> None:
    check_assumption1(f)
    check_assumption2(f, S)


def assumptions_hold(f, G, S) -> bool:
    try:
        check_assumptions(f, G, S)
    except AssumptionViolated:
        return False
    return True


# ---------------------------------------------------------------------------
# level one via the mirror map


def _orbits(G: DiagonalGroup, S: PermutationGroup) -> list[tuple]:
    seen, out = set(), []
    for g in sorted(G.elements):
        if g in seen:
            continue
        orb = {act_perm(s, g) for s in S.elements}
        seen |= orb
        out.append(tuple(sorted(orb)))
    return out


def _diag_age(lam, N) -> Fraction:
    return Fraction(sum(lam), N)


def e_level1_via_mirror(f: InvertiblePolynomial, G: DiagonalGroup, S: PermutationGroup) -> EFunction:
    check_assumptions(f, G, S)
    n, N = f.n, G.modulus
    Gt = dual_subgroup(G, f)
    dual_orbits = _orbits(Gt, S)
    even_loops = [blk.vars for blk in f.blocks if blk.kind == LOOP and len(blk.vars) % 2 == 0]
    terms: dict = {}
    for orb in _orbits(G, S):
        lam = orb[0]
        I = tuple(i for i in range(n) if lam[i] == 0)
        image = {mirror_map(f, lam, k) for k in omega_basis(f, I)}
        image &= Gt.elements
        A = _diag_age(lam, N) - Fraction(n - len(I), 2)
        for dorb in dual_orbits:
            hit = sorted(image.intersection(dorb))
            if not hit:
                continue
            mu = hit[0]
            r = sum(1 for vs in even_loops if all(lam[i] == 0 and mu[i] == 0 for i in vs))
            n_mu = sum(1 for x in mu if x == 0)
            B = _diag_age(mu, N) - Fraction(n - n_mu, 2)
            key = (A - B, A + B)
            terms[key] = terms.get(key, 0) + (2**r) * (-1) ** len(I)
    return EFunction(terms, n)


# ---------------------------------------------------------------------------
# dual pairs


@dataclass
class DualPair:
    f: InvertiblePolynomial
    G: DiagonalGroup
    S: PermutationGroup
    f_dual: InvertiblePolynomial
    G_dual: DiagonalGroup
    provenance: list = field(default_factory=list)

    @property
    def primal(self):
        return (self.f, self.G, self.S)

    @property
    def dual(self):
        return (self.f_dual, self.G_dual, self.S)

    def primal_data(self) -> SymmetryData:
        if not hasattr(self, "_pd"):
            self._pd = build_symmetry_data(self.f, self.G, self.S)
        return self._pd

    def dual_data(self) -> SymmetryData:
        if not hasattr(self, "_dd"):
            self._dd = build_symmetry_data(self.f_dual, self.G_dual, self.S)
        return self._dd


def bhht_dual(f: InvertiblePolynomial, G: DiagonalGroup, S: PermutationGroup) -> DualPair:
    log = [f"primal: f = {f}, |G| = {G.order}, |S| = {S.order}"]
    primal = build_symmetry_data(f, G, S)
    ft = transpose(f)
    Gt = dual_subgroup(G, f)
    log.append(f"dual: f~ = {ft}, |G~| = {Gt.order}")
    assert G.order * Gt.order == abs(f.det)
    dual = build_symmetry_data(ft, Gt, S)
    log.append("dual side revalidated")
    pair = DualPair(f, G, S, ft, Gt, log)
    pair._pd, pair._dd = primal, dual
    return pair


# ---------------------------------------------------------------------------
# verification


def _zjson(z: ZetaProduct):
    return z.to_json()


@dataclass
class DualityReport:
    n: int
    levels: list
    totals: dict
    bhh: bool
    pair_json: dict

    @property
    def ok(self) -> bool:
        checks = [v["ok"] for lv in self.levels for k, v in lv.items() if isinstance(v, dict) and "ok" in v]
        checks += [v["ok"] for v in self.totals.values()]
        return all(checks)

    def failures(self) -> list[str]:
        out = []
        for lv in self.levels:
            for k, v in lv.items():
                if isinstance(v, dict) and not v.get("ok", True):
                    out.append(f"level {lv['level']}: {k}")
        for k, v in self.totals.items():
            if not v["ok"]:
                out.append(f"total: {k}")
        return out

    def to_json(self) -> dict:
        return {"pair": self.pair_json, "n": self.n, "bhh": self.bhh, "levels": self.levels, "totals": self.totals, "ok": self.ok}


def _level_map(data: SymmetryData):
    return {lv.representative: lv for lv in data.levels}


def verify_duality(pair: DualPair, which=("chi", "zeta", "e"), levels="all") -> DualityReport:
    which = set(which)
    A, B = pair.primal_data(), pair.dual_data()
    n = pair.f.n
    sign = (-1) ** n
    la, lb = _level_map(A), _level_map(B)
    reps = sorted(la)
    if levels != "all":
        wanted = set(levels)
        reps = [r for r in reps if format_cycles(r) in wanted or r in wanted]
    entries = []
    for rep in reps:
        lva, lvb = la[rep], lb[rep]
        entry = {"level": lva.name}
        if "chi" in which:
            lhs, rhs = chi_orb_level_reduced(A, lva), sign * chi_orb_level_reduced(B, lvb)
            entry["chi"] = {
                "lhs": lhs,
                "rhs": rhs,
                "ok": lhs == rhs,
                "lhs_unreduced": chi_orb_level(A, lva),
                "rhs_unreduced": sign * chi_orb_level(B, lvb),
            }
        if "zeta" in which:
            lhs, rhs = zeta_orb_level(A, lva, True), zeta_orb_level(B, lvb, True) ** sign
            entry["zeta"] = {"lhs": _zjson(lhs), "rhs": _zjson(rhs), "ok": lhs == rhs}
        if "e" in which:
            lhs = e_function_level(A, lva)
            rhs = e_function_level(B, lvb).invert_t().scale(sign)
            entry["e"] = {"lhs": lhs.to_json(), "rhs": rhs.to_json(), "ok": lhs == rhs}
        entries.append(entry)
    totals = {}
    if levels == "all":
        if "chi" in which:
            lhs, rhs = chi_orb_total_reduced(A), sign * chi_orb_total_reduced(B)
            totals["chi"] = {"lhs": lhs, "rhs": rhs, "ok": lhs == rhs}
        if "zeta" in which:
            lhs, rhs = zeta_orb_total(A, True), zeta_orb_total(B, True) ** sign
            totals["zeta"] = {"lhs": _zjson(lhs), "rhs": _zjson(rhs), "ok": lhs == rhs}
        if "e" in which:
            lhs, rhs = e_function_total(A), e_function_total(B).invert_t().scale(sign)
            totals["e"] = {"lhs": lhs.to_json(), "rhs": rhs.to_json(), "ok": lhs == rhs}
    pair_json = {
        "polynomial": str(pair.f),
        "dual_polynomial": str(pair.f_dual),
        "G_order": pair.G.order,
        "G_dual_order": pair.G_dual.order,
        "S": [format_cycles(s) for s in pair.S.generators],
    }
    return DualityReport(n, entries, totals, pair.S.is_trivial(), pair_json)


# ---------------------------------------------------------------------------
# exploration data for twisted levels


def correspondence_data(pair: DualPair, level_rep) -> dict:
    """Sector forms with their weights on the primal side against dual classes with theirs.

    Primal weight of a form of normalized degree alpha is alpha + age - n/2;
    the weight of a dual class is age - (n - n_g)/2. Nothing is asserted.
    """
    A, B = pair.primal_data(), pair.dual_data()
    n = pair.f.n
    primal, dual = [], []
    for sec in _sectors(A):
        if sec.level.representative != tuple(level_rep):
            continue
        for alpha, dim in sorted(sector_invariant_dimensions(sec).items()):
            primal.append({"class": repr(sec.rep), "alpha": format_rational(alpha),
                           "weight": format_rational(alpha + sec.age - Fraction(n, 2)), "dim": dim})
    for sec in _sectors(B):
        if sec.level.representative != tuple(level_rep):
            continue
        dual.append({"class": repr(sec.rep), "n_g": sec.n_g,
                     "weight": format_rational(age(sec.rep) - Fraction(n - sec.n_g, 2))})
    return {"level": format_cycles(tuple(level_rep)), "primal": primal, "dual": dual}
