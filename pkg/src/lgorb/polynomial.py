"""Quasihomogeneous and invertible polynomials.

An invertible polynomial is stored through its exponent matrix ``E`` (row i
holds the exponents of monomial i) together with its decomposition into
Fermat, chain and loop blocks. Restrictions to fixed loci are general
:class:`QhPolynomial` objects with cyclotomic coefficients.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property, lru_cache
from itertools import permutations
from math import gcd

from .arith import Cyclotomic, lcm
from .errors import (
    DegenerateType,
    NonIntegerMilnorNumber,
    NonPositiveWeights,
    NotAtomicShape,
    NotSquare,
    ParseError,
    SingularMatrix,
    ValidationError,
)

FERMAT, CHAIN, LOOP = "Fermat", "Chain", "Loop"

# ---------------------------------------------------------------------------
# parsing

_NAME = re.compile(r"^[A-Za-z_][A-Za-z_0-9]*$")


def _natural_key(name: str):
    return [int(p) if p.isdigit() else p for p in re.split(r"(\d+)", name)]


def parse_polynomial(expr: str, variables: list[str] | None = None) -> tuple[list[str], list[tuple[int, ...]]]:
    """Parse ``"x1^3*x2 + x2^5"`` into variable names and exponent rows.

    Coefficients are not admitted. Without an explicit variable list the
    names are ordered naturally (x2 before x10).
    """
    if not expr or not expr.strip():
        raise ParseError("empty polynomial")
    terms = []
    for raw_term in expr.split("+"):
        raw_term = raw_term.strip()
        if not raw_term:
            raise ParseError(f"empty term in {expr!r}")
        powers: dict[str, int] = {}
        for factor in raw_term.split("*"):
            factor = "".join(factor.split())
            if "^" in factor:
                name, _, exp = factor.partition("^")
                if not exp.isdigit() or int(exp) < 1:
                    raise ParseError(f"bad exponent in {factor!r}")
                k = int(exp)
            else:
                name, k = factor, 1
            if not _NAME.match(name):
                raise ParseError(f"bad factor {factor!r}")
            powers[name] = powers.get(name, 0) + k
        terms.append(powers)
    names = sorted({v for t in terms for v in t}, key=_natural_key)
    if variables is not None:
        unknown = set(names) - set(variables)
        if unknown:
            raise ParseError(f"undeclared variables {sorted(unknown)}")
        names = list(variables)
    rows = [tuple(t.get(v, 0) for v in names) for t in terms]
    return names, rows


# ---------------------------------------------------------------------------
# exact linear algebra


def det(matrix) -> Fraction:
    a = [[Fraction(x) for x in row] for row in matrix]
    n = len(a)
    out = Fraction(1)
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            out = -out
        out *= a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] / a[c][c]
            if f:
                for k in range(c, n):
                    a[r][k] -= f * a[c][k]
    return out


def inverse(matrix) -> list[list[Fraction]]:
    n = len(matrix)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    for c in range(n):
        p = next((r for r in range(c, n) if a[r][c] != 0), None)
        if p is None:
            raise SingularMatrix("matrix is singular")
        a[c], a[p] = a[p], a[c]
        piv = a[c][c]
        a[c] = [x / piv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def adjugate(matrix) -> tuple[tuple[tuple[int, ...], ...], int]:
    """Integer adjugate and determinant: E^{-1} = adj / det."""
    return _adjugate(tuple(tuple(int(x) for x in row) for row in matrix))


@lru_cache(maxsize=4096)
def _adjugate(matrix):
    dt = det(matrix)
    inv = inverse(matrix)
    adj = tuple(tuple(int(x * dt) for x in row) for row in inv)
    return adj, int(dt)


def transpose_matrix(matrix):
    return tuple(zip(*matrix)) if matrix else ()


# ---------------------------------------------------------------------------
# data types


@dataclass(frozen=True)
class WeightSystem:
    w: tuple[int, ...]
    d: int

    @property
    def q(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.d) for x in self.w)


@dataclass(frozen=True, eq=False)
class Monomial:
    exponents: tuple[int, ...]
    coefficient: Cyclotomic

    def __post_init__(self):
        if self.coefficient.is_zero():
            raise ValueError("zero coefficient")

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.exponents == other.exponents and self.coefficient == other.coefficient


@dataclass(frozen=True, eq=False)
class QhPolynomial:
    m: int
    monomials: tuple[Monomial, ...]
    weights: WeightSystem

    def __post_init__(self):
        exps = [mono.exponents for mono in self.monomials]
        if len(set(exps)) != len(exps):
            raise ValueError("repeated exponent vector")
        for e in exps:
            if len(e) != self.m:
                raise ValueError("exponent vector of wrong length")
            if sum(k * w for k, w in zip(e, self.weights.w)) != self.weights.d:
                raise ValueError(f"monomial {e} is not quasihomogeneous for {self.weights}")

    def is_zero(self) -> bool:
        return not self.monomials

    def as_dict(self) -> dict:
        return {mono.exponents: mono.coefficient for mono in self.monomials}

    def __eq__(self, other):
        if not isinstance(other, QhPolynomial) or self.m != other.m:
            return False
        a, b = self.as_dict(), other.as_dict()
        return a.keys() == b.keys() and all(a[k] == b[k] for k in a)


@dataclass(frozen=True)
class AtomicBlock:
    kind: str
    vars: tuple[int, ...]
    a: tuple[int, ...]

    @property
    def type(self) -> tuple[int, ...]:
        return self.a


@dataclass(frozen=True)
class InvertiblePolynomial:
    E: tuple[tuple[int, ...], ...]
    blocks: tuple[AtomicBlock, ...]
    weights: WeightSystem
    names: tuple[str, ...] = field(default=())

    @property
    def n(self) -> int:
        return len(self.E)

    @cached_property
    def det(self) -> int:
        return int(det(self.E))

    @property
    def base(self) -> QhPolynomial:
        one = Cyclotomic.rational(1)
        return QhPolynomial(self.n, tuple(Monomial(tuple(r), one) for r in self.E), self.weights)

    @property
    def variable_names(self) -> tuple[str, ...]:
        return self.names or tuple(f"x{i + 1}" for i in range(self.n))

    def monomial_set(self) -> frozenset:
        return frozenset(self.E)

    def to_string(self) -> str:
        names = self.variable_names
        terms = []
        for row in self.E:
            factors = [names[j] if k == 1 else f"{names[j]}^{k}" for j, k in enumerate(row) if k]
            terms.append("*".join(factors))
        return " + ".join(terms)

    def __str__(self):
        return self.to_string()


# ---------------------------------------------------------------------------
# atomic decomposition


def _head_options(row):
    support = [j for j, k in enumerate(row) if k]
    if len(support) == 1:
        (j,) = support
        return [(j, None)]
    if len(support) == 2:
        j, k = support
        opts = []
        if row[k] == 1:
            opts.append((j, k))
        if row[j] == 1:
            opts.append((k, j))
        return opts
    return []


def _matchings(rows):
    """Yield (head, pointer) assignments: monomial i = x_head^a * x_pointer."""
    n = len(rows)
    options = [_head_options(r) for r in rows]
    if any(not o for o in options):
        return
    heads, used, targets = [None] * n, set(), set()

    def rec(i):
        if i == n:
            yield list(heads)
            return
        for h, p in options[i]:
            if h in used or (p is not None and p in targets):
                continue
            used.add(h)
            if p is not None:
                targets.add(p)
            heads[i] = (h, p)
            yield from rec(i + 1)
            used.discard(h)
            if p is not None:
                targets.discard(p)

    yield from rec(0)


def _min_rotation(seq):
    rots = [tuple(seq[i:]) + tuple(seq[:i]) for i in range(len(seq))]
    best = min(rots)
    return best, rots.index(best)


def _blocks_from_matching(rows, matching) -> list[AtomicBlock]:
    exp_of = {}
    nxt = {}
    for i, (h, p) in enumerate(matching):
        exp_of[h] = rows[i][h]
        nxt[h] = p
    has_pred = {p for p in nxt.values() if p is not None}
    blocks, seen = [], set()
    # chains start at variables without predecessor
    for start in sorted(exp_of):
        if start in has_pred:
            continue
        path, v = [], start
        while v is not None:
            path.append(v)
            v = nxt[v]
        seen.update(path)
        a = tuple(exp_of[v] for v in path)
        kind = FERMAT if len(path) == 1 else CHAIN
        blocks.append(AtomicBlock(kind, tuple(path), a))
    for start in sorted(exp_of):
        if start in seen:
            continue
        cycle, v = [], start
        while v not in seen:
            seen.add(v)
            cycle.append(v)
            v = nxt[v]
        a = [exp_of[v] for v in cycle]
        canon, shift = _min_rotation(a)
        cyc = cycle[shift:] + cycle[:shift]
        blocks.append(AtomicBlock(LOOP, tuple(cyc), canon))
    return blocks


def _degeneracy(block: AtomicBlock) -> str | None:
    if block.kind in (FERMAT, CHAIN) and block.a[-1] < 2:
        return f"{block.kind} block {block.vars} is regular at the origin (last exponent 1)"
    if block.kind == LOOP and len(block.a) % 2 == 0:
        if all(x == 1 for x in block.a[0::2]) or all(x == 1 for x in block.a[1::2]):
            return f"even loop {block.a} has all odd- or all even-position exponents equal to 1"
    return None


def weights(E) -> WeightSystem:
    """Weight system (w; d) with E q = 1, q = w/d."""
    inv = inverse(E)
    q = [sum(row) for row in inv]
    if any(not (0 < x < 1) for x in q):
        raise NonPositiveWeights(f"weights {[str(x) for x in q]} not in (0, 1)")
    d = lcm(*(x.denominator for x in q))
    w = tuple(int(x * d) for x in q)
    g = d
    for x in w:
        g = gcd(g, x)
    assert g == 1
    return WeightSystem(w, d)


def validate_invertible(rows, names=None) -> InvertiblePolynomial:
    rows = [tuple(int(k) for k in r) for r in rows]
    n = len(rows[0]) if rows else 0
    if any(len(r) != n for r in rows):
        raise NotSquare("exponent vectors of unequal length")
    if len(rows) != n or len(set(rows)) != len(rows):
        raise NotSquare(f"{len(set(rows))} distinct monomials in {n} variables")
    if n == 0:
        raise NotSquare("no variables")
    if det(rows) == 0:
        raise SingularMatrix("exponent matrix is singular")
    degenerate = None
    blocks = None
    for matching in _matchings(rows):
        cand = _blocks_from_matching(rows, matching)
        reasons = [r for r in map(_degeneracy, cand) if r]
        if reasons:
            degenerate = degenerate or reasons[0]
            continue
        blocks = cand
        break
    if blocks is None:
        if degenerate:
            raise DegenerateType(degenerate)
        raise NotAtomicShape("no Fermat/chain/loop decomposition exists")
    ws = weights(rows)
    blocks.sort(key=lambda b: b.vars[0])
    return InvertiblePolynomial(tuple(rows), tuple(blocks), ws, tuple(names) if names else ())


def from_string(expr: str, variables=None) -> InvertiblePolynomial:
    names, rows = parse_polynomial(expr, variables)
    return validate_invertible(rows, names)


def milnor_number(ws: WeightSystem) -> int:
    mu = Fraction(1)
    for w in ws.w:
        mu *= Fraction(ws.d - w, w)
    if mu.denominator != 1:
        raise NonIntegerMilnorNumber(f"Milnor-Orlik product {mu} for {ws}")
    return int(mu)


# ---------------------------------------------------------------------------
# transpose and isomorphism


def transpose(f: InvertiblePolynomial) -> InvertiblePolynomial:
    return validate_invertible(transpose_matrix(f.E), f.names or None)


def _block_signature(b: AtomicBlock):
    return (b.kind, b.a)


def polynomial_isomorphic(f: InvertiblePolynomial, g: InvertiblePolynomial) -> dict[int, int] | None:
    """Variable relabeling pi (f's index -> g's index) with g = f after renaming, or None."""
    if f.n != g.n:
        return None
    pool = list(g.blocks)
    mapping = {}
    for b in f.blocks:
        match = None
        for cand in pool:
            if _block_signature(cand) != _block_signature(b):
                continue
            match = cand
            break
        if match is None:
            return None
        pool.remove(match)
        for u, v in zip(b.vars, match.vars):
            mapping[u] = v
    # loops of periodic type may match under several rotations; verify directly
    renamed = set()
    for row in f.E:
        new = [0] * f.n
        for j, k in enumerate(row):
            new[mapping[j]] = k
        renamed.add(tuple(new))
    if renamed != g.monomial_set():
        return None
    return mapping


def same_up_to_relabeling_bruteforce(f: InvertiblePolynomial, g: InvertiblePolynomial) -> bool:
    target = g.monomial_set()
    for perm in permutations(range(f.n)):
        if {tuple(row[perm[j]] for j in range(f.n)) for row in f.E} == target:
            return True
    return False


# ---------------------------------------------------------------------------
# Milnor algebra bases


def _monomials_of_degree(w, deg):
    out = []

    def rec(i, rest, acc):
        if i == len(w):
            if rest == 0:
                out.append(tuple(acc))
            return
        for k in range(rest // w[i] + 1):
            acc.append(k)
            rec(i + 1, rest - k * w[i], acc)
            acc.pop()

    rec(0, deg, [])
    return out


def _partials(rows, coeffs):
    """Partial derivatives as dicts exponent -> coefficient."""
    m = len(rows[0]) if rows else 0
    out = []
    for j in range(m):
        p = {}
        for r, c in zip(rows, coeffs):
            if r[j]:
                e = list(r)
                e[j] -= 1
                p[tuple(e)] = p.get(tuple(e), 0) + c * r[j]
        out.append(p)
    return out


def milnor_basis_exact(rows, w, d, coeffs=None) -> list[tuple[int, ...]]:
    """Monomial basis of the Milnor algebra C[x]/(df) by row reduction per weighted degree.

    ``rows`` are exponent vectors of a quasihomogeneous polynomial with an
    isolated critical point (coefficients default to 1).
    """
    m = len(w)
    if m == 0:
        return [()]
    coeffs = coeffs or [1] * len(rows)
    parts = _partials(rows, [Fraction(c) for c in coeffs])
    top = sum(d - 2 * x for x in w)
    basis = []
    for deg in range(top + 1):
        cols = sorted(_monomials_of_degree(w, deg), reverse=True)
        if not cols:
            continue
        index = {c: i for i, c in enumerate(cols)}
        matrix = []
        for j, p in enumerate(parts):
            sdeg = deg - (d - w[j])
            if sdeg < 0:
                continue
            for s in _monomials_of_degree(w, sdeg):
                row = [Fraction(0)] * len(cols)
                for e, c in p.items():
                    row[index[tuple(x + y for x, y in zip(e, s))]] += c
                matrix.append(row)
        pivots = _rref_pivots(matrix, len(cols))
        basis.extend(c for i, c in enumerate(cols) if i not in pivots)
    return basis


def _rref_pivots(matrix, ncols) -> set[int]:
    a = [list(r) for r in matrix]
    pivots, r = set(), 0
    for c in range(ncols):
        p = next((i for i in range(r, len(a)) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        for i in range(len(a)):
            if i != r and a[i][c] != 0:
                f = a[i][c] / a[r][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.add(c)
        r += 1
        if r == len(a):
            break
    return pivots


def loop_basis(a) -> list[tuple[int, ...]]:
    """Closed-form Milnor basis of a loop: 0 <= k_i <= a_i - 1."""
    out = [()]
    for x in a:
        out = [e + (k,) for e in out for k in range(x)]
    return out


def block_rows(f: InvertiblePolynomial, block: AtomicBlock):
    """Exponent rows of a block restricted to its own variables (in block order)."""
    idx = {v: i for i, v in enumerate(block.vars)}
    rows = []
    for row in f.E:
        if any(row[v] for v in block.vars):
            rows.append(tuple(row[v] for v in block.vars))
    assert len(rows) == len(block.vars)
    w = tuple(f.weights.w[v] for v in block.vars)
    return rows, w, idx


def restricted_invertible(f: InvertiblePolynomial, coords) -> InvertiblePolynomial | None:
    """Restriction of f to the coordinate subspace spanned by ``coords`` (sorted).

    Returns None for the zero-variable case. Raises ValidationError if the
    restriction is not invertible (it always is for fixed loci of diagonal
    symmetries).
    """
    coords = sorted(coords)
    if not coords:
        return None
    cs = set(coords)
    rows = [tuple(row[j] for j in coords) for row in f.E if all(row[j] == 0 or j in cs for j in range(f.n))]
    g = validate_invertible(rows)
    return g


# ---------------------------------------------------------------------------
# enumeration of small invertible polynomials


def block_matrix(kind: str, a) -> list[tuple[int, ...]]:
    """Rows of a single block on its own k variables (chain x1^a1 x2 + ... + xk^ak)."""
    k = len(a)
    rows = []
    for i, x in enumerate(a):
        row = [0] * k
        row[i] = x
        if kind == LOOP or (kind == CHAIN and i < k - 1):
            row[(i + 1) % k] += 1
        rows.append(tuple(row))
    return rows


def direct_sum(blocks) -> list[tuple[int, ...]]:
    n = sum(len(b) for b in blocks)
    out, off = [], 0
    for rows in blocks:
        k = len(rows)
        for r in rows:
            out.append(tuple([0] * off + list(r) + [0] * (n - off - k)))
        off += k
    return out


def _block_candidates(max_vars: int, max_exponent: int):
    from itertools import product

    out = []
    for x in range(2, max_exponent + 1):
        out.append((FERMAT, (x,)))
    for k in range(2, max_vars + 1):
        for a in product(range(1, max_exponent + 1), repeat=k):
            out.append((CHAIN, a))
            if _min_rotation(a)[0] == a:
                out.append((LOOP, a))
    return out


def enumerate_invertible(max_vars: int, max_exponent: int, max_det: int | None = None, dual_closed: bool = True):
    """All invertible polynomials that are sums of Fermat/chain/loop blocks within the bounds, up to block reordering.

    With ``dual_closed`` only polynomials whose transpose is again
    non-degenerate are kept (a chain starting with exponent 1 is not).
    """
    cands = []
    for kind, a in _block_candidates(max_vars, max_exponent):
        try:
            g = validate_invertible(block_matrix(kind, a))
        except ValidationError:
            continue
        if len(g.blocks) != 1 or g.blocks[0].kind != kind:
            continue
        cands.append((kind, a))
    cands.sort(key=lambda c: (len(c[1]), c))
    seen = set()
    out = []

    def rec(start, used, chosen):
        if chosen:
            rows = direct_sum([block_matrix(k, a) for k, a in chosen])
            key = tuple(sorted(chosen))
            if key not in seen:
                seen.add(key)
                if max_det is None or abs(int(det(rows))) <= max_det:
                    f = validate_invertible(rows)
                    if dual_closed:
                        try:
                            transpose(f)
                        except ValidationError:
                            f = None
                    if f is not None:
                        out.append(f)
        for i in range(start, len(cands)):
            k, a = cands[i]
            if used + len(a) <= max_vars:
                rec(i, used + len(a), chosen + [cands[i]])

    rec(0, 0, [])
    out.sort(key=lambda f: (f.n, abs(f.det), f.E))
    return out
