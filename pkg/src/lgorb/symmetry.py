"""Symmetry groups of invertible polynomials and their fixed loci.

Diagonal elements are integer vectors modulo a common ``modulus`` N (the
phase of coordinate i is ``lam[i] / N``); for an invertible polynomial N is
``|det E|``, which clears every denominator occurring in G_f. Permutations are
0-based image tuples: ``sigma[i]`` is the image of i.

Conventions for the semidirect product G x| S:

    (lam, sigma) (mu, tau) = (lam + sigma.mu, sigma tau),  (sigma.mu)_i = mu_{sigma^-1(i)}
    ((lam, sigma) x)_i = e[lam_i] x_{sigma^-1(i)}
"""

from __future__ import annotations

import os
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from fractions import Fraction
from typing import Callable, Iterable, Sequence

from .arith import Cyclotomic
from .errors import (
    DoesNotNormalize,
    DoesNotPreserveLocus,
    GroupTooLarge,
    IncompatibleLengths,
    NotASymmetry,
    ParseError,
    UnexpectedZeroRestriction,
)
from .polynomial import (
    InvertiblePolynomial,
    Monomial,
    QhPolynomial,
    WeightSystem,
    adjugate,
    transpose_matrix,
)

DEFAULT_GROUP_CAP = 10**6


def group_cap() -> int:
    return int(os.environ.get("LGORB_GROUP_CAP", DEFAULT_GROUP_CAP))


# ---------------------------------------------------------------------------
# permutations

Perm = tuple


def identity_perm(n: int) -> Perm:
    return tuple(range(n))


def compose(s: Perm, t: Perm) -> Perm:
    """s after t."""
    return tuple(s[i] for i in t)


def perm_inverse(s: Perm) -> Perm:
    out = [0] * len(s)
    for i, j in enumerate(s):
        out[j] = i
    return tuple(out)


def cycles(s: Perm) -> list[tuple[int, ...]]:
    seen, out = set(), []
    for i in range(len(s)):
        if i in seen:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(j)
            j = s[j]
        out.append(tuple(cyc))
    return out


def parity(s: Perm) -> int:
    return sum(len(c) - 1 for c in cycles(s)) % 2


def act_perm(s: Perm, vec: Sequence) -> tuple:
    """(s . v)_i = v_{s^-1(i)}."""
    out = [None] * len(vec)
    for i, x in enumerate(vec):
        out[s[i]] = x
    return tuple(out)


def format_cycles(s: Perm) -> str:
    parts = [c for c in cycles(s) if len(c) > 1]
    if not parts:
        return "1"
    return "".join("(" + " ".join(str(i + 1) for i in c) + ")" for c in parts)


def parse_cycles(text: str, n: int) -> Perm:
    """Parse cycle notation '(1 3)(2 4)' (1-based); '1', '()' or '' is the identity."""
    text = text.strip()
    img = list(range(n))
    if text in ("", "1", "()", "id"):
        return tuple(img)
    if not re.fullmatch(r"(\([\d\s,]*\)\s*)+", text):
        raise ParseError(f"bad cycle notation {text!r}")
    for body in re.findall(r"\(([^)]*)\)", text):
        if re.search(r"[\s,]", body.strip()):
            pts = [int(x) for x in re.split(r"[\s,]+", body.strip()) if x]
        else:
            pts = [int(ch) for ch in body.strip()]
        if len(set(pts)) != len(pts) or any(not 1 <= p <= n for p in pts):
            raise ParseError(f"bad cycle ({body}) for n = {n}")
        cyc_img = list(range(n))
        for a, b in zip(pts, pts[1:] + pts[:1]):
            cyc_img[a - 1] = b - 1
        img = list(compose(tuple(img), tuple(cyc_img)))
    return tuple(img)


# ---------------------------------------------------------------------------
# monomial elements


@dataclass(frozen=True, order=True)
class MonomialElement:
    sigma: Perm
    lam: tuple[int, ...]
    modulus: int

    @classmethod
    def diagonal(cls, lam, modulus) -> "MonomialElement":
        lam = tuple(x % modulus for x in lam)
        return cls(identity_perm(len(lam)), lam, modulus)

    @classmethod
    def permutation(cls, sigma, modulus) -> "MonomialElement":
        return cls(tuple(sigma), (0,) * len(sigma), modulus)

    @classmethod
    def identity(cls, n, modulus) -> "MonomialElement":
        return cls(identity_perm(n), (0,) * n, modulus)

    @property
    def n(self) -> int:
        return len(self.lam)

    @property
    def phases(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(x, self.modulus) for x in self.lam)

    def __mul__(self, other: "MonomialElement") -> "MonomialElement":
        N = self.modulus
        moved = act_perm(self.sigma, other.lam)
        return MonomialElement(
            compose(self.sigma, other.sigma), tuple((a + b) % N for a, b in zip(self.lam, moved)), N
        )

    def inverse(self) -> "MonomialElement":
        inv = perm_inverse(self.sigma)
        return MonomialElement(inv, tuple((-x) % self.modulus for x in act_perm(inv, self.lam)), self.modulus)

    def conjugate_by(self, y: "MonomialElement") -> "MonomialElement":
        return y * self * y.inverse()

    def is_identity(self) -> bool:
        return self.sigma == identity_perm(self.n) and not any(self.lam)

    def is_diagonal(self) -> bool:
        return self.sigma == identity_perm(self.n)

    def act(self, x: Sequence):
        """Apply to a point whose coordinates support multiplication by complex numbers."""
        import cmath

        return tuple(cmath.exp(2j * cmath.pi * self.lam[i] / self.modulus) * x[perm_inverse(self.sigma)[i]] for i in range(self.n))

    def power(self, k: int) -> "MonomialElement":
        out = MonomialElement.identity(self.n, self.modulus)
        base = self if k >= 0 else self.inverse()
        for _ in range(abs(k)):
            out = out * base
        return out

    def to_json(self) -> dict:
        from .arith import format_rational

        return {"diag": [format_rational(p) for p in self.phases], "perm": format_cycles(self.sigma)}

    def __repr__(self):
        ph = ",".join(str(p) for p in self.phases)
        return f"({ph}; {format_cycles(self.sigma)})"


def age(g: MonomialElement) -> Fraction:
    """Sum of the fractional eigenvalue exponents of g acting on C^n."""
    out = Fraction(0)
    for cyc in cycles(g.sigma):
        r = Fraction(sum(g.lam[i] for i in cyc) % g.modulus, g.modulus)
        out += r + Fraction(len(cyc) - 1, 2)
    return out


def eigenvalue_phases(g: MonomialElement) -> list[Fraction]:
    out = []
    for cyc in cycles(g.sigma):
        r = Fraction(sum(g.lam[i] for i in cyc) % g.modulus, g.modulus)
        out.extend((r + k) / len(cyc) for k in range(len(cyc)))
    return out


# ---------------------------------------------------------------------------
# generic finite-group helpers


def generate(gens: Iterable, mul: Callable, identity, cap: int | None = None) -> frozenset:
    gens = list(gens)
    cap = cap or group_cap()
    seen = {identity}
    queue = deque([identity])
    while queue:
        x = queue.popleft()
        for g in gens:
            y = mul(x, g)
            if y not in seen:
                seen.add(y)
                if len(seen) > cap:
                    raise GroupTooLarge(f"group exceeds enumeration cap {cap}")
                queue.append(y)
    return frozenset(seen)


def all_subgroups(elements: Iterable, mul: Callable, identity) -> list[tuple[frozenset, tuple]]:
    """Every subgroup as (element set, generators), via joins of cyclic subgroups."""
    cyclic = {}
    for g in sorted(elements):
        H = generate([g], mul, identity)
        cyclic.setdefault(H, (g,))
    found = dict(cyclic)
    frontier = list(cyclic.items())
    while frontier:
        nxt = []
        for H, gens in frontier:
            for C, (c,) in cyclic.items():
                if c in H:
                    continue
                K = generate(gens + (c,), mul, identity)
                if K not in found:
                    found[K] = gens + (c,)
                    nxt.append((K, gens + (c,)))
        frontier = nxt
    return sorted(found.items(), key=lambda kv: (len(kv[0]), sorted(kv[0])))


# ---------------------------------------------------------------------------
# diagonal groups


def _vadd(N):
    def mul(a, b):
        return tuple((x + y) % N for x, y in zip(a, b))

    return mul


@dataclass(frozen=True)
class DiagonalGroup:
    n: int
    modulus: int
    elements: frozenset
    generators: tuple = ()

    @classmethod
    def generated(cls, gens, n: int, modulus: int, cap: int | None = None) -> "DiagonalGroup":
        gens = tuple(tuple(x % modulus for x in g) for g in gens)
        elems = generate(gens, _vadd(modulus), (0,) * n, cap)
        return cls(n, modulus, elems, gens)

    @classmethod
    def trivial(cls, n: int, modulus: int) -> "DiagonalGroup":
        return cls(n, modulus, frozenset({(0,) * n}), ())

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def sorted_elements(self) -> tuple:
        return tuple(sorted(self.elements))

    def __contains__(self, lam) -> bool:
        return tuple(x % self.modulus for x in lam) in self.elements

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def gens(self) -> tuple:
        """A generating set (the stored one, or all elements as fallback)."""
        if self.generators:
            return self.generators
        return tuple(sorted(self.elements))

    def structure(self) -> tuple[int, ...]:
        """Invariant factors (cyclic factor orders > 1) via Smith normal form."""
        from sympy import ZZ
        from sympy.polys.matrices import DM
        from sympy.polys.matrices.normalforms import invariant_factors

        N = self.modulus
        gens = self.gens()
        if not gens:
            return ()
        # relations lattice: the kernel of Z^k -> G; use presentation G = L / N Z^n with L spanned by gens
        rows = [list(g) for g in gens] + [[N if i == j else 0 for j in range(self.n)] for i in range(self.n)]
        # G ~ L / (N Z^n) where L = row span; invariant factors of L relative to N Z^n
        inv_l = [int(x) for x in invariant_factors(DM(rows, ZZ))]
        facs = [N // x for x in inv_l if N // x > 1]
        facs.sort()
        return tuple(facs)

    def subgroups(self) -> list["DiagonalGroup"]:
        out = []
        for elems, gens in all_subgroups(self.elements, _vadd(self.modulus), (0,) * self.n):
            out.append(DiagonalGroup(self.n, self.modulus, elems, gens))
        return out

    def with_modulus(self, modulus: int) -> "DiagonalGroup":
        if modulus % self.modulus:
            raise ValueError("new modulus must be a multiple")
        k = modulus // self.modulus
        conv = lambda v: tuple(x * k for x in v)  # noqa: E731
        return DiagonalGroup(self.n, modulus, frozenset(map(conv, self.elements)), tuple(map(conv, self.generators)))


def full_symmetry_group(f: InvertiblePolynomial, cap: int | None = None) -> DiagonalGroup:
    """G_f, generated by the columns of E^{-1} (mod 1)."""
    adj, dt = adjugate(f.E)
    N = abs(dt)
    cap = cap or group_cap()
    if N > cap:
        raise GroupTooLarge(f"|det E| = {N} exceeds enumeration cap {cap}")
    sign = 1 if dt > 0 else -1
    gens = [tuple((adj[i][j] * sign) % N for i in range(f.n)) for j in range(f.n)]
    G = DiagonalGroup.generated(gens, f.n, N, cap)
    assert G.order == N, (G.order, N)
    return G


def in_symmetry_group(E, lam, modulus) -> bool:
    return all(sum(e * x for e, x in zip(row, lam)) % modulus == 0 for row in E)


def grading_element(f: InvertiblePolynomial) -> tuple[int, ...]:
    N = abs(f.det)
    w, d = f.weights.w, f.weights.d
    J = tuple(x * N // d for x in w)
    assert all((x * N) % d == 0 for x in w)
    assert in_symmetry_group(f.E, J, N)
    return J


def pairing(E, dual_lam, lam, modulus) -> Fraction:
    """Character value exponent <dual, lam> = dual^T E lam (mod 1)."""
    n = len(E)
    s = 0
    for i in range(n):
        if dual_lam[i]:
            s += dual_lam[i] * sum(E[i][j] * lam[j] for j in range(n))
    return Fraction(s, modulus * modulus) % 1


def dual_subgroup(G: DiagonalGroup, f: InvertiblePolynomial, full_dual: DiagonalGroup | None = None) -> DiagonalGroup:
    """Annihilator of G inside G_{f~}."""
    Gt = full_dual or full_symmetry_group_of_matrix(transpose_matrix(f.E))
    N = G.modulus
    assert Gt.modulus == N
    gens = G.gens()
    elems = frozenset(x for x in Gt.elements if all(pairing(f.E, x, g, N) == 0 for g in gens))
    out = DiagonalGroup(f.n, N, elems, ())
    return DiagonalGroup(f.n, N, elems, minimal_generators(out))


@lru_cache(maxsize=1024)
def full_symmetry_group_of_matrix(E) -> DiagonalGroup:
    from .polynomial import validate_invertible

    return full_symmetry_group(validate_invertible(E))


def minimal_generators(G: DiagonalGroup) -> tuple:
    """Greedy small generating set (deterministic)."""
    mul = _vadd(G.modulus)
    ident = (0,) * G.n
    gens: list = []
    cur = frozenset({ident})
    # prefer elements of large order
    order = {}
    for g in G.elements:
        order[g] = len(generate([g], mul, ident))
    for g in sorted(G.elements, key=lambda g: (-order[g], g)):
        if g in cur:
            continue
        gens.append(g)
        cur = generate(gens, mul, ident)
        if len(cur) == len(G.elements):
            break
    return tuple(gens)


def sl_subgroup(G: DiagonalGroup) -> DiagonalGroup:
    """Elements of integer age (determinant one)."""
    elems = frozenset(x for x in G.elements if sum(x) % G.modulus == 0)
    H = DiagonalGroup(G.n, G.modulus, elems, ())
    return DiagonalGroup(G.n, G.modulus, elems, minimal_generators(H))


# ---------------------------------------------------------------------------
# permutation groups


@dataclass(frozen=True)
class PermutationGroup:
    n: int
    elements: frozenset
    generators: tuple = ()

    @classmethod
    def generated(cls, gens, n: int) -> "PermutationGroup":
        gens = tuple(tuple(g) for g in gens if tuple(g) != identity_perm(n))
        return cls(n, generate(gens, compose, identity_perm(n)), gens)

    @classmethod
    def trivial(cls, n: int) -> "PermutationGroup":
        return cls(n, frozenset({identity_perm(n)}), ())

    @property
    def order(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self):
        return len(self.elements)

    def is_trivial(self) -> bool:
        return len(self.elements) == 1

    def subgroups(self) -> list["PermutationGroup"]:
        return [
            PermutationGroup(self.n, elems, tuple(g for g in gens if g != identity_perm(self.n)))
            for elems, gens in all_subgroups(self.elements, compose, identity_perm(self.n))
        ]

    def conjugacy_classes(self) -> list[tuple[Perm, frozenset]]:
        seen, out = set(), []
        for s in sorted(self.elements):
            if s in seen:
                continue
            cls_ = frozenset(compose(compose(t, s), perm_inverse(t)) for t in self.elements)
            seen |= cls_
            out.append((min(cls_), cls_))
        return out

    def centralizer(self, s: Perm) -> frozenset:
        return frozenset(t for t in self.elements if compose(t, s) == compose(s, t))

    def cycle_strings(self) -> list[str]:
        return [format_cycles(g) for g in self.generators]


def preserves(f: InvertiblePolynomial, sigma: Perm) -> bool:
    """Does the coordinate permutation (1, sigma) map the monomial set of f to itself?"""
    rows = f.monomial_set()
    return {act_perm(sigma, r) for r in rows} == rows


def permutation_symmetries(f: InvertiblePolynomial) -> PermutationGroup:
    from itertools import permutations

    elems = frozenset(p for p in permutations(range(f.n)) if preserves(f, p))
    full = PermutationGroup(f.n, elems, ())
    gens = _perm_minimal_generators(full)
    return PermutationGroup(f.n, elems, gens)


def _perm_minimal_generators(S: PermutationGroup) -> tuple:
    ident = identity_perm(S.n)
    gens: list = []
    cur = frozenset({ident})
    for g in sorted(S.elements):
        if g in cur:
            continue
        gens.append(g)
        cur = generate(gens, compose, ident)
    return tuple(gens)


def normalizes(sigma: Perm, G: DiagonalGroup) -> bool:
    return all(act_perm(sigma, g) in G.elements for g in G.gens())


def pc_check(S: PermutationGroup, n: int | None = None) -> tuple[bool, PermutationGroup | None]:
    """Parity condition: every subgroup T has (#T-orbits on the n letters) = n mod 2."""
    n = S.n if n is None else n
    for T in S.subgroups():
        orbits = _orbit_count(T, n)
        if (orbits - n) % 2:
            return False, T
    return True, None


def _orbit_count(T: PermutationGroup, n: int) -> int:
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for g in T.elements:
        for i in range(n):
            a, b = find(i), find(g[i])
            if a != b:
                parent[a] = b
    return len({find(i) for i in range(n)})


# ---------------------------------------------------------------------------
# fixed loci


@dataclass(frozen=True)
class FixedLocus:
    """Common fixed subspace of a set of monomial elements.

    ``classes`` partitions the surviving coordinates; on the locus
    ``x_j = e[offsets[j] / modulus] * y_{class of j}``, with offset 0 at
    each class representative (its smallest member).
    """

    n: int
    zeroed: frozenset
    classes: tuple[tuple[int, ...], ...]
    offsets: tuple[int, ...]
    weights: tuple[int, ...]
    d: int
    modulus: int

    @property
    def dim(self) -> int:
        return len(self.classes)

    @property
    def induced_weights(self) -> WeightSystem:
        return WeightSystem(self.weights, self.d)

    @cached_property
    def class_of(self) -> dict[int, int]:
        return {j: k for k, cls_ in enumerate(self.classes) for j in cls_}

    def key(self):
        return (self.classes, self.offsets, self.zeroed)

    def contains_point(self, x, tol=1e-9) -> bool:
        import cmath

        for j in self.zeroed:
            if abs(x[j]) > tol:
                return False
        for cls_ in self.classes:
            y = x[cls_[0]]
            for j in cls_:
                if abs(x[j] - cmath.exp(2j * cmath.pi * self.offsets[j] / self.modulus) * y) > tol:
                    return False
        return True

    def sample_point(self, ys):
        import cmath

        x = [0j] * self.n
        for k, cls_ in enumerate(self.classes):
            for j in cls_:
                x[j] = cmath.exp(2j * cmath.pi * self.offsets[j] / self.modulus) * ys[k]
        return tuple(x)


def fixed_locus(elements: Sequence[MonomialElement], ws: WeightSystem, modulus: int | None = None) -> FixedLocus:
    n = len(ws.w)
    if modulus is None:
        modulus = elements[0].modulus if elements else 1
    for g in elements:
        if g.n != n or g.modulus != modulus:
            raise IncompatibleLengths(f"element {g} does not act on the {n}-dimensional space mod {modulus}")
    N = modulus
    parent = list(range(n))
    off = [0] * n  # x_i = e[off_i/N] x_parent(i)
    dead = [False] * n

    def find(i):
        path = []
        while parent[i] != i:
            path.append(i)
            i = parent[i]
        root = i
        # compress, accumulating offsets from the top
        acc = 0
        for j in reversed(path):
            acc = (acc + off[j]) % N
            off[j] = acc
            parent[j] = root
        return root

    def union(i, j, r):
        """x_i = e[r/N] x_j."""
        ri, rj = find(i), find(j)
        oi = off[i] if i != ri else 0
        oj = off[j] if j != rj else 0
        rel = (r + oj - oi) % N  # x_ri = e[rel] x_rj
        if ri == rj:
            if rel:
                dead[ri] = True
            return
        parent[ri] = rj
        off[ri] = rel
        dead[rj] = dead[rj] or dead[ri]

    for g in elements:
        inv = perm_inverse(g.sigma)
        for i in range(n):
            union(i, inv[i], g.lam[i])
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    zeroed, classes = set(), []
    offsets = [0] * n
    for root, members in groups.items():
        if dead[root]:
            zeroed.update(members)
            continue
        members.sort()
        rep = members[0]
        o_rep = off[rep] if rep != root else 0
        for j in members:
            oj = off[j] if j != root else 0
            offsets[j] = (oj - o_rep) % N
        classes.append(tuple(members))
    classes.sort()
    wts = []
    for cls_ in classes:
        w = {ws.w[j] for j in cls_}
        assert len(w) == 1, f"weights differ along a fixed-locus class {cls_}"
        wts.append(w.pop())
    return FixedLocus(n, frozenset(zeroed), tuple(classes), tuple(offsets), tuple(wts), ws.d, N)


def induced_action(c: MonomialElement, L: FixedLocus) -> MonomialElement:
    """The monomial map that c induces on the y-coordinates of L."""
    N = L.modulus
    if c.n != L.n or c.modulus != N:
        raise IncompatibleLengths("element and locus live in different spaces")
    inv = perm_inverse(c.sigma)
    cls_of = L.class_of
    for i in L.zeroed:
        if inv[i] not in L.zeroed:
            raise DoesNotPreserveLocus(f"{c} maps the locus off the zero set at coordinate {i}")
    m = L.dim
    mu = [0] * m
    src = [0] * m
    for k, members in enumerate(L.classes):
        i = members[0]
        j = inv[i]
        if j in L.zeroed:
            raise DoesNotPreserveLocus(f"{c} does not preserve the locus")
        src[k] = cls_of[j]
        mu[k] = (c.lam[i] + L.offsets[j]) % N
        for i2 in members[1:]:
            j2 = inv[i2]
            if j2 in L.zeroed or cls_of[j2] != src[k] or (c.lam[i2] + L.offsets[j2] - L.offsets[i2] - mu[k]) % N:
                raise DoesNotPreserveLocus(f"{c} does not preserve the locus")
    # y'_k = e[mu_k] y_{src(k)}  =>  sigma'^{-1}(k) = src(k)
    if sorted(src) != list(range(m)):
        raise DoesNotPreserveLocus(f"{c} is not invertible on the locus")
    sigma = perm_inverse(tuple(src))
    return MonomialElement(sigma, tuple(mu), N)


def element_eigenvalues_on_locus(c: MonomialElement, L: FixedLocus) -> list[tuple[Fraction, int]]:
    h = induced_action(c, L)
    out = []
    for cyc in cycles(h.sigma):
        r = Fraction(sum(h.lam[i] for i in cyc) % h.modulus, h.modulus)
        w = L.weights[cyc[0]]
        out.extend(((r + k) / len(cyc), w) for k in range(len(cyc)))
    return out


def restrict_polynomial(f: InvertiblePolynomial, L: FixedLocus) -> QhPolynomial:
    N = L.modulus
    cls_of = L.class_of
    acc: dict[tuple, Cyclotomic] = {}
    for row in f.E:
        if any(row[j] and j in L.zeroed for j in range(f.n)):
            continue
        exps = [0] * L.dim
        ph = 0
        for j, k in enumerate(row):
            if k:
                exps[cls_of[j]] += k
                ph += k * L.offsets[j]
        key = tuple(exps)
        term = Cyclotomic.root(Fraction(ph, N))
        acc[key] = acc[key] + term if key in acc else term
    monos = tuple(Monomial(e, c) for e, c in sorted(acc.items()) if not c.is_zero())
    if not monos and L.dim > 0:
        raise UnexpectedZeroRestriction(f"f vanishes on a {L.dim}-dimensional fixed locus")
    return QhPolynomial(L.dim, monos, L.induced_weights)


# ---------------------------------------------------------------------------
# the semidirect product


@dataclass(frozen=True)
class Level:
    representative: Perm
    members: frozenset

    @property
    def name(self) -> str:
        return format_cycles(self.representative)


@dataclass(frozen=True)
class ConjugacyClass:
    rep: MonomialElement
    members: frozenset
    level: Level
    centralizer: tuple

    @property
    def size(self) -> int:
        return len(self.members)


@dataclass
class SymmetryData:
    f: InvertiblePolynomial
    G: DiagonalGroup
    S: PermutationGroup
    elements: list
    levels: list
    classes: list
    J: MonomialElement
    _locus_cache: dict = field(default_factory=dict, repr=False)
    cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.f.n

    @property
    def modulus(self) -> int:
        return self.G.modulus

    @property
    def order(self) -> int:
        return len(self.elements)

    def classes_in(self, level: Level) -> list:
        return [c for c in self.classes if c.level == level]

    def level_of(self, sigma: Perm) -> Level:
        for lv in self.levels:
            if sigma in lv.members:
                return lv
        raise KeyError(sigma)

    def class_of(self, g: MonomialElement) -> ConjugacyClass:
        for c in self.classes:
            if g in c.members:
                return c
        raise KeyError(g)

    def locus(self, elements) -> FixedLocus:
        """Memoized common fixed locus (a pure cache keyed by the element tuple)."""
        key = tuple(sorted(set(elements)))
        hit = self._locus_cache.get(key)
        if hit is None:
            hit = fixed_locus(key, self.f.weights, self.modulus)
            self._locus_cache[key] = hit
        return hit

    def commute(self, a, b) -> bool:
        return a * b == b * a


def _centralizer(x: MonomialElement, G: DiagonalGroup, S: PermutationGroup) -> tuple:
    """Centralizer of x = (lam, sigma): all (mu, tau) with tau in C_S(sigma) and
    (sigma - 1) mu = (tau - 1) lam."""
    N = x.modulus
    by_defect: dict = {}
    for mu in G.sorted_elements:
        moved = act_perm(x.sigma, mu)
        by_defect.setdefault(tuple((a - b) % N for a, b in zip(moved, mu)), []).append(mu)
    out = []
    for tau in sorted(S.centralizer(x.sigma)):
        moved = act_perm(tau, x.lam)
        target = tuple((a - b) % N for a, b in zip(moved, x.lam))
        out.extend(MonomialElement(tau, mu, N) for mu in by_defect.get(target, ()))
    return tuple(out)


def build_symmetry_data(f: InvertiblePolynomial, G: DiagonalGroup, S: PermutationGroup, cap: int | None = None) -> SymmetryData:
    N = G.modulus
    if abs(f.det) != N:
        G = G.with_modulus(abs(f.det)) if abs(f.det) % N == 0 else G
        N = G.modulus
    for g in G.gens():
        if not in_symmetry_group(f.E, g, N):
            raise NotASymmetry(f"diagonal element {g} (mod {N}) is not a symmetry of f")
    for s in S.generators or S.elements:
        if not preserves(f, s):
            raise NotASymmetry(f"permutation {format_cycles(s)} does not preserve f")
        if not normalizes(s, G):
            raise DoesNotNormalize(f"permutation {format_cycles(s)} does not normalize G")
    cap = cap or group_cap()
    if G.order * S.order > cap:
        raise GroupTooLarge(f"|G x| S| = {G.order * S.order} exceeds cap {cap}")
    elements = [MonomialElement(s, lam, N) for s in sorted(S.elements) for lam in sorted(G.elements)]
    levels = [Level(rep, members) for rep, members in S.conjugacy_classes()]
    level_by_perm = {s: lv for lv in levels for s in lv.members}
    classes = []
    if S.is_trivial():
        lv = levels[0]
        for g in elements:
            classes.append(ConjugacyClass(g, frozenset({g}), lv, tuple(elements)))
    else:
        gens = [MonomialElement.diagonal(g, N) for g in G.gens()] + [MonomialElement.permutation(s, N) for s in S.generators]
        gens_inv = [(y, y.inverse()) for y in gens]
        seen = set()
        for x in elements:
            if x in seen:
                continue
            orbit = {x}
            queue = deque([x])
            while queue:
                z = queue.popleft()
                for y, yi in gens_inv:
                    w = y * z * yi
                    if w not in orbit:
                        orbit.add(w)
                        queue.append(w)
            seen |= orbit
            rep = min(orbit)
            cent = _centralizer(rep, G, S)
            assert len(cent) * len(orbit) == len(elements)
            classes.append(ConjugacyClass(rep, frozenset(orbit), level_by_perm[rep.sigma], cent))
    classes.sort(key=lambda c: (levels.index(c.level), c.rep))
    J = MonomialElement.diagonal(grading_element(f), N)
    return SymmetryData(f, G, S, elements, levels, classes, J)
