"""Exact arithmetic: phases, cyclotomic numbers, zeta products and E-functions.

Rationals are :class:`fractions.Fraction`. A *phase* is a Fraction in [0, 1)
standing for the root of unity ``e[a] = exp(2 pi i a)``.
"""

from __future__ import annotations

import cmath
from collections import defaultdict
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Mapping

from .errors import ParseError


def lcm(*xs: int) -> int:
    out = 1
    for x in xs:
        out = out * x // gcd(out, x)
    return out


def phase(x) -> Fraction:
    """Normalize a rational (or 'p/q' string) to [0, 1)."""
    return Fraction(x) % 1


def parse_rational(s) -> Fraction:
    if isinstance(s, (int, Fraction)):
        return Fraction(s)
    try:
        return Fraction(str(s).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"not a rational number: {s!r}") from exc


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def divisors(n: int) -> list[int]:
    return [k for k in range(1, n + 1) if n % k == 0]


def mobius(n: int) -> int:
    result, p, m = 1, 2, n
    while p * p <= m:
        if m % p == 0:
            m //= p
            if m % p == 0:
                return 0
            result = -result
        p += 1
    if m > 1:
        result = -result
    return result


# ---------------------------------------------------------------------------
# cyclotomic polynomials and Q(zeta_N)


def _poly_divexact(num: list[int], den: list[int]) -> list[int]:
    """Exact division of integer polynomials (coefficient lists, low degree first; den monic)."""
    num = list(num)
    out = [0] * (len(num) - len(den) + 1)
    for k in range(len(out) - 1, -1, -1):
        c = num[k + len(den) - 1]
        out[k] = c
        if c:
            for j, b in enumerate(den):
                num[k + j] -= c * b
    if any(num[: len(den) - 1]):
        raise ArithmeticError("inexact polynomial division")
    return out


@lru_cache(maxsize=None)
def cyclotomic_polynomial(n: int) -> tuple[int, ...]:
    """Phi_n as coefficient tuple (constant term first)."""
    num = [-1] + [0] * (n - 1) + [1]
    for d in divisors(n)[:-1]:
        num = _poly_divexact(num, list(cyclotomic_polynomial(d)))
    return tuple(num)


@lru_cache(maxsize=None)
def _power_table(n: int) -> tuple[tuple[int, ...], ...]:
    """Row k holds zeta_n^k reduced mod Phi_n, for k = 0..n-1."""
    phi = cyclotomic_polynomial(n)
    deg = len(phi) - 1
    rows = []
    cur = [1] + [0] * (deg - 1) if deg > 0 else []
    for _ in range(n):
        rows.append(tuple(cur))
        # multiply by x and reduce
        nxt = [0] + cur[:-1]
        top = cur[-1]
        if top:
            for j in range(deg):
                nxt[j] -= top * phi[j]
        cur = nxt
    return tuple(rows)


class Cyclotomic:
    """Element of Q(zeta_N), stored in the power basis mod Phi_N."""

    __slots__ = ("conductor", "coeffs")

    def __init__(self, conductor: int, coeffs: Iterable):
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != len(cyclotomic_polynomial(conductor)) - 1:
            raise ValueError("coefficient vector has wrong length")
        self.conductor = conductor
        self.coeffs = coeffs

    # constructors
    @classmethod
    def rational(cls, r) -> "Cyclotomic":
        return cls(1, [Fraction(r)])

    @classmethod
    def root(cls, a) -> "Cyclotomic":
        return normal_form({phase(a): 1})

    # conductor handling
    def rebase(self, m: int) -> "Cyclotomic":
        if m == self.conductor:
            return self
        if m % self.conductor:
            raise ValueError(f"cannot rebase conductor {self.conductor} to {m}")
        table = _power_table(m)
        step = m // self.conductor
        out = [Fraction(0)] * (len(table[0]))
        for k, c in enumerate(self.coeffs):
            if c:
                for j, b in enumerate(table[(k * step) % m]):
                    if b:
                        out[j] += c * b
        return Cyclotomic(m, out)

    def _common(self, other):
        if not isinstance(other, Cyclotomic):
            other = Cyclotomic.rational(other)
        m = lcm(self.conductor, other.conductor)
        return self.rebase(m), other.rebase(m), m

    def __add__(self, other):
        a, b, m = self._common(other)
        return Cyclotomic(m, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.conductor, [-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.conductor, [c * other for c in self.coeffs])
        a, b, m = self._common(other)
        table = _power_table(m)
        deg = len(table[0])
        out = [Fraction(0)] * deg
        for i, x in enumerate(a.coeffs):
            if not x:
                continue
            for j, y in enumerate(b.coeffs):
                if y:
                    row = table[(i + j) % m]
                    xy = x * y
                    for k, r in enumerate(row):
                        if r:
                            out[k] += xy * r
        return Cyclotomic(m, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Cyclotomic.rational(other)
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b, _ = self._common(other)
        return a.coeffs == b.coeffs

    __hash__ = None

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"{self!r} is not rational")
        return self.coeffs[0]

    def is_integer(self) -> bool:
        return self.is_rational() and self.coeffs[0].denominator == 1

    def __complex__(self):
        z = cmath.exp(2j * cmath.pi / self.conductor)
        return complex(sum(float(c) * z**k for k, c in enumerate(self.coeffs)))

    def __repr__(self):
        terms = [f"{format_rational(c)}*z{self.conductor}^{k}" for k, c in enumerate(self.coeffs) if c]
        return "Cyclotomic(" + (" + ".join(terms) or "0") + ")"


def normal_form(combination: Mapping | Iterable) -> Cyclotomic:
    """Canonical Q(zeta_N) form of a formal combination sum n_a * e[a].

    Accepts a mapping phase -> coefficient or an iterable of phases (each
    with coefficient 1). N is the lcm of the phase denominators.
    """
    if not isinstance(combination, Mapping):
        acc = defaultdict(int)
        for a in combination:
            acc[phase(a)] += 1
        combination = acc
    items = [(phase(a), Fraction(c)) for a, c in combination.items() if c]
    n = lcm(*(a.denominator for a, _ in items)) if items else 1
    table = _power_table(n)
    out = [Fraction(0)] * len(table[0])
    for a, c in items:
        for j, b in enumerate(table[(a.numerator * (n // a.denominator)) % n]):
            if b:
                out[j] += c * b
    return Cyclotomic(n, out)


def combination_mod(coeffs: Mapping, n: int) -> Cyclotomic:
    """sum c_k zeta_n^k for integer exponents k (mod n) and integer coefficients."""
    table = _power_table(n)
    out = [0] * len(table[0])
    for k, c in coeffs.items():
        if c:
            for j, b in enumerate(table[k % n]):
                if b:
                    out[j] += c * b
    return Cyclotomic(n, out)


# ---------------------------------------------------------------------------
# zeta products


class ZetaProduct:
    """Formal product prod (1 - e[a] t^m)^c, keyed by (m, a)."""

    __slots__ = ("factors",)

    def __init__(self, factors: Mapping | None = None):
        acc = defaultdict(int)
        for (m, a), c in (factors or {}).items():
            if m <= 0:
                raise ValueError("binomial degree must be positive")
            acc[(int(m), phase(a))] += int(c)
        self.factors = {k: v for k, v in acc.items() if v}

    @classmethod
    def binomial(cls, m: int, a=0, exp: int = 1) -> "ZetaProduct":
        return cls({(m, a): exp})

    @classmethod
    def _raw(cls, factors: dict) -> "ZetaProduct":
        out = cls.__new__(cls)
        out.factors = {k: v for k, v in factors.items() if v}
        return out

    def __mul__(self, other: "ZetaProduct") -> "ZetaProduct":
        acc = dict(self.factors)
        for k, v in other.factors.items():
            acc[k] = acc.get(k, 0) + v
        return ZetaProduct._raw(acc)

    def __truediv__(self, other: "ZetaProduct") -> "ZetaProduct":
        return self * other ** -1

    def __pow__(self, k: int) -> "ZetaProduct":
        return ZetaProduct._raw({key: v * k for key, v in self.factors.items()})

    def twist(self, b) -> "ZetaProduct":
        """Substitute t -> e[-b] t."""
        b = Fraction(b)
        if not b:
            return self
        return ZetaProduct({(m, a - m * b): c for (m, a), c in self.factors.items()})

    def conjugate(self) -> "ZetaProduct":
        return ZetaProduct({(m, -a): c for (m, a), c in self.factors.items()})

    def degree(self) -> int:
        return sum(m * c for (m, _), c in self.factors.items())

    def __call__(self, t: complex) -> complex:
        out = 1
        for (m, a), c in self.factors.items():
            out *= (1 - cmath.exp(2j * cmath.pi * float(a)) * t**m) ** c
        return out

    def expanded(self) -> "ZetaProduct":
        """Same function written with linear factors only (unique factorization)."""
        acc = defaultdict(int)
        for (m, a), c in self.factors.items():
            for k in range(m):
                acc[(1, (a + k) / m)] += c
        return ZetaProduct(acc)

    def __eq__(self, other):
        # equality of rational functions, not of the formal factor maps
        if not isinstance(other, ZetaProduct):
            return NotImplemented
        return self.expanded().factors == other.expanded().factors

    def __hash__(self):
        return hash(frozenset(self.expanded().factors.items()))

    def is_one(self) -> bool:
        return not self.factors

    def to_json(self) -> list[dict]:
        return [
            {"m": m, "phase": format_rational(a), "exp": c}
            for (m, a), c in sorted(self.factors.items())
        ]

    @classmethod
    def from_json(cls, records) -> "ZetaProduct":
        return cls({(r["m"], parse_rational(r["phase"])): r["exp"] for r in records})

    def __repr__(self):
        if not self.factors:
            return "ZetaProduct(1)"
        parts = []
        for (m, a), c in sorted(self.factors.items()):
            base = f"(1 - e[{format_rational(a)}]t^{m})" if a else f"(1 - t^{m})"
            parts.append(base if c == 1 else f"{base}^{c}")
        return "ZetaProduct(" + "".join(parts) + ")"


# ---------------------------------------------------------------------------
# E-functions


class EFunction:
    """Finite sum  sum c * t^u * tbar^v  over rational exponent pairs."""

    __slots__ = ("terms", "n")

    def __init__(self, terms: Mapping | None = None, n: int = 0):
        acc = defaultdict(int)
        for (u, v), c in (terms or {}).items():
            if type(u) is not Fraction:
                u = Fraction(u)
            if type(v) is not Fraction:
                v = Fraction(v)
            acc[(u, v)] += int(c)
        self.terms = {k: v for k, v in acc.items() if v}
        self.n = n

    @classmethod
    def _raw(cls, terms: dict, n: int) -> "EFunction":
        out = cls.__new__(cls)
        out.terms = {k: v for k, v in terms.items() if v}
        out.n = n
        return out

    def __add__(self, other: "EFunction") -> "EFunction":
        acc = dict(self.terms)
        for k, v in other.terms.items():
            acc[k] = acc.get(k, 0) + v
        return EFunction._raw(acc, self.n)

    def __neg__(self) -> "EFunction":
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, k: int) -> "EFunction":
        return EFunction._raw({key: k * c for key, c in self.terms.items()}, self.n)

    def invert_t(self) -> "EFunction":
        """Substitute t -> t^{-1}."""
        return EFunction._raw({(-u, v): c for (u, v), c in self.terms.items()}, self.n)

    def at_t_one(self) -> dict[Fraction, int]:
        acc = defaultdict(int)
        for (_, v), c in self.terms.items():
            acc[v] += c
        return {s: c for s, c in acc.items() if c}

    def total(self) -> int:
        return sum(self.terms.values())

    def __eq__(self, other):
        if not isinstance(other, EFunction):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def to_json(self) -> list[dict]:
        return [
            {"t": format_rational(u), "tbar": format_rational(v), "coeff": c}
            for (u, v), c in sorted(self.terms.items())
        ]

    @classmethod
    def from_json(cls, records, n: int = 0) -> "EFunction":
        return cls({(parse_rational(r["t"]), parse_rational(r["tbar"])): r["coeff"] for r in records}, n)

    def __repr__(self):
        if not self.terms:
            return "EFunction(0)"
        return "EFunction(" + " + ".join(
            f"{c}*t^{format_rational(u)}*tb^{format_rational(v)}" for (u, v), c in sorted(self.terms.items())
        ) + ")"
