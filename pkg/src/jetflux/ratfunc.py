"""Exact multivariate rational functions over the rationals.

Coefficients of differential expressions live in the field Q(c1, ..., ck)
where the ci are declared constants (generic or exponent-role).  Polynomials
are kept as sorted term tuples with Fraction coefficients; rational functions
are kept reduced with a monic denominator, so structural equality is semantic
equality.
"""

from __future__ import annotations

from fractions import Fraction
from functools import cmp_to_key
from typing import Iterable, Mapping, Union

from .errors import PoleError

# A monomial is a name-sorted tuple of (constant name, positive exponent).
Monomial = tuple[tuple[str, int], ...]

Scalar = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    out: dict[str, int] = dict(a)
    for name, e in b:
        out[name] = out.get(name, 0) + e
    return tuple(sorted((n, e) for n, e in out.items() if e != 0))


def _mono_deg(a: Monomial) -> int:
    return sum(e for _, e in a)


def _mono_cmp(a: Monomial, b: Monomial) -> int:
    """Graded lexicographic order, variables ranked by name."""
    da, db = _mono_deg(a), _mono_deg(b)
    if da != db:
        return -1 if da < db else 1
    ea, eb = dict(a), dict(b)
    for name in sorted(set(ea) | set(eb)):
        xa, xb = ea.get(name, 0), eb.get(name, 0)
        if xa != xb:
            return -1 if xa < xb else 1
    return 0


_MONO_KEY = cmp_to_key(_mono_cmp)


def _mono_divides(a: Monomial, b: Monomial) -> bool:
    eb = dict(b)
    return all(eb.get(name, 0) >= e for name, e in a)


def _mono_div(a: Monomial, b: Monomial) -> Monomial:
    out = dict(a)
    for name, e in b:
        out[name] = out.get(name, 0) - e
    return tuple(sorted((n, e) for n, e in out.items() if e != 0))


class Poly:
    """Multivariate polynomial with Fraction coefficients, canonical form."""

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Iterable[tuple[Monomial, Fraction]]):
        merged: dict[Monomial, Fraction] = {}
        for mono, c in terms:
            if c:
                merged[mono] = merged.get(mono, Fraction(0)) + c
        self.terms: tuple[tuple[Monomial, Fraction], ...] = tuple(
            sorted(((m, c) for m, c in merged.items() if c),
                   key=lambda t: _MONO_KEY(t[0]), reverse=True))
        self._hash: int | None = None

    @staticmethod
    def const(value: Scalar) -> "Poly":
        v = Fraction(value)
        return Poly([((), v)]) if v else Poly([])

    @staticmethod
    def var(name: str) -> "Poly":
        return Poly([(((name, 1),), Fraction(1))])

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def is_constant(self) -> bool:
        return all(not m for m, _ in self.terms)

    def constant_value(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        if not self.is_constant:
            raise ValueError("polynomial is not constant")
        return self.terms[0][1]

    def variables(self) -> set[str]:
        return {name for mono, _ in self.terms for name, _ in mono}

    def leading(self) -> tuple[Monomial, Fraction]:
        return self.terms[0]

    def __add__(self, other: "Poly") -> "Poly":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return Poly(self.terms + other.terms)

    def __neg__(self) -> "Poly":
        return Poly([(m, -c) for m, c in self.terms])

    def __sub__(self, other: "Poly") -> "Poly":
        return self + (-other)

    def __mul__(self, other: "Poly") -> "Poly":
        if self.is_zero or other.is_zero:
            return _ZERO
        if self.is_constant:
            c = self.terms[0][1]
            return Poly([(m, c * k) for m, k in other.terms])
        if other.is_constant:
            c = other.terms[0][1]
            return Poly([(m, c * k) for m, k in self.terms])
        acc: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms:
            for mb, cb in other.terms:
                m = _mono_mul(ma, mb)
                acc[m] = acc.get(m, Fraction(0)) + ca * cb
        return Poly(acc.items())

    def scale(self, k: Scalar) -> "Poly":
        k = Fraction(k)
        if not k:
            return _ZERO
        return Poly([(m, c * k) for m, c in self.terms])

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Poly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def __repr__(self) -> str:
        return f"Poly({self.terms!r})"

    def degree_in(self, name: str) -> int:
        deg = 0
        for mono, _ in self.terms:
            for n, e in mono:
                if n == name and e > deg:
                    deg = e
        return deg

    def substitute(self, values: Mapping[str, Scalar]) -> "Poly":
        """Replace a subset of variables by rational values."""
        if not any(name in values for name in self.variables()):
            return self
        acc: dict[Monomial, Fraction] = {}
        for mono, c in self.terms:
            coeff = c
            rest: list[tuple[str, int]] = []
            for name, e in mono:
                if name in values:
                    coeff *= Fraction(values[name]) ** e
                else:
                    rest.append((name, e))
            m = tuple(rest)
            acc[m] = acc.get(m, Fraction(0)) + coeff
        return Poly(acc.items())

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        total = Fraction(0)
        for mono, c in self.terms:
            v = c
            for name, e in mono:
                v *= Fraction(values[name]) ** e
            total += v
        return total


_ZERO = Poly([])
_ONE = Poly.const(1)


def _univariate(p: Poly, v: str) -> dict[int, Poly]:
    """View p as a univariate polynomial in v with Poly coefficients."""
    out: dict[int, list[tuple[Monomial, Fraction]]] = {}
    for mono, c in p.terms:
        e = 0
        rest: list[tuple[str, int]] = []
        for name, k in mono:
            if name == v:
                e = k
            else:
                rest.append((name, k))
        out.setdefault(e, []).append((tuple(rest), c))
    return {e: Poly(terms) for e, terms in out.items()}


def _from_univariate(coeffs: Mapping[int, Poly], v: str) -> Poly:
    terms: list[tuple[Monomial, Fraction]] = []
    for e, poly in coeffs.items():
        for mono, c in poly.terms:
            terms.append((_mono_mul(mono, ((v, e),)) if e else mono, c))
    return Poly(terms)


def poly_divexact(a: Poly, b: Poly) -> Poly:
    """Exact division; raises ValueError if b does not divide a."""
    if b.is_zero:
        raise ZeroDivisionError("polynomial division by zero")
    if a.is_zero:
        return _ZERO
    if b.is_constant:
        return a.scale(Fraction(1) / b.terms[0][1])
    quot: list[tuple[Monomial, Fraction]] = []
    mb, cb = b.leading()
    while not a.is_zero:
        ma, ca = a.leading()
        if not _mono_divides(mb, ma):
            raise ValueError("inexact polynomial division")
        q = (_mono_div(ma, mb), ca / cb)
        quot.append(q)
        a = a - b * Poly([q])
    return Poly(quot)


def _pseudo_rem(a: Poly, b: Poly, v: str) -> Poly:
    db = b.degree_in(v)
    ub = _univariate(b, v)
    lb = ub[db]
    r = a
    while not r.is_zero:
        dr = r.degree_in(v)
        if dr < db:
            break
        ur = _univariate(r, v)
        lr = ur[dr]
        shift = Poly([(((v, dr - db),), Fraction(1))]) if dr > db else _ONE
        r = r * lb - b * lr * shift
    return r


def _content_in(p: Poly, v: str) -> Poly:
    coeffs = list(_univariate(p, v).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        g = poly_gcd(g, c)
        if g.is_constant:
            break
    return g


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """GCD normalized to leading coefficient 1 (graded-lex leading term)."""
    if a.is_zero and b.is_zero:
        return _ZERO
    if a.is_zero:
        return _monic(b)
    if b.is_zero:
        return _monic(a)
    if a.is_constant or b.is_constant:
        return _ONE
    avars, bvars = a.variables(), b.variables()
    common = avars & bvars
    if not common:
        return _ONE
    v = max(avars | bvars)
    if v not in common:
        # v appears in only one argument: gcd divides the other's v-content
        if v in avars:
            return poly_gcd(_content_in(a, v), b)
        return poly_gcd(a, _content_in(b, v))
    ca, cb = _content_in(a, v), _content_in(b, v)
    pa, pb = poly_divexact(a, ca), poly_divexact(b, cb)
    cont = poly_gcd(ca, cb)
    if pa.degree_in(v) < pb.degree_in(v):
        pa, pb = pb, pa
    while True:
        r = _pseudo_rem(pa, pb, v)
        if r.is_zero:
            g = pb
            break
        if r.degree_in(v) == 0:
            g = _ONE
            break
        pa, pb = pb, poly_divexact(r, _content_in(r, v))
    if not g.is_constant:
        g = poly_divexact(g, _content_in(g, v))
    return _monic(cont * g)


def _monic(p: Poly) -> Poly:
    if p.is_zero:
        return p
    lc = p.leading()[1]
    return p if lc == 1 else p.scale(Fraction(1) / lc)


class Coefficient:
    """Reduced rational function num/den with monic denominator."""

    __slots__ = ("num", "den", "_hash")

    def __init__(self, num: Poly, den: Poly | None = None, _reduced: bool = False):
        if den is None:
            den = _ONE
        if den.is_zero:
            raise ZeroDivisionError("zero denominator")
        if num.is_zero:
            num, den = _ZERO, _ONE
        elif not _reduced:
            if den.is_constant:
                num, den = num.scale(Fraction(1) / den.terms[0][1]), _ONE
            else:
                g = poly_gcd(num, den)
                if not (g.is_constant and not g.is_zero):
                    num, den = poly_divexact(num, g), poly_divexact(den, g)
                lc = den.leading()[1]
                if lc != 1:
                    inv = Fraction(1) / lc
                    num, den = num.scale(inv), den.scale(inv)
                if den.is_constant:
                    den = _ONE
        self.num = num
        self.den = den
        self._hash: int | None = None

    @staticmethod
    def from_rational(value: Scalar) -> "Coefficient":
        return Coefficient(Poly.const(value), _ONE, _reduced=True)

    @staticmethod
    def from_constant(name: str) -> "Coefficient":
        return Coefficient(Poly.var(name), _ONE, _reduced=True)

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_one(self) -> bool:
        return self.den == _ONE and self.num == _ONE

    @property
    def is_rational(self) -> bool:
        return self.num.is_constant and self.den == _ONE

    def rational_value(self) -> Fraction:
        if self.den != _ONE or not self.num.is_constant:
            raise ValueError("coefficient is not a plain rational")
        return self.num.constant_value()

    def constants(self) -> set[str]:
        return self.num.variables() | self.den.variables()

    def __add__(self, other: "Coefficient") -> "Coefficient":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        if self.den == other.den:
            return Coefficient(self.num + other.num, self.den)
        return Coefficient(self.num * other.den + other.num * self.den,
                           self.den * other.den)

    def __neg__(self) -> "Coefficient":
        return Coefficient(-self.num, self.den, _reduced=True)

    def __sub__(self, other: "Coefficient") -> "Coefficient":
        return self + (-other)

    def __mul__(self, other: "Coefficient") -> "Coefficient":
        if self.is_zero or other.is_zero:
            return ZERO_COEFF
        if self.is_one:
            return other
        if other.is_one:
            return self
        return Coefficient(self.num * other.num, self.den * other.den)

    def __truediv__(self, other: "Coefficient") -> "Coefficient":
        if other.is_zero:
            raise ZeroDivisionError("division by zero coefficient")
        return Coefficient(self.num * other.den, self.den * other.num)

    def __pow__(self, n: int) -> "Coefficient":
        if n == 0:
            return ONE_COEFF
        if n < 0:
            return (ONE_COEFF / self) ** (-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def scale(self, k: Scalar) -> "Coefficient":
        k = Fraction(k)
        if not k:
            return ZERO_COEFF
        return Coefficient(self.num.scale(k), self.den, _reduced=True)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Coefficient)
                and self.num == other.num and self.den == other.den)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.num, self.den))
        return self._hash

    def __repr__(self) -> str:
        return f"Coefficient({self.num!r}, {self.den!r})"

    def substitute(self, values: Mapping[str, Scalar]) -> "Coefficient":
        """Specialize a subset of constants to rational values."""
        num = self.num.substitute(values)
        den = self.den.substitute(values)
        if den.is_zero:
            raise PoleError(f"denominator vanishes under {dict(values)!r}")
        return Coefficient(num, den)

    def evaluate(self, values: Mapping[str, Scalar]) -> Fraction:
        den = self.den.evaluate(values)
        if den == 0:
            raise PoleError(f"denominator vanishes under {dict(values)!r}")
        return self.num.evaluate(values) / den

    def is_integer_linear(self, allowed: set[str]) -> bool:
        """True if den == 1 and num = int + sum of int * c with c in allowed."""
        if self.den != _ONE:
            return False
        for mono, c in self.num.terms:
            if c.denominator != 1:
                return False
            if not mono:
                continue
            if len(mono) != 1 or mono[0][1] != 1 or mono[0][0] not in allowed:
                return False
        return True

    def linear_parts(self) -> tuple[int, dict[str, int]]:
        """Decompose an integer-linear coefficient into (base, {name: coeff})."""
        base = 0
        lin: dict[str, int] = {}
        for mono, c in self.num.terms:
            if not mono:
                base = int(c)
            else:
                lin[mono[0][0]] = int(c)
        return base, lin


ZERO_COEFF = Coefficient(_ZERO, _ONE, _reduced=True)
ONE_COEFF = Coefficient(_ONE, _ONE, _reduced=True)
