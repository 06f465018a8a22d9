"""Canonical differential expressions on jet space.

An Expr is a finite sum of monomials.  Each monomial is a Coefficient (an
exact rational function of the declared constants) times a product of atom
powers, where an atom is a base coordinate, a jet (a field with a derivative
multi-index, possibly a parameter field), or a function symbol applied to an
expression argument.  Exponents are integer-linear forms in exponent-role
constants, so u^(p+1) and g^(-p) are first-class objects.

Atoms inside a monomial are kept distinct and name-ordered, coefficients are
kept reduced, so structural equality of two Exprs is semantic equality and
``is_zero`` is a syntactic check.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import (DivisionByExprError, ExponentError,
                     MissingAssignmentError, PoleError)
from .ratfunc import Coefficient, ONE_COEFF, Poly, Scalar, ZERO_COEFF


@dataclass(frozen=True)
class ConstantSymbol:
    """A named constant; exponent-role constants may appear in exponents."""

    name: str
    role: str = "generic"  # "generic" | "exponent"


@dataclass(frozen=True)
class MultiIndex:
    """Derivative multi-index: name-sorted (direction, count) pairs."""

    counts: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(*names: str) -> "MultiIndex":
        acc: dict[str, int] = {}
        for n in names:
            acc[n] = acc.get(n, 0) + 1
        return MultiIndex(tuple(sorted(acc.items())))

    @property
    def order(self) -> int:
        return sum(c for _, c in self.counts)

    def count(self, name: str) -> int:
        for n, c in self.counts:
            if n == name:
                return c
        return 0

    def bump(self, name: str) -> "MultiIndex":
        acc = dict(self.counts)
        acc[name] = acc.get(name, 0) + 1
        return MultiIndex(tuple(sorted(acc.items())))

    def __add__(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self.counts)
        for n, c in other.counts:
            acc[n] = acc.get(n, 0) + c
        return MultiIndex(tuple(sorted(acc.items())))

    def __sub__(self, other: "MultiIndex") -> "MultiIndex":
        acc = dict(self.counts)
        for n, c in other.counts:
            acc[n] = acc.get(n, 0) - c
            if acc[n] < 0:
                raise ValueError(f"multi-index subtraction underflow at {n}")
        return MultiIndex(tuple(sorted((n, c) for n, c in acc.items() if c)))

    def dominates(self, other: "MultiIndex") -> bool:
        mine = dict(self.counts)
        return all(mine.get(n, 0) >= c for n, c in other.counts)

    def directions(self) -> Iterator[str]:
        for n, c in self.counts:
            for _ in range(c):
                yield n

    def __repr__(self) -> str:
        return "MultiIndex(" + ",".join(self.directions()) + ")"


EMPTY_INDEX = MultiIndex()


@dataclass(frozen=True)
class ExponentVector:
    """Exponent of an atom power: integer base plus an integer-linear form in
    exponent-role constants."""

    base: int = 1
    linear: tuple[tuple[str, int], ...] = ()

    @staticmethod
    def of(base: int = 1, **linear: int) -> "ExponentVector":
        return ExponentVector(base, tuple(sorted(
            (n, c) for n, c in linear.items() if c)))

    @property
    def is_constant(self) -> bool:
        return not self.linear

    @property
    def is_zero(self) -> bool:
        return self.base == 0 and not self.linear

    def __add__(self, other: "ExponentVector") -> "ExponentVector":
        acc = dict(self.linear)
        for n, c in other.linear:
            acc[n] = acc.get(n, 0) + c
        return ExponentVector(self.base + other.base,
                              tuple(sorted((n, c) for n, c in acc.items() if c)))

    def __neg__(self) -> "ExponentVector":
        return ExponentVector(-self.base, tuple((n, -c) for n, c in self.linear))

    def shift(self, k: int) -> "ExponentVector":
        return ExponentVector(self.base + k, self.linear)

    def scale(self, k: int) -> "ExponentVector":
        if k == 0:
            return ExponentVector(0, ())
        return ExponentVector(self.base * k,
                              tuple((n, c * k) for n, c in self.linear))

    def as_coefficient(self) -> Coefficient:
        out = Coefficient.from_rational(self.base)
        for n, c in self.linear:
            out = out + Coefficient.from_constant(n).scale(c)
        return out

    def substitute(self, values: Mapping[str, int]) -> Union[int, "ExponentVector"]:
        base = self.base
        rest: list[tuple[str, int]] = []
        for n, c in self.linear:
            if n in values:
                v = values[n]
                if isinstance(v, Fraction):
                    if v.denominator != 1:
                        raise ExponentError(
                            f"exponent constant {n} needs an integer, got {v}")
                    v = int(v)
                base += c * int(v)
            else:
                rest.append((n, c))
        if rest:
            return ExponentVector(base, tuple(rest))
        return base


EV_ONE = ExponentVector(1, ())


@dataclass(frozen=True)
class Coordinate:
    name: str


@dataclass(frozen=True)
class Jet:
    """A field differentiated by a multi-index; ``param`` marks parameter
    fields, which may carry negative specialized exponents (e.g. g^(-p))."""

    field: str
    index: MultiIndex = EMPTY_INDEX
    param: bool = False


@dataclass(frozen=True)
class FunctionApp:
    """order-th derivative of an abstract function symbol at an Expr argument."""

    name: str
    order: int
    arg: "Expr"


Atom = Union[Coordinate, Jet, FunctionApp]

# A term is a name-ordered product of distinct atom powers.
Term = tuple[tuple[Atom, ExponentVector], ...]


def _atom_key(a: Atom):
    if isinstance(a, Coordinate):
        return (0, a.name)
    if isinstance(a, Jet):
        return (1, a.field, a.index.order, a.index.counts, a.param)
    return (2, a.name, a.order, a.arg.sort_key())


def _ev_key(ev: ExponentVector):
    return (ev.base, ev.linear)


def _term_key(t: Term):
    return tuple((_atom_key(a), _ev_key(ev)) for a, ev in t)


def _check_power(atom: Atom, ev: ExponentVector) -> None:
    if ev.is_constant and ev.base < 0:
        if isinstance(atom, FunctionApp) or (isinstance(atom, Jet)
                                             and not atom.param):
            raise ExponentError(f"negative power {ev.base} of {atom!r}")


def _make_term(factors: Iterable[tuple[Atom, ExponentVector]]) -> Term:
    acc: dict[Atom, ExponentVector] = {}
    for atom, ev in factors:
        if atom in acc:
            acc[atom] = acc[atom] + ev
        else:
            acc[atom] = ev
    out = []
    for atom, ev in acc.items():
        if ev.is_zero:
            continue
        _check_power(atom, ev)
        out.append((atom, ev))
    out.sort(key=lambda p: (_atom_key(p[0]), _ev_key(p[1])))
    return tuple(out)


class Expr:
    """Canonical sum of (term, coefficient) pairs."""

    __slots__ = ("terms", "_hash", "_key")

    def __init__(self, terms: Mapping[Term, Coefficient] | Iterable[tuple[Term, Coefficient]]):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Term, Coefficient] = {}
        for t, c in items:
            if t in merged:
                merged[t] = merged[t] + c
            else:
                merged[t] = c
        self.terms: tuple[tuple[Term, Coefficient], ...] = tuple(
            sorted(((t, c) for t, c in merged.items() if not c.is_zero),
                   key=lambda p: _term_key(p[0])))
        self._hash: int | None = None
        self._key = None

    # -- constructors ------------------------------------------------------
    @staticmethod
    def zero() -> "Expr":
        return _ZERO_EXPR

    @staticmethod
    def one() -> "Expr":
        return _ONE_EXPR

    @staticmethod
    def from_coefficient(c: Coefficient) -> "Expr":
        return Expr([((), c)])

    @staticmethod
    def from_rational(v: Scalar) -> "Expr":
        return Expr.from_coefficient(Coefficient.from_rational(v))

    @staticmethod
    def from_atom(atom: Atom, ev: ExponentVector = EV_ONE) -> "Expr":
        if ev.is_zero:
            return _ONE_EXPR
        _check_power(atom, ev)
        return Expr([(((atom, ev),), ONE_COEFF)])

    # -- structure ---------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return not self.terms

    def sort_key(self):
        if self._key is None:
            self._key = tuple(
                (_term_key(t), c.num.terms, c.den.terms) for t, c in self.terms)
        return self._key

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple((t, c) for t, c in self.terms))
        return self._hash

    def __repr__(self) -> str:
        from .render import render
        return f"Expr[{render(self)}]"

    def as_coefficient(self) -> Coefficient | None:
        """The coefficient value if this Expr contains no atoms, else None."""
        if self.is_zero:
            return ZERO_COEFF
        if len(self.terms) == 1 and self.terms[0][0] == ():
            return self.terms[0][1]
        return None

    def atoms(self, deep: bool = True) -> Iterator[Atom]:
        seen: set[Atom] = set()
        stack = [self]
        while stack:
            e = stack.pop()
            for t, _ in e.terms:
                for a, _ in t:
                    if a in seen:
                        continue
                    seen.add(a)
                    yield a
                    if deep and isinstance(a, FunctionApp):
                        stack.append(a.arg)

    def jet_indices(self, field: str) -> set[MultiIndex]:
        return {a.index for a in self.atoms()
                if isinstance(a, Jet) and a.field == field}

    def constants(self) -> set[str]:
        out: set[str] = set()
        stack = [self]
        while stack:
            e = stack.pop()
            for t, c in e.terms:
                out |= c.constants()
                for a, ev in t:
                    out.update(n for n, _ in ev.linear)
                    if isinstance(a, FunctionApp):
                        stack.append(a.arg)
        return out

    # -- ring operations ---------------------------------------------------
    def __add__(self, other: "Expr") -> "Expr":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        return Expr(list(self.terms) + list(other.terms))

    def __neg__(self) -> "Expr":
        return Expr([(t, -c) for t, c in self.terms])

    def __sub__(self, other: "Expr") -> "Expr":
        return self + (-other)

    def __mul__(self, other: "Expr") -> "Expr":
        if self.is_zero or other.is_zero:
            return _ZERO_EXPR
        out: list[tuple[Term, Coefficient]] = []
        for ta, ca in self.terms:
            for tb, cb in other.terms:
                out.append((_make_term(ta + tb), ca * cb))
        return Expr(out)

    def scale(self, c: Coefficient | Scalar) -> "Expr":
        if not isinstance(c, Coefficient):
            c = Coefficient.from_rational(c)
        if c.is_zero:
            return _ZERO_EXPR
        return Expr([(t, k * c) for t, k in self.terms])

    def __pow__(self, n: int) -> "Expr":
        if n == 0:
            return _ONE_EXPR
        if n < 0:
            return self._invert() ** (-n)
        out = self
        for _ in range(n - 1):
            out = out * self
        return out

    def _invert(self) -> "Expr":
        if len(self.terms) != 1:
            raise DivisionByExprError("cannot invert a sum of monomials")
        t, c = self.terms[0]
        inv = _make_term([(a, -ev) for a, ev in t])
        return Expr([(inv, ONE_COEFF / c)])

    def __truediv__(self, other: "Expr") -> "Expr":
        c = other.as_coefficient()
        if c is None:
            raise DivisionByExprError("division is only defined by "
                                      "coefficient-valued expressions")
        if c.is_zero:
            raise ZeroDivisionError("division by zero expression")
        return self.scale(ONE_COEFF / c)

    # -- substitution ------------------------------------------------------
    def substitute(self, rules: Mapping[Atom, "Expr"]) -> "Expr":
        """Simultaneous replacement of whole atoms by expressions.  Function
        arguments are rewritten recursively; replacements are not re-scanned."""
        if not rules:
            return self
        out = _ZERO_EXPR
        for t, c in self.terms:
            piece = Expr.from_coefficient(c)
            for atom, ev in t:
                rep = rules.get(atom)
                if rep is None and isinstance(atom, FunctionApp):
                    new_arg = atom.arg.substitute(rules)
                    if new_arg != atom.arg:
                        atom = FunctionApp(atom.name, atom.order, new_arg)
                        rep = rules.get(atom)
                if rep is None:
                    factor = Expr.from_atom(atom, ev)
                elif ev.is_constant:
                    factor = rep ** ev.base
                else:
                    factor = _symbolic_power(rep, ev)
                piece = piece * factor
                if piece.is_zero:
                    break
            out = out + piece
        return out

    def substitute_constants(self, values: Mapping[str, Scalar]) -> "Expr":
        """Specialize a subset of constants to exact rational values."""
        out: list[tuple[Term, Coefficient]] = []
        for t, c in self.terms:
            c2 = c.substitute(values)
            if c2.is_zero:
                continue
            factors: list[tuple[Atom, ExponentVector]] = []
            for atom, ev in t:
                if isinstance(atom, FunctionApp):
                    atom = FunctionApp(atom.name, atom.order,
                                       atom.arg.substitute_constants(values))
                sub = ev.substitute(values)
                if isinstance(sub, int):
                    if sub == 0:
                        continue
                    if sub < 0 and (isinstance(atom, FunctionApp)
                                    or (isinstance(atom, Jet) and not atom.param)):
                        raise ExponentError(
                            f"specialization gives negative power of {atom!r}")
                    ev = ExponentVector(sub, ())
                else:
                    ev = sub
                factors.append((atom, ev))
            out.append((_make_term(factors), c2))
        return Expr(out)

    # -- evaluation --------------------------------------------------------
    def eval_rational(self, atoms: Mapping[Atom, Scalar],
                      constants: Mapping[str, Scalar],
                      functions: Callable[[str, int, Fraction], Fraction] | None = None,
                      ) -> Fraction:
        """Exact evaluation at a rational point; the independent oracle for
        symbolic identities."""
        total = Fraction(0)
        for t, c in self.terms:
            val = c.evaluate(constants)
            for atom, ev in t:
                e = ev.substitute(constants)  # type: ignore[arg-type]
                if not isinstance(e, int):
                    missing = [n for n, _ in e.linear]
                    raise MissingAssignmentError(
                        f"no value for exponent constants {missing}")
                base = self._eval_atom(atom, atoms, constants, functions)
                if base == 0 and e < 0:
                    raise PoleError(f"zero base {atom!r} with negative exponent")
                val *= base ** e
                if val == 0:
                    break
            total += val
        return total

    def _eval_atom(self, atom: Atom, atoms: Mapping[Atom, Scalar],
                   constants: Mapping[str, Scalar],
                   functions) -> Fraction:
        if isinstance(atom, FunctionApp):
            arg = atom.arg.eval_rational(atoms, constants, functions)
            if functions is None:
                raise MissingAssignmentError(f"no function table for {atom.name}")
            v = functions(atom.name, atom.order, arg)
            if v is None:
                raise MissingAssignmentError(
                    f"no value for {atom.name}^({atom.order}) at {arg}")
            return Fraction(v)
        if atom in atoms:
            return Fraction(atoms[atom])
        raise MissingAssignmentError(f"no value for atom {atom!r}")


def _symbolic_power(rep: Expr, ev: ExponentVector) -> Expr:
    """rep ** ev for symbolic ev: defined for 0, 1, and unit monomials whose
    atoms all carry integer exponents."""
    if rep.is_zero:
        return Expr.zero()
    if rep == Expr.one():
        return Expr.one()
    if len(rep.terms) == 1:
        t, c = rep.terms[0]
        if c.is_one and all(f.is_constant for _, f in t):
            return Expr([(_make_term([(a, ev.scale(f.base)) for a, f in t]),
                          ONE_COEFF)])
    raise ExponentError(f"cannot raise {rep!r} to symbolic exponent")


_ZERO_EXPR = Expr([])
_ONE_EXPR = Expr([((), ONE_COEFF)])


# -- raw-tree normalization -------------------------------------------------
#
# Raw trees are nested tuples produced by the parser or built directly:
#   ('num', Fraction)            ('const', name)
#   ('atom', Atom)               ('func', name, order, raw)
#   ('add'|'sub'|'mul'|'div', raw, raw)
#   ('neg', raw)                 ('pow', raw, int | ExponentVector | raw)

Raw = tuple


def normalize(raw: Raw, roles: Mapping[str, str] | None = None) -> Expr:
    """Evaluate a raw tree into a canonical Expr.

    ``roles`` maps constant names to their role; exponent positions only
    accept integer-linear forms in exponent-role constants.
    """
    roles = roles or {}
    return _norm(raw, roles)


def _norm(raw: Raw, roles: Mapping[str, str]) -> Expr:
    tag = raw[0]
    if tag == "num":
        return Expr.from_rational(raw[1])
    if tag == "const":
        return Expr.from_coefficient(Coefficient.from_constant(raw[1]))
    if tag == "atom":
        return Expr.from_atom(raw[1])
    if tag == "func":
        return Expr.from_atom(FunctionApp(raw[1], raw[2], _norm(raw[3], roles)))
    if tag == "add":
        return _norm(raw[1], roles) + _norm(raw[2], roles)
    if tag == "sub":
        return _norm(raw[1], roles) - _norm(raw[2], roles)
    if tag == "neg":
        return -_norm(raw[1], roles)
    if tag == "mul":
        return _norm(raw[1], roles) * _norm(raw[2], roles)
    if tag == "div":
        return _norm(raw[1], roles) / _norm(raw[2], roles)
    if tag == "pow":
        base = _norm(raw[1], roles)
        ev = _as_exponent(raw[2], roles)
        if ev.is_constant:
            return base ** ev.base
        c = base.as_coefficient()
        if c is not None:
            raise ExponentError("symbolic exponent on a plain coefficient")
        return _monomial_symbolic_power(base, ev)
    raise ValueError(f"unknown raw node {tag!r}")


def _monomial_symbolic_power(base: Expr, ev: ExponentVector) -> Expr:
    if len(base.terms) != 1:
        raise ExponentError("symbolic exponent on a sum of monomials")
    t, c = base.terms[0]
    if not c.is_one:
        raise ExponentError("symbolic exponent on a non-unit coefficient")
    factors = []
    for a, f in t:
        if not f.is_constant:
            raise ExponentError("nested symbolic exponents are not representable")
        factors.append((a, ev.scale(f.base)))
    return Expr([(_make_term(factors), ONE_COEFF)])


def _as_exponent(spec, roles: Mapping[str, str]) -> ExponentVector:
    if isinstance(spec, int):
        return ExponentVector(spec, ())
    if isinstance(spec, ExponentVector):
        ev = spec
    else:
        e = _norm(spec, roles)
        c = e.as_coefficient()
        if c is None:
            raise ExponentError("exponent must be coefficient-valued")
        allowed = {n for n, r in roles.items() if r == "exponent"}
        if not c.is_integer_linear(allowed):
            raise ExponentError(
                "exponent must be an integer-linear form in exponent constants")
        base, lin = c.linear_parts()
        ev = ExponentVector(base, tuple(sorted(lin.items())))
    bad = [n for n, _ in ev.linear if roles.get(n) != "exponent"]
    if bad:
        raise ExponentError(f"non-exponent constants in exponent: {bad}")
    return ev


# -- derivations ------------------------------------------------------------

def derive(e: Expr, atom_rule: Callable[[Atom], Expr]) -> Expr:
    """Apply a derivation defined by its action on coordinate and jet atoms.
    Function applications follow the chain rule through their arguments."""
    out = _ZERO_EXPR
    for t, coeff in e.terms:
        for i, (atom, ev) in enumerate(t):
            if isinstance(atom, FunctionApp):
                inner = derive(atom.arg, atom_rule)
                if inner.is_zero:
                    continue
                d_atom = Expr.from_atom(
                    FunctionApp(atom.name, atom.order + 1, atom.arg)) * inner
            else:
                d_atom = atom_rule(atom)
                if d_atom is None or d_atom.is_zero:
                    continue
            rest = list(t[:i] + t[i + 1:])
            low = ev.shift(-1)
            if not low.is_zero:
                rest.append((atom, low))
            piece = Expr([(_make_term(rest), coeff * ev.as_coefficient())])
            out = out + piece * d_atom
    return out


def partial_atom(e: Expr, atom: Atom) -> Expr:
    """Partial derivative with respect to a coordinate or jet atom, treating
    all other atoms as independent (chain rule through function arguments)."""
    if isinstance(atom, FunctionApp):
        raise ValueError("partial_atom expects a coordinate or jet atom")
    return derive(e, lambda a: _ONE_EXPR if a == atom else _ZERO_EXPR)


def substitute_function(e: Expr, name: str,
                        rule: Callable[[int, Expr], Expr]) -> Expr:
    """Replace every application of the function symbol ``name``.

    ``rule`` receives the derivative order and the (already rewritten)
    argument and must return the replacement expression."""
    rules: dict[Atom, Expr] = {}
    for atom in e.atoms():
        if isinstance(atom, FunctionApp) and atom.name == name:
            arg = substitute_function(atom.arg, name, rule)
            rules[atom] = rule(atom.order, arg)
    return e.substitute(rules)
