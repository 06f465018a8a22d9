"""Canonical text rendering of expressions.

The output uses the same grammar the parser accepts, and rendering a parsed
expression reproduces the canonical form, so parse -> render -> parse is the
identity on canonical expressions.
"""

from __future__ import annotations

from fractions import Fraction

from .expr import (Coordinate, ExponentVector, Expr, FunctionApp, Jet)
from .ratfunc import Coefficient, Poly


def _frac_str(f: Fraction) -> str:
    return str(f.numerator) if f.denominator == 1 else f"{f.numerator}/{f.denominator}"


def _poly_term_str(mono, coeff: Fraction) -> str:
    parts = []
    if coeff != 1 or not mono:
        parts.append(_frac_str(coeff))
    for name, e in mono:
        parts.append(name if e == 1 else f"{name}^{e}")
    return "*".join(parts)


def _poly_str(p: Poly) -> str:
    if p.is_zero:
        return "0"
    pieces = []
    for i, (mono, c) in enumerate(p.terms):
        if i == 0:
            pieces.append(_poly_term_str(mono, c))
        elif c < 0:
            pieces.append(" - " + _poly_term_str(mono, -c))
        else:
            pieces.append(" + " + _poly_term_str(mono, c))
    return "".join(pieces)


def _poly_factor_str(p: Poly) -> str:
    """A polynomial in multiplicative position."""
    if len(p.terms) > 1:
        return "(" + _poly_str(p) + ")"
    return _poly_str(p)


def _poly_divisor_str(p: Poly) -> str:
    """A polynomial in divisor position: bare only for a single power."""
    if len(p.terms) == 1:
        mono, c = p.terms[0]
        if c == 1 and len(mono) == 1:
            name, e = mono[0]
            return name if e == 1 else f"{name}^{e}"
        if not mono:
            return _frac_str(c)
    return "(" + _poly_str(p) + ")"


def render_coefficient(c: Coefficient) -> str:
    s = _poly_factor_str(c.num)
    if not c.den.is_constant:
        s += "/" + _poly_divisor_str(c.den)
    return s


def render_exponent(ev: ExponentVector) -> str:
    if ev.is_constant:
        return str(ev.base) if ev.base >= 0 else f"({ev.base})"
    if ev.base == 0 and len(ev.linear) == 1 and ev.linear[0][1] == 1:
        return ev.linear[0][0]
    pieces = []
    for name, coeff in ev.linear:
        if not pieces:
            if coeff == 1:
                pieces.append(name)
            elif coeff == -1:
                pieces.append("-" + name)
            else:
                pieces.append(f"{coeff}*{name}")
        else:
            sign = " + " if coeff > 0 else " - "
            mag = abs(coeff)
            pieces.append(sign + (name if mag == 1 else f"{mag}*{name}"))
    if ev.base:
        pieces.append(f" + {ev.base}" if ev.base > 0 else f" - {-ev.base}")
    return "(" + "".join(pieces) + ")"


def _atom_str(atom) -> str:
    if isinstance(atom, Coordinate):
        return atom.name
    if isinstance(atom, Jet):
        if not atom.index.counts:
            return atom.field
        return atom.field + "[" + ",".join(atom.index.directions()) + "]"
    assert isinstance(atom, FunctionApp)
    return atom.name + "'" * atom.order + "(" + render(atom.arg) + ")"


def _power_str(atom, ev: ExponentVector) -> str:
    s = _atom_str(atom)
    if ev == ExponentVector(1, ()):
        return s
    return s + "^" + render_exponent(ev)


def _is_negative(c: Coefficient) -> bool:
    return c.num.leading()[1] < 0


def render(e: Expr) -> str:
    """Canonical text form of an expression."""
    if e.is_zero:
        return "0"
    pieces = []
    for term, coeff in e.terms:
        neg = _is_negative(coeff)
        mag = -coeff if neg else coeff
        parts = []
        if not term or not mag.is_one:
            parts.append(render_coefficient(mag))
        parts.extend(_power_str(a, ev) for a, ev in term)
        body = "*".join(parts)
        if not pieces:
            pieces.append("-" + body if neg else body)
        else:
            pieces.append((" - " if neg else " + ") + body)
    return "".join(pieces)


def render_current(components: dict[str, Expr]) -> str:
    return "(" + ", ".join(f"{mu}: {render(ex)}" for mu, ex in components.items()) + ")"
