"""Jet-space calculus: signatures, total derivatives, variations, and the
Euler-Lagrange operator.

Derivative bookkeeping uses distinct multi-indices with no combinatorial
multiplicity factors; the Euler-Lagrange sum runs over the distinct jet atoms
that actually occur.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Iterable, Mapping

from .errors import DerivativeOfParameterError, NameCollisionError
from .expr import (Atom, ConstantSymbol, Coordinate, EMPTY_INDEX, Expr,
                   FunctionApp, Jet, MultiIndex, derive, partial_atom)
from .ratfunc import Coefficient, ZERO_COEFF


@dataclass(frozen=True)
class SystemSignature:
    """Declares coordinates, fields, parameters, constants and function
    symbols.  A parameter listed in ``fields`` has been promoted to a
    dynamical field; unpromoted parameters are constants for total
    derivatives and carry only zero-order atoms."""

    independents: tuple[str, ...]
    fields: tuple[str, ...]
    parameters: tuple[str, ...] = ()
    constants: tuple[ConstantSymbol, ...] = ()
    functions: tuple[str, ...] = ()

    def __post_init__(self):
        groups = [self.independents, self.fields, self.parameters,
                  tuple(c.name for c in self.constants), self.functions]
        seen: set[str] = set()
        for group in groups:
            for name in group:
                if name in seen and not (group is self.parameters
                                         and name in self.fields):
                    raise NameCollisionError(f"name {name!r} declared twice")
                seen.add(name)
        # promoted parameters legitimately appear in both fields and parameters
        promoted = set(self.fields) & set(self.parameters)
        plain = set(self.fields) - promoted
        if plain & set(self.parameters):
            raise NameCollisionError("field/parameter overlap")

    # -- lookups -----------------------------------------------------------
    def is_parameter(self, name: str) -> bool:
        return name in self.parameters

    def is_promoted(self, name: str) -> bool:
        return name in self.parameters and name in self.fields

    def roles(self) -> dict[str, str]:
        return {c.name: c.role for c in self.constants}

    def exponent_constants(self) -> set[str]:
        return {c.name for c in self.constants if c.role == "exponent"}

    # -- atom builders -----------------------------------------------------
    def coordinate(self, name: str) -> Expr:
        if name not in self.independents:
            raise KeyError(f"unknown coordinate {name!r}")
        return Expr.from_atom(Coordinate(name))

    def jet(self, field: str, index: MultiIndex = EMPTY_INDEX) -> Jet:
        if field in self.parameters:
            if index.order and field not in self.fields:
                raise DerivativeOfParameterError(
                    f"parameter {field!r} carries only zero-order atoms")
            return Jet(field, index, param=True)
        if field in self.fields:
            return Jet(field, index)
        raise KeyError(f"unknown field {field!r}")

    def field_expr(self, field: str, *directions: str) -> Expr:
        return Expr.from_atom(self.jet(field, MultiIndex.of(*directions)))

    # -- extension ---------------------------------------------------------
    def with_fields(self, names: Iterable[str]) -> "SystemSignature":
        names = tuple(names)
        taken = (set(self.independents) | set(self.fields)
                 | set(self.parameters) | {c.name for c in self.constants}
                 | set(self.functions))
        for n in names:
            if n in taken:
                raise NameCollisionError(f"fresh field {n!r} already declared")
        return replace(self, fields=self.fields + names)

    def with_parameters(self, names: Iterable[str]) -> "SystemSignature":
        names = tuple(names)
        taken = (set(self.independents) | set(self.fields)
                 | set(self.parameters) | {c.name for c in self.constants}
                 | set(self.functions))
        for n in names:
            if n in taken:
                raise NameCollisionError(f"parameter {n!r} already declared")
        return replace(self, parameters=self.parameters + names)

    def promote(self, names: Iterable[str]) -> "SystemSignature":
        names = tuple(names)
        for n in names:
            if n not in self.parameters:
                raise KeyError(f"{n!r} is not a declared parameter")
            if n in self.fields:
                raise NameCollisionError(f"parameter {n!r} already promoted")
        return replace(self, fields=self.fields + names)


# A characteristic assigns a variation expression to field/parameter names.
Characteristic = Mapping[str, Expr]


def check_characteristic(sig: SystemSignature, delta: Characteristic) -> None:
    for name in delta:
        if name not in sig.fields and name not in sig.parameters:
            raise KeyError(f"characteristic names unknown field {name!r}")


def total_derivative(sig: SystemSignature, e: Expr, direction: str) -> Expr:
    """Total derivative D_mu: moves coordinates, appends jet indices, and is
    constant on unpromoted parameters and declared constants."""
    if direction not in sig.independents:
        raise KeyError(f"unknown direction {direction!r}")
    promoted = set(sig.fields)

    def rule(a: Atom) -> Expr:
        if isinstance(a, Coordinate):
            return Expr.one() if a.name == direction else Expr.zero()
        if a.param and a.field not in promoted:
            return Expr.zero()
        return Expr.from_atom(Jet(a.field, a.index.bump(direction), a.param))

    return derive(e, rule)


def prolong(sig: SystemSignature, e: Expr, index: MultiIndex) -> Expr:
    """Apply D_J for a multi-index J (directions commute)."""
    for direction in index.directions():
        e = total_derivative(sig, e, direction)
    return e


def variation(sig: SystemSignature, e: Expr, delta: Characteristic) -> Expr:
    """First-order variation along a characteristic: each jet atom moves by
    the prolonged characteristic of its field."""
    check_characteristic(sig, delta)
    cache: dict[tuple[str, MultiIndex], Expr] = {}

    def rule(a: Atom) -> Expr:
        if isinstance(a, Coordinate):
            return Expr.zero()
        if a.field not in delta:
            return Expr.zero()
        key = (a.field, a.index)
        if key not in cache:
            cache[key] = prolong(sig, delta[a.field], a.index)
        return cache[key]

    return derive(e, rule)


def euler_lagrange(sig: SystemSignature, e: Expr, field: str) -> Expr:
    """E^field(e) = sum over distinct jet atoms of (-D)_J d(e)/d(jet)."""
    if field not in sig.fields and field not in sig.parameters:
        raise KeyError(f"unknown field {field!r}")
    total = Expr.zero()
    for index in sorted(e.jet_indices(field),
                        key=lambda j: (j.order, j.counts)):
        slot = partial_atom(e, sig.jet(field, index))
        if slot.is_zero:
            continue
        moved = prolong(sig, slot, index)
        if index.order % 2:
            moved = -moved
        total = total + moved
    return total


def scaling_weight(sig: SystemSignature, e: Expr,
                   delta: Characteristic) -> Coefficient | None:
    """The weight s with variation(e) = s*e, if e is homogeneous; None
    otherwise.  The zero expression gets weight 0."""
    if e.is_zero:
        return ZERO_COEFF
    v = variation(sig, e, delta)
    t0, c0 = e.terms[0]
    v_terms = dict(v.terms)
    s = v_terms.get(t0, ZERO_COEFF) / c0
    return s if (v - e.scale(s)).is_zero else None


def is_total_divergence(sig: SystemSignature, e: Expr) -> bool:
    """Exactness test: the Euler operator of every field annihilates e."""
    return all(euler_lagrange(sig, e, f).is_zero for f in sig.fields)


def linearize(sig: SystemSignature, equations: Mapping[str, Expr],
              fresh: Mapping[str, str] | None = None,
              ) -> tuple[SystemSignature, dict[str, Expr], Characteristic]:
    """Linearized equations: fresh fields v_i and G^a = variation of F^a
    along delta u_i = v_i.  Returns (extended signature, G, delta)."""
    if fresh is None:
        fresh = {f: f"v_{f}" for f in sig.fields}
    new_sig = sig.with_fields(fresh[f] for f in sig.fields if f in fresh)
    delta = {f: Expr.from_atom(new_sig.jet(v)) for f, v in fresh.items()}
    lin = {label: variation(new_sig, F, delta)
           for label, F in equations.items()}
    return new_sig, lin, delta
