"""Shared test utilities.

The central tool is exact evaluation at random rational points: a claimed
identity lhs == rhs is confirmed by evaluating both sides separately through
Fraction arithmetic, never by evaluating the (already normalized, hence
trivially empty) difference.  On-shell claims are confirmed at points that
satisfy the solved form: free jet atoms get random values, solved atoms get
the value of their own reduced form.
"""

from __future__ import annotations

import random
from fractions import Fraction

from jetflux import (Coefficient, Current, Expr, FunctionApp, Jet,
                     MultiIndex, Multiplier, SystemSignature, on_shell_reduce)
from jetflux.expr import Coordinate

POINTS = 20


def random_fraction(rng: random.Random, nonzero: bool = True) -> Fraction:
    num = rng.randint(-9, 9)
    while nonzero and num == 0:
        num = rng.randint(-9, 9)
    return Fraction(num, rng.randint(1, 9))


def constant_values(sig: SystemSignature, rng: random.Random) -> dict:
    """Exponent constants get small distinct integers (so symbolic exponents
    evaluate to integers), generic constants random nonzero rationals."""
    values = {}
    exponent = 3
    for c in sig.constants:
        if c.role == "exponent":
            values[c.name] = exponent
            exponent += 1
        else:
            values[c.name] = random_fraction(rng)
    return values


def function_table(rng: random.Random):
    """Deterministic-per-point random table: one value per (symbol,
    derivative order, argument value)."""
    cache: dict = {}

    def table(name: str, order: int, arg: Fraction) -> Fraction:
        key = (name, order, arg)
        if key not in cache:
            cache[key] = random_fraction(rng)
        return cache[key]

    return table


def _flatten(objs) -> list[Expr]:
    exprs: list[Expr] = []
    for obj in objs:
        if isinstance(obj, Expr):
            exprs.append(obj)
        elif isinstance(obj, (Current, Multiplier)):
            exprs.extend(e for _, e in obj.components)
        else:
            exprs.extend(_flatten(obj))
    return exprs


def free_point(sig: SystemSignature, objs, rng: random.Random):
    """Random values for every atom occurring in the given expressions."""
    atoms: dict = {}
    stack = [a for e in _flatten(objs) for a in e.atoms()]
    while stack:
        a = stack.pop()
        if isinstance(a, FunctionApp):
            stack.extend(a.arg.atoms())
        elif a not in atoms:
            atoms[a] = random_fraction(rng)
    return atoms, constant_values(sig, rng), function_table(rng)


def on_shell_point(sys, objs, rng: random.Random):
    """Random values consistent with the solved form: irreducible atoms are
    free, reducible atoms take the value of their normal form."""
    sig = sys.sig
    free: dict = {}
    pinned: dict = {}
    stack = [a for e in _flatten(objs) for a in e.atoms()]
    seen = set()
    while stack:
        a = stack.pop()
        if a in seen:
            continue
        seen.add(a)
        if isinstance(a, FunctionApp):
            stack.extend(a.arg.atoms())
            continue
        if not isinstance(a, Jet):
            free[a] = random_fraction(rng)
            continue
        image = on_shell_reduce(sys, Expr.from_atom(a))
        if (image - Expr.from_atom(a)).is_zero:
            free[a] = random_fraction(rng)
        else:
            pinned[a] = image
            stack.extend(image.atoms())
    constants = constant_values(sig, rng)
    table = function_table(rng)
    values = dict(free)
    for a, image in pinned.items():
        values[a] = image.eval_rational(values, constants, table)
    return values, constants, table


def assert_equal_at_points(sig: SystemSignature, lhs, rhs,
                           points: int = POINTS, seed: int = 0) -> None:
    """Both sides evaluate equal at `points` random rational points."""
    rng = random.Random(seed)
    pairs = list(zip(_flatten([lhs]), _flatten([rhs])))
    assert pairs, "nothing to compare"
    for _ in range(points):
        atoms, constants, table = free_point(sig, [lhs, rhs], rng)
        for a, b in pairs:
            assert (a.eval_rational(atoms, constants, table)
                    == b.eval_rational(atoms, constants, table))


def assert_zero_on_shell_at_points(sys, obj, points: int = POINTS,
                                   seed: int = 0) -> None:
    """The (unreduced) expressions evaluate to zero at `points` random
    solved-form-consistent points."""
    rng = random.Random(seed)
    exprs = _flatten([obj])
    for _ in range(points):
        values, constants, table = on_shell_point(sys, exprs, rng)
        for e in exprs:
            assert e.eval_rational(values, constants, table) == 0


def random_expr(sig: SystemSignature, rng: random.Random, pool,
                max_terms: int = 3, max_factors: int = 2,
                max_power: int = 2) -> Expr:
    """Small random polynomial in the given atom pool."""
    total = Expr.zero()
    for _ in range(rng.randint(1, max_terms)):
        term = Expr.from_coefficient(
            Coefficient.from_rational(random_fraction(rng)))
        for _ in range(rng.randint(0, max_factors)):
            atom = rng.choice(pool)
            term = term * Expr.from_atom(atom) ** rng.randint(1, max_power)
        total = total + term
    return total


def jet_pool(sig: SystemSignature, field: str, max_order: int = 2):
    """All jet atoms of one field up to the given order, plus coordinates."""
    pool = [Coordinate(name) for name in sig.independents]
    indices = [MultiIndex.of()]
    for _ in range(max_order):
        indices.extend(i.bump(d) for i in list(indices)
                       for d in sig.independents)
    for index in {i for i in indices}:
        pool.append(sig.jet(field, index))
    return pool
