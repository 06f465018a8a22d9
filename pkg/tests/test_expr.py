"""Normal-form arithmetic on jet expressions."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
import hypothesis.strategies as st

from jetflux import (Coefficient, ConstantSymbol, ExponentVector, Expr,
                     FunctionApp, MultiIndex, SystemSignature, partial_atom,
                     substitute_function)
from jetflux.errors import (ExponentError, MissingAssignmentError, PoleError)

from helpers import free_point, jet_pool, random_expr, random_fraction

SIG = SystemSignature(
    independents=("t", "x"),
    fields=("u", "w"),
    parameters=("g",),
    constants=(ConstantSymbol("m"), ConstantSymbol("p", "exponent")),
    functions=("V",),
)

POOL = jet_pool(SIG, "u", 2) + jet_pool(SIG, "w", 1) + [SIG.jet("g")]


@st.composite
def exprs(draw):
    rng = random.Random(draw(st.integers(0, 2 ** 32)))
    return random_expr(SIG, rng, POOL)


@given(exprs(), exprs())
def test_addition_commutes(a, b):
    assert ((a + b) - (b + a)).is_zero


@given(exprs(), exprs(), exprs())
@settings(max_examples=50)
def test_multiplication_distributes(a, b, c):
    assert (a * (b + c) - (a * b + a * c)).is_zero


@given(exprs(), exprs(), exprs())
@settings(max_examples=50)
def test_multiplication_associates(a, b, c):
    assert ((a * b) * c - a * (b * c)).is_zero


@given(exprs())
def test_subtraction_of_self_is_zero(a):
    assert (a - a).is_zero
    assert (a + (-a)).is_zero


@given(exprs())
def test_normal_form_equality_matches_evaluation(a):
    rng = random.Random(7)
    b = -(-a) + Expr.zero()
    assert a == b
    atoms, constants, table = free_point(SIG, [a], rng)
    assert a.eval_rational(atoms, constants, table) \
        == b.eval_rational(atoms, constants, table)


def test_powers_merge():
    u = Expr.from_atom(SIG.jet("u"))
    assert (u * u - u ** 2).is_zero
    assert ((u ** 3) * (u ** 2) - u ** 5).is_zero
    assert (u ** 0 - Expr.one()).is_zero


def test_symbolic_exponents_combine():
    u = Expr.from_atom(SIG.jet("u"))
    up = Expr.from_atom(SIG.jet("u"), ExponentVector.of(0, p=1))
    # u^p * u^2 == u^(p+2)
    expected = Expr.from_atom(SIG.jet("u"), ExponentVector.of(2, p=1))
    assert (up * u ** 2 - expected).is_zero


def test_partial_atom_power_rule():
    u = SIG.jet("u")
    up1 = Expr.from_atom(u, ExponentVector.of(1, p=1))  # u^(p+1)
    d = partial_atom(up1, u)
    expected = Expr.from_atom(u, ExponentVector.of(0, p=1)).scale(
        Coefficient.from_constant("p") + Coefficient.from_rational(1))
    assert (d - expected).is_zero


@given(exprs(), exprs())
@settings(max_examples=50)
def test_partial_atom_is_a_derivation(a, b):
    u = SIG.jet("u")
    lhs = partial_atom(a * b, u)
    rhs = partial_atom(a, u) * b + a * partial_atom(b, u)
    assert (lhs - rhs).is_zero


def test_partial_atom_through_function_arguments():
    phi = Expr.from_atom(SIG.jet("u"))
    inner = phi * phi  # argument u^2
    v = Expr.from_atom(FunctionApp("V", 0, inner))
    d = partial_atom(v, SIG.jet("u"))
    expected = Expr.from_atom(FunctionApp("V", 1, inner)) * phi.scale(2)
    assert (d - expected).is_zero


def test_substitute_atom():
    u, w = SIG.jet("u"), SIG.jet("w")
    e = Expr.from_atom(u) ** 2 + Expr.from_atom(w)
    image = e.substitute({u: Expr.from_atom(w)})
    expected = Expr.from_atom(w) ** 2 + Expr.from_atom(w)
    assert (image - expected).is_zero


def test_substitute_into_symbolic_power():
    u, w = SIG.jet("u"), SIG.jet("w")
    up = Expr.from_atom(u, ExponentVector.of(1, p=1))  # u^(p+1)
    image = up.substitute({u: Expr.from_atom(w) ** 2})
    expected = Expr.from_atom(w, ExponentVector.of(2, p=2))  # w^(2p+2)
    assert (image - expected).is_zero


def test_substitute_zero_into_symbolic_power():
    u = SIG.jet("u")
    up = Expr.from_atom(u, ExponentVector.of(1, p=1))
    assert up.substitute({u: Expr.zero()}).is_zero


def test_substitute_sum_into_symbolic_power_is_rejected():
    u, w = SIG.jet("u"), SIG.jet("w")
    up = Expr.from_atom(u, ExponentVector.of(0, p=1))
    with pytest.raises(ExponentError):
        up.substitute({u: Expr.from_atom(w) + Expr.one()})


def test_substitute_rewrites_function_arguments():
    u, w = SIG.jet("u"), SIG.jet("w")
    e = Expr.from_atom(FunctionApp("V", 1, Expr.from_atom(u)))
    image = e.substitute({u: Expr.from_atom(w)})
    expected = Expr.from_atom(FunctionApp("V", 1, Expr.from_atom(w)))
    assert (image - expected).is_zero


def test_substitute_constants_specializes_exponents():
    u = SIG.jet("u")
    up = Expr.from_atom(u, ExponentVector.of(-1, p=1))  # u^(p-1)
    at3 = up.substitute_constants({"p": 3})
    assert (at3 - Expr.from_atom(u) ** 2).is_zero


def test_substitute_function_with_power_rule():
    u = Expr.from_atom(SIG.jet("u"))
    e = Expr.from_atom(FunctionApp("V", 1, u * u.scale(2)))

    def rule(order, arg):
        assert order == 1
        return arg ** 2

    image = substitute_function(e, "V", rule)
    assert (image - (u * u.scale(2)) ** 2).is_zero


def test_eval_rational_handles_negative_exponents():
    g = SIG.jet("g")  # only parameter atoms may carry negative exponents
    e = Expr.from_atom(g, ExponentVector(-2, ()))
    assert e.eval_rational({g: Fraction(2)}, {}) == Fraction(1, 4)
    with pytest.raises(PoleError):
        e.eval_rational({g: Fraction(0)}, {})


def test_negative_powers_of_field_atoms_are_rejected():
    with pytest.raises(ExponentError):
        Expr.from_atom(SIG.jet("u"), ExponentVector(-2, ()))


def test_eval_rational_requires_assignments():
    u = SIG.jet("u")
    e = Expr.from_atom(u, ExponentVector.of(0, p=1))
    with pytest.raises(MissingAssignmentError):
        e.eval_rational({u: Fraction(2)}, {})  # p unassigned
    with pytest.raises(MissingAssignmentError):
        Expr.from_atom(u).eval_rational({}, {})  # u unassigned


def test_atoms_iteration_is_deep():
    u, w = SIG.jet("u"), SIG.jet("w")
    e = Expr.from_atom(FunctionApp("V", 0, Expr.from_atom(u)))
    e = e * Expr.from_atom(w)
    found = set(e.atoms())
    assert u in found and w in found
