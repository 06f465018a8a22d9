"""Integration by parts, variation splits and Noether currents."""

import random

import pytest

from jetflux import (Current, DESystem, Expr, IBPInput, MultiIndex,
                     SymmetryWitness, SystemSignature, check_lagrangian_symmetry,
                     divergence, euler_lagrange, gauss_current, ibp_contract,
                     ibp_split, lagrangian_slots, noether_current,
                     parse_expression, total_derivative, transposed_sum,
                     variation, variation_split)
from jetflux.errors import NoSolvedFormError
from jetflux.registry import document

from helpers import assert_equal_at_points, jet_pool, random_expr


def _sig():
    return SystemSignature(independents=("t", "x"), fields=("u", "w"))


def _random_input(sig, rng, max_order=2):
    pool = jet_pool(sig, "u", 2) + jet_pool(sig, "w", 1)
    indices = [MultiIndex(()), MultiIndex.of("t"), MultiIndex.of("x"),
               MultiIndex.of("x", "x"), MultiIndex.of("t", "x")]
    slots = {}
    eps = {}
    for label in ("a", "b"):
        family = {idx: random_expr(sig, rng, pool)
                  for idx in rng.sample(indices, rng.randint(1, 4))}
        slots[label] = family
        eps[label] = random_expr(sig, rng, pool)
    return IBPInput.of(slots, eps)


def test_ibp_split_reassembles_the_contraction():
    sig = _sig()
    rng = random.Random(4)
    for _ in range(25):
        G = _random_input(sig, rng)
        hat, current = ibp_split(sig, G)
        total = divergence(sig, current)
        for label, eps in G.eps:
            total = total + hat[label] * eps
        assert (ibp_contract(sig, G) - total).is_zero


def test_transposed_sum_matches_euler_on_lagrangian_slots():
    # for L depending on one field, sum_J (-D)_J dL/du_J is E_u(L)
    sig = _sig()
    rng = random.Random(9)
    pool = jet_pool(sig, "u", 2)
    for _ in range(10):
        L = random_expr(sig, rng, pool, max_terms=3)
        family = lagrangian_slots(sig, L, ("u",))["u"]
        assert (transposed_sum(sig, family) - euler_lagrange(sig, L, "u")).is_zero


def test_gauss_current_implements_the_identity_for_one_slot():
    # G * D_{xx}(eps) = (D_xx G) * eps + Div(0, G*D_x(eps) - (D_x G)*eps)
    sig = _sig()
    P = lambda s: parse_expression(s, sig)
    G, eps = P("u*u[x]"), P("w^2")
    slots = {"a": {MultiIndex.of("x", "x"): G}}
    j = gauss_current(sig, slots, {"a": eps})
    expected_x = G * total_derivative(sig, eps, "x") \
        - total_derivative(sig, G, "x") * eps
    assert j["t"].is_zero
    assert (j["x"] - expected_x).is_zero


def test_variation_split_identity_on_random_lagrangians():
    sig = _sig()
    rng = random.Random(21)
    pool = jet_pool(sig, "u", 2) + jet_pool(sig, "w", 1)
    delta = {"u": parse_expression("u[x]", sig),
             "w": parse_expression("u*w", sig)}
    for _ in range(15):
        L = random_expr(sig, rng, pool, max_terms=3)
        el, j = variation_split(sig, L, delta)
        resid = variation(sig, L, delta) - el - divergence(sig, j)
        assert resid.is_zero
    L = random_expr(sig, rng, pool, max_terms=3)
    el, j = variation_split(sig, L, delta)
    assert_equal_at_points(sig, variation(sig, L, delta),
                           el + divergence(sig, j))


def test_euler_part_is_the_contracted_euler_derivative():
    sig = _sig()
    P = lambda s: parse_expression(s, sig)
    L = P("1/2*u[x]^2 - 1/2*u[t]^2 + u*w[x]")
    delta = {"u": P("u[t]"), "w": P("w")}
    el, _ = variation_split(sig, L, delta)
    expected = euler_lagrange(sig, L, "u") * delta["u"] \
        + euler_lagrange(sig, L, "w") * delta["w"]
    assert (el - expected).is_zero


def test_time_translation_is_a_kg_lagrangian_symmetry():
    doc = document("kg-phi-n")
    sig = doc.system.sig
    L = doc.lagrangian("L")
    P = lambda s: parse_expression(s, sig)
    K = Current.of(sig, [L, Expr.zero()])
    w = SymmetryWitness({"phi": P("phi[t]")}, K)
    rep = check_lagrangian_symmetry(doc.system, L, w)
    assert rep.passed
    J, nrep = noether_current(doc.system, L, w)
    assert nrep.passed
    # the energy current: the certified identity makes it conserved on shell
    from jetflux import is_conserved_on_shell
    assert is_conserved_on_shell(doc.system, J).passed


def test_noether_current_matches_the_stored_energy_current():
    doc = document("kg-phi-n")
    sig = doc.system.sig
    L = doc.lagrangian("L")
    P = lambda s: parse_expression(s, sig)
    w = SymmetryWitness({"phi": P("phi[t]")},
                        Current.of(sig, [L, Expr.zero()]))
    J, rep = noether_current(doc.system, L, w)
    assert rep.passed
    assert (J - doc.current("J")).is_zero


def test_broken_witness_is_rejected():
    doc = document("kg-phi-n")
    sig = doc.system.sig
    L = doc.lagrangian("L")
    P = lambda s: parse_expression(s, sig)
    w = SymmetryWitness({"phi": P("phi[t]")},
                        Current.of(sig, [Expr.zero(), Expr.zero()]))
    rep = check_lagrangian_symmetry(doc.system, L, w)
    assert not rep.passed


def test_on_shell_mode_needs_a_solved_form():
    sig = _sig()
    P = lambda s: parse_expression(s, sig)
    L = P("1/2*u[x]^2")
    w = SymmetryWitness({"u": P("u[x]")},
                        Current.of(sig, [Expr.zero(), L]))
    with pytest.raises(NoSolvedFormError):
        check_lagrangian_symmetry(sig, L, w, mode="on-shell")


def test_unknown_mode_is_a_value_error():
    sig = _sig()
    P = lambda s: parse_expression(s, sig)
    L = P("1/2*u[x]^2")
    w = SymmetryWitness({"u": P("u[x]")}, Current.of(sig, [Expr.zero(), L]))
    with pytest.raises(ValueError):
        check_lagrangian_symmetry(sig, L, w, mode="sideways")


def test_on_shell_symmetry_accepts_weaker_witnesses():
    # scaling of the potential-free wave equation: variation(L) reduces to
    # Div K only modulo the equation of motion
    doc = document("kg-phi-n")
    sig = doc.system.sig
    L = doc.lagrangian("L")
    P = lambda s: parse_expression(s, sig)
    tr = {"phi": P("phi[t]")}
    K = Current.of(sig, [L, Expr.zero()])
    rep = check_lagrangian_symmetry(doc.system, L, SymmetryWitness(tr, K),
                                    mode="on-shell")
    assert rep.passed
    assert "on-shell mode" in rep.notes
