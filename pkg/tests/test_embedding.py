"""Embedding into a variational system: auxiliary Lagrangian, adjoint
symmetries, current splits and the varied-current certificate."""

import pytest

from jetflux import (Current, Expr, Multiplier, adjoint_determining,
                     auxiliary_lagrangian, check_adjoint_symmetry,
                     check_system_symmetry, divergence, embedding_current,
                     euler_lagrange, linearization_current,
                     multiplier_symmetry_check, parse_expression,
                     source_product, split_embedding_current,
                     theorem1_certificate, variation)
from jetflux.registry import document

from helpers import (assert_equal_at_points, assert_zero_on_shell_at_points,
                     on_shell_point)


def test_euler_equations_of_the_auxiliary_lagrangian_are_the_system():
    sys = document("gkdv").system
    aux_sig, lhat, names = auxiliary_lagrangian(sys)
    for label, F in sys.equations:
        el = euler_lagrange(aux_sig, lhat, names[label])
        assert (el - F).is_zero


def test_auxiliary_names_avoid_collisions():
    doc = document("gkdv")
    aux_sig, _, names = auxiliary_lagrangian(doc.system)
    assert set(names) == {label for label, _ in doc.system.equations}
    assert not set(names.values()) & set(doc.system.sig.fields)


def test_adjoint_determining_is_the_formal_adjoint():
    # for u[t] - u[x,x] the adjoint linearization is -rho[t] - rho[x,x]
    from jetflux import DESystem, MultiIndex, SystemSignature
    sig = SystemSignature(independents=("t", "x"), fields=("u",))
    P = lambda s: parse_expression(s, sig)
    sys = DESystem.create(sig, {"F": P("u[t] - u[x,x]")},
                          {sig.jet("u", MultiIndex.of("t")): P("u[x,x]")})
    det = adjoint_determining(sys, {"F": "rho"})
    aux_sig = sig.with_fields(["rho"])
    Q = lambda s: parse_expression(s, aux_sig)
    assert (det["u"] - Q("-rho[t] - rho[x,x]")).is_zero


def test_multipliers_are_adjoint_symmetries():
    doc = document("gkdv")
    sys = doc.system
    for name in ("q1", "q2", "q3"):
        rep = check_adjoint_symmetry(sys, {"F": doc.multiplier(name)["F"]})
        assert rep.passed, name


def test_non_solution_of_adjoint_determining_is_rejected():
    doc = document("gkdv")
    sys = doc.system
    rep = check_adjoint_symmetry(sys, {"F": parse_expression("u[x]", sys.sig)})
    assert not rep.passed
    assert rep.checks[0].detail


def test_translations_are_symmetries_and_scaling_is_not():
    doc = document("gkdv")
    sys = doc.system
    P = lambda s: parse_expression(s, sys.sig)
    assert check_system_symmetry(sys, {"u": P("u[x]")}).passed
    assert check_system_symmetry(sys, {"u": P("u[t]")}).passed
    sc = doc.characteristic("sc")
    rep = check_system_symmetry(sys, sc)
    assert not rep.passed
    # the parameter entry is ignored; the residual is the unbalanced term
    assert rep.checks[0].detail == "p*g*u^p*u[x]"


def test_embedding_current_is_conserved_for_symmetry_and_adjoint_pairs():
    doc = document("gkdv")
    sys = doc.system
    P = lambda s: parse_expression(s, sys.sig)
    delta = {"u": P("u[x]")}
    for name in ("q1", "q2", "q3"):
        j = embedding_current(sys, {"F": doc.multiplier(name)["F"]}, delta)
        assert_zero_on_shell_at_points(sys, divergence(sys, j))
        red = divergence(sys, j)
        from jetflux import on_shell_reduce
        assert on_shell_reduce(sys, red).is_zero, name


def test_embedding_current_keeps_symbolic_rho_when_asked():
    sys = document("gkdv").system
    P = lambda s: parse_expression(s, sys.sig)
    j = embedding_current(sys, {"F": None}, {"u": P("u[x]")})
    names = {a.field for e in (j["t"], j["x"]) for a in e.atoms()
             if hasattr(a, "field")}
    assert "rho" in names


def test_split_parts_sum_to_the_full_boundary_current():
    doc = document("gkdv")
    sys = doc.system
    sc = doc.characteristic("sc")
    for name in ("q2", "q3"):
        frozen_source, frozen_multiplier, full = split_embedding_current(
            sys, doc.multiplier(name), sc)
        assert (frozen_source + frozen_multiplier - full).is_zero
        assert_equal_at_points(sys.sig, frozen_source + frozen_multiplier,
                               full)


def test_frozen_source_part_vanishes_on_solutions():
    doc = document("gkdv")
    sys = doc.system
    P = lambda s: parse_expression(s, sys.sig)
    frozen_source, _, _ = split_embedding_current(
        sys, doc.multiplier("q3"), {"u": P("u[x]")})
    assert_zero_on_shell_at_points(sys, frozen_source)


def test_theorem1_certificate_for_a_translation():
    doc = document("gkdv")
    sys = doc.system
    P = lambda s: parse_expression(s, sys.sig)
    delta = {"u": P("u[x]")}
    for q, J in (("q1", "J1"), ("q2", "J2"), ("q3", "J3")):
        rep = theorem1_certificate(sys, doc.multiplier(q), doc.current(J),
                                   delta)
        assert rep.passed, (q, rep.to_text())


def test_theorem1_rejects_a_non_symmetry():
    doc = document("gkdv")
    sys = doc.system
    rep = theorem1_certificate(sys, doc.multiplier("q2"), doc.current("J2"),
                               {"u": Expr.from_atom(sys.sig.jet("u"))})
    assert not rep.passed
    names = {c.name: c.passed for c in rep.checks}
    assert not names["characteristic is a system symmetry"]


def test_theorem1_fq_preserving_mode_accepts_weaker_hypothesis():
    doc = document("gkdv")
    sys = doc.system
    P = lambda s: parse_expression(s, sys.sig)
    rep = theorem1_certificate(sys, doc.multiplier("q1"), doc.current("J1"),
                               {"u": P("u[x]")}, fq_preserving_only=True)
    assert rep.passed
    names = [c.name for c in rep.checks]
    assert "variation of F.q vanishes on solutions" in names
    assert "characteristic is a system symmetry" not in names


def test_multiplier_symmetry_check_certifies_every_pair():
    doc = document("gkdv")
    sys = doc.system
    for q, J in (("q1", "J1"), ("q2", "J2"), ("q3", "J3")):
        rep = multiplier_symmetry_check(sys, doc.multiplier(q),
                                        doc.current(J))
        assert rep.passed, q


def test_multiplier_symmetry_check_fails_for_a_mismatched_current():
    doc = document("gkdv")
    rep = multiplier_symmetry_check(doc.system, doc.multiplier("q2"),
                                    doc.current("J3"))
    assert not rep.passed


def test_linearization_current_is_bilinear():
    sys = document("gkdv").system
    j = linearization_current(sys, v={"u": "v"})
    sig2 = sys.sig.with_fields(["v", "rho"])
    two = j.map(lambda e: e.substitute(
        {a: Expr.from_atom(a).scale(2) for a in e.atoms()
         if hasattr(a, "field") and a.field == "v"}))
    assert (two - j.scale(2)).is_zero
