"""Embedding a differential system into a variational one.

The auxiliary Lagrangian Lhat = sum_a F^a rho_a has the original equations as
its Euler-Lagrange equations for the rho_a, so every system embeds into a
variational one at the cost of auxiliary fields.  The conserved current of
interest contracts the jet-derivative slots of Lhat taken with respect to the
original fields only (rho held independent) against a symmetry
characteristic; afterwards rho is replaced by a concrete adjoint-symmetry or
multiplier, prolonged through the substitution.
"""

from __future__ import annotations

from typing import Mapping

from .expr import Expr, Jet
from .jets import (Characteristic, SystemSignature, euler_lagrange, linearize,
                   prolong, variation)
from .noether import gauss_current, lagrangian_slots, variation_split
from .render import render
from .report import Report
from .systems import (Current, DESystem, Multiplier, divergence,
                      on_shell_reduce, source_product,
                      verify_multiplier_current_pair)


def _sig_names(sig: SystemSignature) -> set[str]:
    return (set(sig.independents) | set(sig.fields) | set(sig.parameters)
            | {c.name for c in sig.constants} | set(sig.functions))


def _fresh(taken: set[str], base: str) -> str:
    name = base
    while name in taken:
        name = "_" + name
    taken.add(name)
    return name


def rho_names(sys: DESystem,
              given: Mapping[str, str] | None = None) -> dict[str, str]:
    """Deterministic auxiliary field name per equation label."""
    if given is not None:
        return dict(given)
    taken = _sig_names(sys.sig)
    single = len(sys.equations) == 1
    return {label: _fresh(taken, "rho" if single else f"rho_{label}")
            for label, _ in sys.equations}


def auxiliary_lagrangian(sys: DESystem,
                         rho: Mapping[str, str] | None = None,
                         ) -> tuple[SystemSignature, Expr, dict[str, str]]:
    """Signature extended by the auxiliary fields, Lhat = sum F^a rho_a, and
    the label -> auxiliary-name map."""
    names = rho_names(sys, rho)
    aux_sig = sys.sig.with_fields(names[label] for label, _ in sys.equations)
    lhat = Expr.zero()
    for label, F in sys.equations:
        lhat = lhat + F * Expr.from_atom(aux_sig.jet(names[label]))
    return aux_sig, lhat, names


def substitute_prolonged(sig: SystemSignature, e: Expr,
                         values: Mapping[str, Expr]) -> Expr:
    """Replace every jet of the named fields by the total-derivative
    prolongation of the corresponding value expression."""
    rules: dict[Jet, Expr] = {}
    for atom in e.atoms():
        if isinstance(atom, Jet) and atom.field in values:
            rules[atom] = prolong(sig, values[atom.field], atom.index)
    return e.substitute(rules) if rules else e


def adjoint_determining(sys: DESystem,
                        rho: Mapping[str, str] | None = None,
                        ) -> dict[str, Expr]:
    """Euler derivatives of Lhat with respect to the system fields, with the
    auxiliary fields kept independent (the adjoint linearization)."""
    aux_sig, lhat, _ = auxiliary_lagrangian(sys, rho)
    return {f: euler_lagrange(aux_sig, lhat, f) for f in sys.sig.fields}


def check_adjoint_symmetry(sys: DESystem,
                           rho_values: Mapping[str, Expr]) -> Report:
    """rho_values (one expression per equation label) solve the adjoint
    linearization on solutions of the system."""
    names = rho_names(sys)
    det = adjoint_determining(sys)
    by_field = {names[label]: rho_values[label] for label, _ in sys.equations}
    rep = Report("adjoint")
    for f, e in det.items():
        bound = substitute_prolonged(sys.sig, e, by_field)
        reduced = bound if bound.is_zero else on_shell_reduce(sys, bound)
        rep.add(f"adjoint determining in {f} vanishes on solutions",
                reduced.is_zero, "" if reduced.is_zero else render(reduced))
    return rep


def check_system_symmetry(sys: DESystem, delta: Characteristic) -> Report:
    """The characteristic maps solutions to solutions: the variation of each
    equation reduces to zero by the solved form.

    Entries for unpromoted parameters are ignored: the system's parameters
    are constants, so a transformation of the system cannot move them.  The
    same characteristic may therefore fail here and pass on the extension."""
    moving = {name: e for name, e in delta.items() if name in sys.sig.fields}
    rep = Report("symmetry")
    for label, F in sys.equations:
        v = variation(sys.sig, F, moving)
        reduced = v if v.is_zero else on_shell_reduce(sys, v)
        rep.add(f"variation of {label} vanishes on solutions", reduced.is_zero,
                "" if reduced.is_zero else render(reduced))
    return rep


def embedding_current(sys: DESystem,
                      rho_values: Mapping[str, Expr | None],
                      delta: Characteristic) -> Current:
    """The boundary current of the variation of Lhat restricted to the
    system-field slots (the auxiliary fields are never differentiated with
    respect to the system fields), with the auxiliary fields replaced by the
    prolonged rho values afterwards.  A label mapped to None keeps its
    auxiliary field symbolic in the output."""
    aux_sig, lhat, names = auxiliary_lagrangian(sys)
    contract = tuple(f for f in sys.sig.fields if f in delta)
    contract += tuple(p for p in sys.sig.parameters
                      if p in delta and p not in sys.sig.fields)
    slots = lagrangian_slots(aux_sig, lhat, contract)
    j = gauss_current(aux_sig, slots, {f: delta[f] for f in contract})
    values = {names[label]: v for label, v in rho_values.items()
              if v is not None}
    if not values:
        return j
    return j.map(lambda e: substitute_prolonged(sys.sig, e, values))


def split_embedding_current(sys: DESystem, q: Multiplier, delta: Characteristic,
                            ) -> tuple[Current, Current, Current]:
    """Product-rule split of the boundary current of F^a q_a.

    Returns (frozen-source part, frozen-multiplier part, full current); the
    first has the source expressions held constant during integration by
    parts, the second is embedding_current with rho = q, and the two sum to
    the full current exactly.
    """
    sig = sys.sig
    _, j_full = variation_split(sig, source_product(sys, q), delta)
    j_source_frozen = embedding_current(sys, q.as_dict(), delta)
    taken = _sig_names(sig)
    frozen = {label: _fresh(taken, f"frozen_{label}")
              for label, _ in sys.equations}
    frozen_sig = sig.with_fields(frozen[label] for label, _ in sys.equations)
    lagr = Expr.zero()
    for label, _ in sys.equations:
        lagr = lagr + Expr.from_atom(frozen_sig.jet(frozen[label])) * q[label]
    _, j_frozen = variation_split(frozen_sig, lagr, delta)
    values = {frozen[label]: F for label, F in sys.equations}
    j_multiplier_frozen = j_frozen.map(
        lambda e: substitute_prolonged(sig, e, values))
    return j_multiplier_frozen, j_source_frozen, j_full


def theorem1_certificate(sys: DESystem, q: Multiplier, J: Current,
                         delta: Characteristic,
                         fq_preserving_only: bool = False) -> Report:
    """For a multiplier-current pair and a symmetry characteristic: the
    boundary current of F^a q_a differs from the varied current by an
    identically conserved current.

    With fq_preserving_only the characteristic need not be a system symmetry;
    it suffices that the variation of F^a q_a vanishes on solutions.
    """
    sig = sys.sig
    rep = Report("theorem1")
    pair = verify_multiplier_current_pair(sys, q, J)
    rep.add("multiplier-current pair off-shell", pair.passed,
            "" if pair.passed else pair.checks[0].detail)
    if fq_preserving_only:
        v = variation(sig, source_product(sys, q), delta)
        reduced = v if v.is_zero else on_shell_reduce(sys, v)
        rep.add("variation of F.q vanishes on solutions", reduced.is_zero,
                "" if reduced.is_zero else render(reduced))
    else:
        sym = check_system_symmetry(sys, delta)
        rep.add("characteristic is a system symmetry", sym.passed)
    frozen_part, _, j_full = split_embedding_current(sys, q, delta)
    varied = J.map(lambda e: variation(sig, e, delta))
    gap = divergence(sig, j_full - varied)
    rep.add("Div(j - variation(J)) == 0 identically", gap.is_zero,
            "" if gap.is_zero else render(gap))
    div_varied = divergence(sig, varied)
    reduced = div_varied if div_varied.is_zero \
        else on_shell_reduce(sys, div_varied)
    rep.add("Div(variation(J)) vanishes on solutions", reduced.is_zero,
            "" if reduced.is_zero else render(reduced))
    ok = True
    for mu, e in frozen_part.components:
        r = e if e.is_zero else on_shell_reduce(sys, e)
        ok = ok and r.is_zero
    rep.add("frozen-source current vanishes on solutions", ok)
    return rep


def linearization_current(sys: DESystem,
                          v: Mapping[str, str] | None = None,
                          rho_values: Mapping[str, Expr | None] | None = None,
                          ) -> Current:
    """The embedding current with the characteristic replaced by fresh
    linearization fields v_i; bilinear in (v, rho)."""
    ext_sig, _, delta = linearize(sys.sig, dict(sys.equations), v)
    carrier = DESystem(ext_sig, sys.equations, sys.solved, sys.name)
    if rho_values is None:
        rho_values = {label: None for label, _ in sys.equations}
    return embedding_current(carrier, rho_values, delta)


def multiplier_symmetry_check(sys: DESystem, q: Multiplier,
                              J: Current) -> Report:
    """The characteristic moving only the auxiliary fields by q is a
    Lagrangian symmetry of Lhat with K = J; its Noether current is -J since
    Lhat carries no derivatives of the auxiliary fields."""
    aux_sig, lhat, names = auxiliary_lagrangian(sys)
    delta = {names[label]: q[label] for label, _ in sys.equations}
    resid = variation(aux_sig, lhat, delta) - divergence(aux_sig, J)
    rep = Report("multiplier-symmetry")
    rep.add("variation(Lhat) == Div J", resid.is_zero,
            "" if resid.is_zero else render(resid))
    rep.notes.append("noether current = -J (no auxiliary-derivative slots)")
    return rep
