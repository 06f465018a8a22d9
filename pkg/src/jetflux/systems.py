"""Differential-equation systems, conserved currents and multipliers.

A system carries its equations plus an optional solved form: rewrite rules
lhs-jet -> rhs used (prolonged by total derivatives) for on-shell reduction.
Rule ranking is checked at load so reduction terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .errors import (DocumentError, NonTerminatingRuleError, NoSolvedFormError,
                     NotHomogeneousError, ZeroWeightError)
from .expr import Expr, Jet, MultiIndex
from .jets import (Characteristic, SystemSignature, euler_lagrange, prolong,
                   scaling_weight, total_derivative, variation)
from .ratfunc import Coefficient, ONE_COEFF
from .render import render
from .report import Report


@dataclass(frozen=True)
class Current:
    """A current: one expression per independent direction, in order."""

    components: tuple[tuple[str, Expr], ...]

    @staticmethod
    def of(sig: SystemSignature, values: Mapping[str, Expr] | Sequence[Expr]) -> "Current":
        if isinstance(values, Mapping):
            missing = [mu for mu in sig.independents if mu not in values]
            if missing:
                raise DocumentError(f"current misses components {missing}")
            return Current(tuple((mu, values[mu]) for mu in sig.independents))
        vals = tuple(values)
        if len(vals) != len(sig.independents):
            raise DocumentError("current component count mismatch")
        return Current(tuple(zip(sig.independents, vals)))

    def __getitem__(self, mu: str) -> Expr:
        for name, e in self.components:
            if name == mu:
                return e
        raise KeyError(mu)

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.components)

    def map(self, fn) -> "Current":
        return Current(tuple((mu, fn(e)) for mu, e in self.components))

    def __add__(self, other: "Current") -> "Current":
        return Current(tuple((mu, e + other[mu]) for mu, e in self.components))

    def __sub__(self, other: "Current") -> "Current":
        return Current(tuple((mu, e - other[mu]) for mu, e in self.components))

    def __neg__(self) -> "Current":
        return self.map(lambda e: -e)

    def scale(self, c) -> "Current":
        return self.map(lambda e: e.scale(c))

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for _, e in self.components)


@dataclass(frozen=True)
class Multiplier:
    """One expression per equation label, in equation order."""

    components: tuple[tuple[str, Expr], ...]

    @staticmethod
    def of(sys: "DESystem", values: Mapping[str, Expr]) -> "Multiplier":
        missing = [lab for lab, _ in sys.equations if lab not in values]
        if missing:
            raise DocumentError(f"multiplier misses equations {missing}")
        return Multiplier(tuple((lab, values[lab]) for lab, _ in sys.equations))

    def __getitem__(self, label: str) -> Expr:
        for name, e in self.components:
            if name == label:
                return e
        raise KeyError(label)

    def as_dict(self) -> dict[str, Expr]:
        return dict(self.components)

    def map(self, fn) -> "Multiplier":
        return Multiplier(tuple((lab, fn(e)) for lab, e in self.components))


@dataclass(frozen=True)
class EquivalenceWitness:
    """J1 - J2 = bar + hat with bar identically conserved and hat vanishing
    on solutions."""

    bar: Current | None = None
    hat: Current | None = None


@dataclass(frozen=True)
class DESystem:
    sig: SystemSignature
    equations: tuple[tuple[str, Expr], ...]
    solved: tuple[tuple[Jet, Expr], ...] = ()
    name: str = ""

    @staticmethod
    def create(sig: SystemSignature, equations: Mapping[str, Expr],
               solved: Mapping[Jet, Expr] | Iterable[tuple[Jet, Expr]] = (),
               name: str = "") -> "DESystem":
        eqs = tuple(equations.items())
        if not eqs:
            raise DocumentError("system needs at least one equation")
        rules = tuple(solved.items() if isinstance(solved, Mapping) else solved)
        _check_rules(sig, rules)
        sys = DESystem(sig, eqs, rules, name)
        if rules:
            for label, F in eqs:
                if not on_shell_reduce(sys, F).is_zero:
                    raise DocumentError(
                        f"equation {label} does not reduce to zero under its "
                        f"own solved form")
        return sys

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(lab for lab, _ in self.equations)

    def equation(self, label: str) -> Expr:
        for lab, F in self.equations:
            if lab == label:
                return F
        raise KeyError(label)

    def specialize(self, values: Mapping[str, object]) -> "DESystem":
        eqs = {lab: F.substitute_constants(values) for lab, F in self.equations}
        rules = [(lhs, rhs.substitute_constants(values)) for lhs, rhs in self.solved]
        return DESystem.create(self.sig, eqs, rules, self.name)


def _rank(sig: SystemSignature, index: MultiIndex, direction: str):
    counts = tuple(index.count(d) for d in sig.independents)
    return (index.count(direction), index.order, counts)


def _leading_direction(sig: SystemSignature, index: MultiIndex) -> str:
    for d in sig.independents:
        if index.count(d):
            return d
    raise NonTerminatingRuleError("solved-form lhs needs a derivative")


def _check_rules(sig: SystemSignature, rules: tuple[tuple[Jet, Expr], ...]) -> None:
    show = lambda atom: render(Expr.from_atom(atom))
    for lhs, _ in rules:
        if not isinstance(lhs, Jet) or (lhs.field not in sig.fields
                                        and lhs.field not in sig.parameters):
            raise NonTerminatingRuleError(f"rule lhs {lhs!r} is not a field jet")
    for i, (lhs, _) in enumerate(rules):
        for j, (other, _) in enumerate(rules):
            if i != j and lhs.field == other.field and lhs.index.dominates(other.index):
                raise NonTerminatingRuleError(
                    f"solved rule for {show(lhs)} is a derivative of another "
                    f"rule's lhs")
    for lhs, rhs in rules:
        d = _leading_direction(sig, lhs.index)
        bound = _rank(sig, lhs.index, d)
        for atom in rhs.atoms():
            if isinstance(atom, Jet) and _rank(sig, atom.index, d) >= bound:
                raise NonTerminatingRuleError(
                    f"solved rule for {show(lhs)} does not dominate rhs atom "
                    f"{show(atom)}")
        for atom in rhs.atoms():
            if isinstance(atom, Jet) and _find_rule(rules, atom) is not None:
                raise NonTerminatingRuleError(
                    f"solved rule rhs contains reducible atom {show(atom)}")


def _find_rule(rules, atom: Jet):
    for lhs, rhs in rules:
        if atom.field == lhs.field and atom.param == lhs.param \
                and atom.index.dominates(lhs.index):
            return lhs, rhs
    return None


def divergence(sys_or_sig, current: Current) -> Expr:
    sig = sys_or_sig.sig if isinstance(sys_or_sig, DESystem) else sys_or_sig
    total = Expr.zero()
    for mu, e in current.components:
        total = total + total_derivative(sig, e, mu)
    return total


def source_product(sys: DESystem, q: Multiplier) -> Expr:
    """The contracted source term F^a q_a."""
    total = Expr.zero()
    for lab, F in sys.equations:
        total = total + F * q[lab]
    return total


def multiplier_determining(sys: DESystem, q: Multiplier) -> dict[str, Expr]:
    """Euler derivatives of F^a q_a per field; all must vanish identically
    for q to be a conservation-law multiplier."""
    W = source_product(sys, q)
    return {f: euler_lagrange(sys.sig, W, f) for f in sys.sig.fields}


def verify_multiplier_current_pair(sys: DESystem, q: Multiplier,
                                   J: Current) -> Report:
    rep = Report("verify-pair")
    resid = source_product(sys, q) - divergence(sys, J)
    rep.add("F.q - Div J == 0", resid.is_zero,
            "" if resid.is_zero else render(resid))
    return rep


def on_shell_reduce(sys: DESystem, e: Expr, _guard: int = 100000) -> Expr:
    """Rewrite by the prolonged solved form until no reducible jet remains."""
    if not sys.solved:
        raise NoSolvedFormError(f"system {sys.name or '?'} has no solved form")
    sig = sys.sig
    steps = 0
    while True:
        best = None
        for atom in e.atoms():
            if not isinstance(atom, Jet):
                continue
            hit = _find_rule(sys.solved, atom)
            if hit is None:
                continue
            lhs, _ = hit
            d = _leading_direction(sig, lhs.index)
            rank = _rank(sig, atom.index, d)
            if best is None or rank > best[0]:
                best = (rank, atom, hit)
        if best is None:
            return e
        _, atom, (lhs, rhs) = best
        e = e.substitute({atom: prolong(sig, rhs, atom.index - lhs.index)})
        steps += 1
        if steps > _guard:
            raise NonTerminatingRuleError("on-shell reduction did not settle")


def is_conserved_on_shell(sys: DESystem, J: Current) -> Report:
    rep = Report("conserved-on-shell")
    div = divergence(sys, J)
    if div.is_zero:
        rep.add("divergence == 0 identically", True)
        return rep
    reduced = on_shell_reduce(sys, div)
    rep.add("divergence reduces to 0 on solutions", reduced.is_zero,
            "" if reduced.is_zero else render(reduced))
    return rep


def currents_equivalent(sys: DESystem, J1: Current, J2: Current,
                        witness: EquivalenceWitness | None = None) -> Report:
    """With a witness the verdict is authoritative; without one only the
    necessary on-shell condition is checked."""
    rep = Report("equiv")
    diff = J1 - J2
    if diff.is_zero:
        rep.add("J1 - J2 == 0", True)
        return rep
    if witness is not None:
        bar = witness.bar if witness.bar is not None else diff.map(lambda e: Expr.zero())
        hat = witness.hat if witness.hat is not None else diff.map(lambda e: Expr.zero())
        div_bar = divergence(sys, bar)
        rep.add("witness bar identically conserved", div_bar.is_zero,
                "" if div_bar.is_zero else render(div_bar))
        for mu, e in hat.components:
            if e.is_zero:
                continue
            red = on_shell_reduce(sys, e)
            rep.add(f"witness hat^{mu} vanishes on solutions", red.is_zero,
                    "" if red.is_zero else render(red))
        gap = diff - bar - hat
        rep.add("J1 - J2 == bar + hat", gap.is_zero,
                "" if gap.is_zero else render_gap(gap))
        return rep
    rep.necessary_only = True
    div = divergence(sys, diff)
    if div.is_zero:
        rep.add("Div(J1 - J2) == 0 identically", True)
    else:
        red = on_shell_reduce(sys, div)
        rep.add("Div(J1 - J2) vanishes on solutions", red.is_zero,
                "" if red.is_zero else render(red))
    rep.notes.append("no witness supplied: necessary condition only")
    return rep


def render_gap(gap: Current) -> str:
    return "; ".join(f"{mu}: {render(e)}" for mu, e in gap.components if not e.is_zero)


def current_from_homogeneity(sys: DESystem, q: Multiplier, delta: Characteristic,
                             omega: Coefficient | None = None,
                             ) -> tuple[Current, Report]:
    """Reconstruct a multiplier current from scaling homogeneity of F^a q_a:
    if the variation scales the source product by a nonzero weight, the scaled
    boundary current of the variation is an exact partner current for q."""
    from .noether import variation_split

    rep = Report("current-from-homogeneity")
    W = source_product(sys, q)
    if omega is None:
        omega = scaling_weight(sys.sig, W, delta)
        if omega is None:
            raise NotHomogeneousError("F.q is not homogeneous under delta")
    resid = variation(sys.sig, W, delta) - W.scale(omega)
    if not resid.is_zero:
        raise NotHomogeneousError(f"variation(F.q) != omega * F.q: {render(resid)}")
    if omega.is_zero:
        raise ZeroWeightError("homogeneity weight must be nonzero")
    det = multiplier_determining(sys, q)
    for f, e in det.items():
        rep.add(f"determining E_{f}(F.q) == 0", e.is_zero,
                "" if e.is_zero else render(e))
    _, j = variation_split(sys.sig, W, delta)
    J = j.scale(ONE_COEFF / omega)
    pair = verify_multiplier_current_pair(sys, q, J)
    rep.add("reconstructed pair verifies off-shell", pair.passed)
    return J, rep
