"""Promoting constant parameters to fields.

Appending the equations "all derivatives of g vanish" turns a parameter into
a field without changing the solution set.  Multipliers of the base system
lift to the extended one with the partial derivative of the current along
the parameter as the new multiplier components, and the embedding current of
the extended system reproduces the scaled original current on solutions.
The same machinery covers the trivial extension (a fresh parameter the
system never mentions) and the insertion of a parameter into a parameterless
system guided by scaling homogeneity.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

from .errors import (DerivativeOfParameterError, ExponentError,
                     NotHomogeneousError, ZeroWeightError)
from .expr import (Expr, ExponentVector, FunctionApp, Jet, MultiIndex,
                   partial_atom)
from .jets import (Characteristic, SystemSignature, scaling_weight,
                   total_derivative, variation)
from .ratfunc import Coefficient, ONE_COEFF, Scalar
from .render import render, render_coefficient
from .report import Report
from .systems import (Current, DESystem, Multiplier, divergence,
                      is_conserved_on_shell, on_shell_reduce, render_gap,
                      source_product, verify_multiplier_current_pair)


def _as_coefficient(value: Coefficient | Scalar) -> Coefficient:
    if isinstance(value, Coefficient):
        return value
    return Coefficient.from_rational(value)


@dataclass(frozen=True)
class ExtendedSystem:
    """A system together with its parameter-promoted extension; the extra
    equations state that every promoted parameter is constant."""

    base: DESystem
    promoted: tuple[str, ...]
    system: DESystem
    g_labels: tuple[tuple[tuple[str, str], str], ...] = ()
    scaling: Characteristic | None = None

    def g_label(self, param: str, direction: str) -> str:
        for (l, mu), label in self.g_labels:
            if l == param and mu == direction:
                return label
        raise KeyError((param, direction))

    def zero_order(self, param: str) -> Expr:
        return Expr.from_atom(self.base.sig.jet(param))


@dataclass(frozen=True)
class ParameterizedPair:
    """A base multiplier-current pair plus the current's derivative along
    each promoted parameter (one auxiliary current per parameter)."""

    q: Multiplier
    J: Current
    theta: tuple[tuple[str, Current], ...]

    def theta_for(self, param: str) -> Current:
        for name, cur in self.theta:
            if name == param:
                return cur
        raise KeyError(param)


@dataclass(frozen=True)
class HomogeneousDecomposition:
    """Monomial grouping of an expression by scaling weight."""

    parts: tuple[tuple[Coefficient, Expr], ...]

    @property
    def weights(self) -> tuple[Coefficient, ...]:
        return tuple(w for w, _ in self.parts)

    def component(self, weight: Coefficient | Scalar) -> Expr:
        weight = _as_coefficient(weight)
        for w, e in self.parts:
            if w == weight:
                return e
        return Expr.zero()

    @property
    def total(self) -> Expr:
        out = Expr.zero()
        for _, e in self.parts:
            out = out + e
        return out


@dataclass(frozen=True)
class ExtensionPlan:
    """Target weights for parameter insertion: the new source weight eta and
    multiplier weight rho_exp, realized through powers of g_name."""

    eta: Coefficient
    rho_exp: Coefficient
    g_name: str = "g"

    @staticmethod
    def of(eta: Coefficient | Scalar, rho_exp: Coefficient | Scalar,
           g_name: str = "g") -> "ExtensionPlan":
        return ExtensionPlan(_as_coefficient(eta), _as_coefficient(rho_exp),
                             g_name)


def extend_system(sys: DESystem, params: Iterable[str]) -> ExtendedSystem:
    """Promote the named parameters to fields and append one equation and
    one solved rule per parameter and direction stating its constancy."""
    params = tuple(params)
    if not params:
        return ExtendedSystem(sys, (), sys)
    for g in params:
        if g not in sys.sig.parameters:
            raise KeyError(f"{g!r} is not a declared parameter")
        for label, F in sys.equations:
            for atom in F.atoms():
                if isinstance(atom, Jet) and atom.field == g \
                        and atom.index.order > 0:
                    raise DerivativeOfParameterError(
                        f"equation {label} depends on a derivative of {g!r}")
    new_sig = sys.sig.promote(params)
    taken = {label for label, _ in sys.equations}
    equations = dict(sys.equations)
    labels = []
    rules = list(sys.solved)
    for g in params:
        for mu in sys.sig.independents:
            label = f"{g}_{mu}"
            while label in taken:
                label = "_" + label
            taken.add(label)
            lhs = new_sig.jet(g, MultiIndex.of(mu))
            equations[label] = Expr.from_atom(lhs)
            labels.append(((g, mu), label))
            rules.append((lhs, Expr.zero()))
    ext = DESystem.create(new_sig, equations, rules,
                          f"{sys.name}-extended" if sys.name else "extended")
    return ExtendedSystem(sys, params, ext, tuple(labels))


def kill_parameter_jets(ext: ExtendedSystem, e: Expr) -> Expr:
    """Set every positive-order jet of a promoted parameter to zero."""
    rules = {atom: Expr.zero() for atom in e.atoms()
             if isinstance(atom, Jet) and atom.field in ext.promoted
             and atom.index.order > 0}
    return e.substitute(rules) if rules else e


def parameterized_pair(ext: ExtendedSystem, q: Multiplier,
                       J: Current) -> ParameterizedPair:
    """Attach theta = dJ/dg for each promoted parameter; theta is always
    recomputed from J, never supplied."""
    theta = []
    for g in ext.promoted:
        atom = ext.base.sig.jet(g)
        theta.append((g, J.map(lambda e: partial_atom(e, atom))))
    return ParameterizedPair(q, J, tuple(theta))


def lift_parameterized_multiplier(ext: ExtendedSystem, q: Multiplier,
                                  J: Current) -> tuple[Multiplier, Report]:
    """The extended-system multiplier {q on the base equations, dJ/dg on the
    constancy equations}, certified off-shell with the parameters varying."""
    rep = Report("lift")
    base_pair = verify_multiplier_current_pair(ext.base, q, J)
    rep.add("base pair off-shell (constant parameters)", base_pair.passed,
            "" if base_pair.passed else base_pair.checks[0].detail)
    pair = parameterized_pair(ext, q, J)
    values = q.as_dict()
    for g in ext.promoted:
        th = pair.theta_for(g)
        for mu in ext.system.sig.independents:
            values[ext.g_label(g, mu)] = th[mu]
    lifted = Multiplier.of(ext.system, values)
    resid = source_product(ext.system, lifted) - divergence(ext.system, J)
    rep.add("lifted pair off-shell (varying parameters)", resid.is_zero,
            "" if resid.is_zero else render(resid))
    return lifted, rep


def current_weight(sig: SystemSignature, J: Current,
                   delta: Characteristic) -> Coefficient | None:
    """Common scaling weight of all current components, if one exists."""
    weight: Coefficient | None = None
    for _, e in J.components:
        if e.is_zero:
            continue
        w = scaling_weight(sig, e, delta)
        if w is None or (weight is not None and w != weight):
            return None
        weight = w
    return weight


def theorem2_current(ext: ExtendedSystem, pair: ParameterizedPair,
                     delta: Characteristic,
                     omega: Coefficient | Scalar | None = None,
                     ) -> tuple[Current, Report]:
    """The embedding current of the extended system with the lifted
    multiplier as adjoint values.

    Certifies: delta is an extended-system symmetry; the lifted multiplier
    identity; the full boundary current minus the varied current is
    identically conserved (also stated at constant parameters); and, when an
    omega is supplied, that the output on-shell-reduces to omega times the
    current.  The weight comparison is opt-in because the theorem only
    guarantees equivalence: the gap may be a nonzero identically conserved
    current even for homogeneous J.
    """
    from .embedding import (check_system_symmetry, embedding_current,
                            split_embedding_current)

    sig = ext.system.sig
    rep = Report("theorem2")
    sym = check_system_symmetry(ext.system, delta)
    rep.add("characteristic is an extended-system symmetry", sym.passed)
    lifted, lift_rep = lift_parameterized_multiplier(ext, pair.q, pair.J)
    rep.add("lifted multiplier identity", lift_rep.passed)
    values = {label: lifted[label] for label, _ in ext.system.equations}
    j = embedding_current(ext.system, values, delta)
    frozen_part, _, _ = split_embedding_current(ext.system, lifted, delta)
    varied = pair.J.map(lambda e: variation(sig, e, delta))
    whole = divergence(ext.system, j + frozen_part - varied)
    rep.add("Div(j + frozen part - variation(J)) == 0 identically",
            whole.is_zero, "" if whole.is_zero else render(whole))
    const = (j + frozen_part - varied).map(
        lambda e: kill_parameter_jets(ext, e))
    const_div = divergence(ext.base.sig, const)
    rep.add("the same at constant parameters", const_div.is_zero,
            "" if const_div.is_zero else render(const_div))
    if omega is None:
        rep.notes.append("no omega supplied: weight comparison skipped")
    else:
        w = _as_coefficient(omega)
        ok = True
        detail = ""
        for mu, e in (j - pair.J.scale(w)).components:
            reduced = e if e.is_zero else on_shell_reduce(ext.system, e)
            if not reduced.is_zero:
                ok = False
                detail = f"{mu}: {render(reduced)}"
                break
        rep.add(f"on solutions j == ({render_coefficient(w)}) * J", ok, detail)
    return j, rep


def restrict_multiplier(ext: ExtendedSystem, q_ext: Multiplier,
                        J_ext: Current) -> tuple[ParameterizedPair, Report]:
    """Drop the constancy-equation components and set every positive-order
    parameter jet to zero; certify the result as a base pair."""
    rep = Report("restrict")
    q = Multiplier(tuple(
        (label, kill_parameter_jets(ext, q_ext[label]))
        for label, _ in ext.base.equations))
    J = J_ext.map(lambda e: kill_parameter_jets(ext, e))
    base_pair = verify_multiplier_current_pair(ext.base, q, J)
    rep.add("restricted pair off-shell (constant parameters)",
            base_pair.passed,
            "" if base_pair.passed else base_pair.checks[0].detail)
    return parameterized_pair(ext, q, J), rep


def scc_check(ext: ExtendedSystem, q: Multiplier, delta: Characteristic,
              omega: Coefficient | Scalar) -> Report:
    """Scaled conservation conditions: the source product is homogeneous of
    weight omega under delta, and each delta-g is constant once the
    parameters are."""
    omega = _as_coefficient(omega)
    rep = Report("scc")
    W = source_product(ext.base, q)
    resid = variation(ext.system.sig, W, delta) - W.scale(omega)
    rep.add(f"variation(F.q) == ({render_coefficient(omega)}) * F.q",
            resid.is_zero, "" if resid.is_zero else render(resid))
    for g in ext.promoted:
        dg = delta.get(g)
        if dg is None or dg.is_zero:
            rep.add(f"delta {g} constant at constant parameters", True)
            continue
        frozen = kill_parameter_jets(ext, dg)
        ok = True
        detail = ""
        for mu in ext.base.sig.independents:
            d = total_derivative(ext.base.sig, frozen, mu)
            if not d.is_zero:
                ok = False
                detail = f"D_{mu}: {render(d)}"
                break
        rep.add(f"delta {g} constant at constant parameters", ok, detail)
    return rep


def adjoint_from_current(ext: ExtendedSystem, theta: Current, param: str,
                         delta: Characteristic,
                         ) -> tuple[dict[str, Expr], Current, Report]:
    """An on-shell conserved current placed on one parameter's constancy
    equations is an adjoint-symmetry of the extended system; the embedding
    method applied to that placement and a symmetry characteristic delta
    returns the contraction theta * delta-g, again conserved."""
    from .embedding import check_adjoint_symmetry, embedding_current

    rep = Report("adjoint-from-current")
    conserved = is_conserved_on_shell(ext.system, theta)
    rep.add("input current conserved on solutions", conserved.passed)
    values: dict[str, Expr] = {label: Expr.zero()
                               for label, _ in ext.system.equations}
    for mu in ext.system.sig.independents:
        values[ext.g_label(param, mu)] = theta[mu]
    adj = check_adjoint_symmetry(ext.system, values)
    rep.add("placement is an adjoint-symmetry", adj.passed)
    dg = delta.get(param, Expr.zero())
    j = theta.map(lambda e: e * dg)
    embedded = embedding_current(ext.system, values, delta)
    gap = embedded - j
    rep.add("embedding returns the contraction with delta-g", gap.is_zero,
            "" if gap.is_zero else render_gap(gap))
    if not j.is_zero:
        j_ok = is_conserved_on_shell(ext.system, j)
        rep.add("contracted current conserved on solutions", j_ok.passed)
    return values, j, rep


def trivial_extend(sys: DESystem, g_name: str = "g") -> ExtendedSystem:
    """Append constancy equations for a fresh parameter the system never
    mentions; the extension carries the scaling characteristic delta-g = g."""
    taken = (set(sys.sig.independents) | set(sys.sig.fields)
             | set(sys.sig.parameters) | {c.name for c in sys.sig.constants}
             | set(sys.sig.functions) | {label for label, _ in sys.equations})
    name = g_name
    while name in taken:
        name = "_" + name
    carrier = DESystem(sys.sig.with_parameters((name,)), sys.equations,
                       sys.solved, sys.name)
    ext = extend_system(carrier, (name,))
    scaling = {name: ext.zero_order(name)}
    return ExtendedSystem(ext.base, ext.promoted, ext.system, ext.g_labels,
                          scaling)


def lift_trivial_multiplier(ext: ExtendedSystem, q: Multiplier, J: Current,
                            ) -> tuple[Multiplier, Current, Report]:
    """{g*q on the base equations, J on the constancy equations} multiplies
    the trivially extended system with current g*J."""
    rep = Report("trivial-lift")
    base_pair = verify_multiplier_current_pair(ext.base, q, J)
    rep.add("base pair off-shell", base_pair.passed,
            "" if base_pair.passed else base_pair.checks[0].detail)
    g = ext.promoted[0]
    g_expr = ext.zero_order(g)
    values = {label: g_expr * q[label] for label, _ in ext.base.equations}
    for mu in ext.system.sig.independents:
        values[ext.g_label(g, mu)] = J[mu]
    lifted = Multiplier.of(ext.system, values)
    current = J.map(lambda e: g_expr * e)
    resid = source_product(ext.system, lifted) - divergence(ext.system, current)
    rep.add("lifted pair off-shell", resid.is_zero,
            "" if resid.is_zero else render(resid))
    return lifted, current, rep


def project_trivial_multiplier(ext: ExtendedSystem, lifted: Multiplier,
                               ) -> tuple[Multiplier, Current, Report]:
    """Recover a base pair from a lifted multiplier of the trivial extension:
    the parameter derivative of the base components and the constancy-equation
    components (the Euler derivative along g of the multiplier identity)."""
    rep = Report("trivial-project")
    g = ext.promoted[0]
    atom = ext.base.sig.jet(g)
    q = Multiplier(tuple((label, partial_atom(lifted[label], atom))
                         for label, _ in ext.base.equations))
    J = Current.of(ext.base.sig,
                   {mu: lifted[ext.g_label(g, mu)]
                    for mu in ext.base.sig.independents})
    base_pair = verify_multiplier_current_pair(ext.base, q, J)
    rep.add("projected pair off-shell", base_pair.passed,
            "" if base_pair.passed else base_pair.checks[0].detail)
    return q, J, rep


def _term_weight(weights: Mapping[str, Coefficient], term) -> Coefficient:
    total = Coefficient.from_rational(0)
    for atom, ev in term:
        if isinstance(atom, Jet) and atom.field in weights:
            total = total + weights[atom.field] * ev.as_coefficient()
        elif isinstance(atom, FunctionApp):
            for inner in Expr.from_atom(atom).atoms():
                if isinstance(inner, Jet) and inner.field in weights \
                        and not weights[inner.field].is_zero and inner != atom:
                    raise NotHomogeneousError(
                        "function argument contains weighted fields")
    return total


def homogeneous_decompose(e: Expr, weights: Mapping[str, Coefficient | Scalar],
                          ) -> HomogeneousDecomposition:
    """Group the monomials of e by total scaling weight under the diagonal
    characteristic assigning each named field its weight."""
    coeffs = {name: _as_coefficient(w) for name, w in weights.items()}
    buckets: dict[Coefficient, Expr] = {}
    for term, c in e.terms:
        w = _term_weight(coeffs, term)
        piece = Expr([(term, c)])
        buckets[w] = buckets.get(w, Expr.zero()) + piece
    parts = sorted(buckets.items(), key=lambda kv: render_coefficient(kv[0]))
    return HomogeneousDecomposition(tuple(parts))


def _coefficient_exponent(c: Coefficient, allowed: set[str]) -> ExponentVector:
    if not c.is_integer_linear(allowed):
        raise ExponentError(
            f"weight gap {render_coefficient(c)} is not an integer-linear "
            f"form in the exponent constants")
    base, lin = c.linear_parts()
    return ExponentVector(base, tuple(sorted(lin.items())))


def _reweight(e: Expr, weights: Mapping[str, Coefficient | Scalar],
              target: Coefficient, g_atom: Jet,
              allowed: set[str]) -> Expr:
    """Multiply each homogeneous component by the g power filling the gap to
    the target weight."""
    out = Expr.zero()
    for w, part in homogeneous_decompose(e, weights).parts:
        ev = _coefficient_exponent(target - w, allowed)
        out = out + part * Expr.from_atom(g_atom, ev)
    return out


def insert_parameter(sys: DESystem, q: Multiplier, J: Current,
                     plan: ExtensionPlan,
                     ) -> tuple[DESystem, ParameterizedPair, Report]:
    """Rescale the homogeneous components of the equations, the multiplier
    and the current by powers of a fresh parameter so that they become
    exactly homogeneous of weights eta, rho_exp and eta + rho_exp under the
    all-fields scaling extended by delta-g = g.  Setting g = 1 recovers the
    originals.  The solved form does not carry over."""
    eta, rho = plan.eta, plan.rho_exp
    if (eta + rho).is_zero:
        raise ZeroWeightError("eta + rho_exp must be nonzero")
    new_sig = sys.sig.with_parameters((plan.g_name,))
    g_atom = new_sig.jet(plan.g_name)
    allowed = new_sig.exponent_constants()
    weights = {f: ONE_COEFF for f in sys.sig.fields}
    equations = {label: _reweight(F, weights, eta, g_atom, allowed)
                 for label, F in sys.equations}
    new_q = Multiplier(tuple(
        (label, _reweight(q[label], weights, rho, g_atom, allowed))
        for label, _ in sys.equations))
    new_J = Current(tuple(
        (mu, _reweight(e, weights, eta + rho, g_atom, allowed))
        for mu, e in J.components))
    new_sys = DESystem.create(new_sig, equations, (),
                              f"{sys.name}-reweighted" if sys.name else "")
    rep = Report("insert-parameter")
    delta = {f: Expr.from_atom(new_sig.jet(f)) for f in sys.sig.fields}
    delta[plan.g_name] = Expr.from_atom(g_atom)
    for label, F in new_sys.equations:
        resid = variation(new_sig, F, delta) - F.scale(eta)
        rep.add(f"source {label} homogeneous of weight "
                f"{render_coefficient(eta)}", resid.is_zero,
                "" if resid.is_zero else render(resid))
    for label, _ in new_sys.equations:
        resid = variation(new_sig, new_q[label], delta) - new_q[label].scale(rho)
        rep.add(f"multiplier on {label} homogeneous of weight "
                f"{render_coefficient(rho)}", resid.is_zero,
                "" if resid.is_zero else render(resid))
    for mu, e in new_J.components:
        resid = variation(new_sig, e, delta) - e.scale(eta + rho)
        rep.add(f"current {mu} homogeneous of weight "
                f"{render_coefficient(eta + rho)}", resid.is_zero,
                "" if resid.is_zero else render(resid))
    resid = source_product(new_sys, new_q) - divergence(new_sys, new_J)
    rep.add("reweighted pair off-shell", resid.is_zero,
            "" if resid.is_zero else render(resid))
    one = Expr.one()
    back = all(
        (F.substitute({g_atom: one}) - sys.equation(label)).is_zero
        for label, F in new_sys.equations)
    back = back and all(
        (new_q[label].substitute({g_atom: one}) - q[label]).is_zero
        for label, _ in sys.equations)
    back = back and all(
        (new_J[mu].substitute({g_atom: one}) - J[mu]).is_zero
        for mu in sys.sig.independents)
    rep.add("g = 1 recovers the originals", back)
    theta = (plan.g_name,
             new_J.map(lambda e: partial_atom(e, g_atom)))
    return new_sys, ParameterizedPair(new_q, new_J, (theta,)), rep


def recover_current_from_theta(sig: SystemSignature, theta: Current,
                               param: str, reference: Current,
                               base_value: Scalar = 0) -> Current:
    """Antiderivative of theta along the parameter, with the integration
    constant fixed so the result matches the reference current at the base
    value.  Only polynomial dependence on the parameter is supported."""
    atom = sig.jet(param)

    def integrate(e: Expr) -> Expr:
        out = Expr.zero()
        for term, c in e.terms:
            ev = None
            rest = []
            for a, x in term:
                if a == atom:
                    ev = x
                else:
                    rest.append((a, x))
            if ev is None:
                k = 0
            elif ev.is_constant:
                k = ev.base
            else:
                raise ExponentError(
                    f"non-polynomial dependence on {param!r}")
            if k < 0:
                raise ExponentError(f"non-polynomial dependence on {param!r}")
            piece = Expr.from_atom(atom, ExponentVector(k + 1, ()))
            for a, x in rest:
                piece = piece * Expr.from_atom(a, x)
            out = out + piece.scale(c * Coefficient.from_rational(
                Fraction(1, k + 1)))
        return out

    base = Expr.from_rational(base_value)
    out = {}
    for mu, th in theta.components:
        anti = integrate(th)
        const = (reference[mu] - anti).substitute({atom: base})
        out[mu] = anti + const
    return Current.of(sig, out)
