"""Worked example suites over the shipped system documents.

Each suite loads its document, reruns every construction the system admits
(determining conditions, pair identities, weights, extension and embedding
currents, certificates) against the known-good expressions stored in the
document, and aggregates everything into a single report.
"""

from __future__ import annotations

from functools import lru_cache
from pathlib import Path

from .documents import SystemDocument, load_system_document
from .errors import DocumentError
from .expr import Expr, ExponentVector, Jet, MultiIndex, substitute_function
from .extension import (ExtensionPlan, adjoint_from_current, extend_system,
                        insert_parameter, kill_parameter_jets,
                        lift_parameterized_multiplier, lift_trivial_multiplier,
                        parameterized_pair, project_trivial_multiplier,
                        recover_current_from_theta, scc_check,
                        theorem2_current, trivial_extend)
from .embedding import (check_system_symmetry, embedding_current,
                        split_embedding_current, theorem1_certificate)
from .jets import SystemSignature, scaling_weight, total_derivative
from .noether import SymmetryWitness, noether_current
from .parser import parse_expression
from .ratfunc import Coefficient, ONE_COEFF
from .report import Report
from .systems import (Current, DESystem, Multiplier, divergence,
                      multiplier_determining, verify_multiplier_current_pair)

_DATA = Path(__file__).with_name("examples_data")


def document_path(name: str) -> Path:
    path = _DATA / f"{name}.toml"
    if not path.is_file():
        known = ", ".join(sorted(p.stem for p in _DATA.glob("*.toml")))
        raise DocumentError(f"no shipped document {name!r} (shipped: {known})")
    return path


@lru_cache(maxsize=None)
def document(name: str) -> SystemDocument:
    return load_system_document(document_path(name))


def example_names() -> tuple[str, ...]:
    return tuple(sorted(_SUITES))


def run_example(name: str) -> Report:
    try:
        suite = _SUITES[name]
    except KeyError:
        known = ", ".join(sorted(_SUITES))
        raise DocumentError(f"unknown example {name!r} (known: {known})") \
            from None
    return suite()


def run_all() -> list[tuple[str, Report]]:
    return [(name, run_example(name)) for name in example_names()]


def _merge(rep: Report, sub: Report, prefix: str) -> None:
    for c in sub.checks:
        rep.add(f"{prefix}: {c.name}", c.passed, c.detail)
    rep.notes.extend(f"{prefix}: {note}" for note in sub.notes)


def _weight_is(sig, e, delta, expected) -> bool:
    w = scaling_weight(sig, e, delta)
    return w is not None and w == Coefficient.from_rational(expected)


def _specialized(doc: SystemDocument, values) -> tuple[DESystem, dict, dict, dict]:
    """System, multipliers, currents and characteristics at fixed exponents."""
    spec = doc.specialize(values)
    return spec.system, spec.multipliers, spec.currents, spec.characteristics


# --------------------------------------------------------------------- gkdv

def _gkdv_theorem2_case(rep: Report, sys: DESystem, q: Multiplier, J: Current,
                        sc, omega: int, label: str,
                        factor: int = 1, remainder: Current | None = None):
    """theorem2 for one pair: certificate, on-shell weight comparison, and
    the exact constant-parameter identity factor*J == j|const + remainder."""
    ext = extend_system(sys, ("g",))
    pair = parameterized_pair(ext, q, J)
    j, t2 = theorem2_current(ext, pair, sc, omega=omega)
    _merge(rep, t2, label)
    const = j.map(lambda e: kill_parameter_jets(ext, e))
    target = J.scale(factor)
    if remainder is not None:
        const = const + remainder
    gap = target - const
    rep.add(f"{label}: ({factor})*J == j at constant g"
            + (" + remainder" if remainder is not None else ""),
            gap.is_zero)


def _run_gkdv() -> Report:
    doc = document("gkdv")
    rep = Report("examples:gkdv")
    sys = doc.system
    sig = sys.sig
    P = lambda s: parse_expression(s, sig)

    # determining conditions: q1-q3 hold at generic p, q4 only at p=1,
    # q5 only at p=2
    for name in ("q1", "q2", "q3"):
        det = multiplier_determining(sys, doc.multiplier(name))
        rep.add(f"{name}: determining at generic p",
                all(e.is_zero for e in det.values()))
    for name, p in (("q4", 1), ("q5", 2)):
        det = multiplier_determining(sys, doc.multiplier(name))
        rep.add(f"{name}: determining fails at generic p",
                not all(e.is_zero for e in det.values()))
        sys_p, mult_p, _, _ = _specialized(doc, {"p": p})
        det = multiplier_determining(sys_p, mult_p[name])
        rep.add(f"{name}: determining at p={p}",
                all(e.is_zero for e in det.values()))

    # pair identities and scaling weights; kappa = (0,1,1,0,1),
    # omega = (1,2,2,1,2), with q4/q5 taken at their admissible exponent
    cases = (("q1", "J1", None, 0, 1), ("q2", "J2", None, 1, 2),
             ("q3", "J3", None, 1, 2), ("q4", "J4", 1, 0, 1),
             ("q5", "J5", 2, 1, 2))
    for qn, Jn, p, kappa, omega in cases:
        if p is None:
            s, q, J, sc = sys, doc.multiplier(qn), doc.current(Jn), \
                doc.characteristic("sc")
        else:
            s, mult, cur, chars = _specialized(doc, {"p": p})
            q, J, sc = mult[qn], cur[Jn], chars["sc"]
        at = "generic p" if p is None else f"p={p}"
        _merge(rep, verify_multiplier_current_pair(s, q, J), f"{qn}/{Jn} ({at})")
        rep.add(f"{qn}: weight {kappa} under sc",
                _weight_is(s.sig, q[s.labels[0]], sc, kappa))
        rep.add(f"{Jn}: weight {omega} under sc",
                all(_weight_is(s.sig, e, sc, omega) for _, e in J.components))

    # extension: sc is a symmetry only of the extended system, and the
    # source products are homogeneous (scaled conservation conditions)
    ext = extend_system(sys, ("g",))
    sc = doc.characteristic("sc")
    rep.add("sc is not a symmetry of the base system",
            not check_system_symmetry(sys, sc).passed)
    _merge(rep, check_system_symmetry(ext.system, sc), "extended sc symmetry")
    for qn, omega in (("q1", 1), ("q2", 2), ("q3", 2)):
        _merge(rep, scc_check(ext, doc.multiplier(qn), sc, omega),
               f"scc {qn} (omega={omega})")

    # theorem 2, all five pairs; the constant-parameter identities carry the
    # exact remainders for J3 and J5
    u, ux = P("u"), P("u[x]")
    F = sys.equation("F")
    DxF = total_derivative(sig, F, "x")
    zero = Expr.zero()
    _gkdv_theorem2_case(rep, sys, doc.multiplier("q1"), doc.current("J1"),
                        sc, 1, "theorem2 q1", factor=1)
    _gkdv_theorem2_case(rep, sys, doc.multiplier("q2"), doc.current("J2"),
                        sc, 2, "theorem2 q2", factor=2)
    rem3 = Current.of(sig, [zero, F * ux - u * DxF])
    _gkdv_theorem2_case(rep, sys, doc.multiplier("q3"), doc.current("J3"),
                        sc, 2, "theorem2 q3", factor=2, remainder=rem3)
    sys1, mult1, cur1, chars1 = _specialized(doc, {"p": 1})
    _gkdv_theorem2_case(rep, sys1, mult1["q4"], cur1["J4"], chars1["sc"], 1,
                        "theorem2 q4 (p=1)", factor=1)
    sys2, mult2, cur2, chars2 = _specialized(doc, {"p": 2})
    F2 = sys2.equation("F")
    t3 = P("3*t").substitute_constants({"p": 2})
    rem5 = Current.of(sig, [zero, t3 * (F2 * ux - u * total_derivative(
        sig, F2, "x"))])
    _gkdv_theorem2_case(rep, sys2, mult2["q5"], cur2["J5"], chars2["sc"], 2,
                        "theorem2 q5 (p=2)", factor=2, remainder=rem5)

    # theorem 1 with the x-translation characteristic
    tr = doc.characteristic("tr")
    for qn, Jn, p in (("q1", "J1", None), ("q2", "J2", None),
                      ("q3", "J3", None), ("q4", "J4", 1), ("q5", "J5", 2)):
        if p is None:
            s, q, J = sys, doc.multiplier(qn), doc.current(Jn)
        else:
            s, mult, cur, _ = _specialized(doc, {"p": p})
            q, J = mult[qn], cur[Jn]
        _merge(rep, theorem1_certificate(s, q, J, tr), f"theorem1 {qn} (tr)")

    # parameterized multiplier machinery: the lifts hold off-shell with
    # variable g, and theta_1 has the known closed form
    for qn, Jn, p in (("q1", "J1", None), ("q2", "J2", None),
                      ("q3", "J3", None), ("q4", "J4", 1), ("q5", "J5", 2)):
        if p is None:
            e, q, J = ext, doc.multiplier(qn), doc.current(Jn)
        else:
            s, mult, cur, _ = _specialized(doc, {"p": p})
            e, q, J = extend_system(s, ("g",)), mult[qn], cur[Jn]
        _, lift_rep = lift_parameterized_multiplier(e, q, J)
        _merge(rep, lift_rep, f"lift {qn}")
    theta1 = parameterized_pair(ext, doc.multiplier("q1"),
                                doc.current("J1")).theta_for("g")
    rep.add("theta_1 == (0, u^(p+1)/(p+1))",
            theta1["t"].is_zero
            and (theta1["x"] - P("u^(p+1)/(p+1)")).is_zero)

    # an on-shell conserved current on the constancy equations is an
    # adjoint-symmetry; embedding against the scaling characteristic returns
    # the current scaled by delta-g = -p*g
    _, _, adj_rep = adjoint_from_current(ext, doc.current("J1"), "g", sc)
    _merge(rep, adj_rep, "J1 placed on the constancy equations")

    # theta is the g-antiderivative of nothing else: integrating it back
    # recovers J1
    back = recover_current_from_theta(sig, theta1, "g", doc.current("J1"))
    rep.add("theta_1 integrates back to J1",
            (back - doc.current("J1")).is_zero)

    # parameter insertion: starting from the parameterless equation, target
    # weights eta=1, rho=0 produce the g^(-p) parameterization, and g=1
    # takes it back
    bare_sig = SystemSignature(independents=("t", "x"), fields=("u",),
                               constants=sig.constants)
    B = lambda snippet: parse_expression(snippet, bare_sig)
    bare = DESystem.create(
        bare_sig, {"F": B("u[t] + u^p*u[x] + u[x,x,x]")},
        [(bare_sig.jet("u", doc.system.solved[0][0].index),
          B("-u^p*u[x] - u[x,x,x]"))], name="kdv-bare")
    q1 = Multiplier.of(bare, {"F": Expr.one()})
    J1_bare = doc.current("J1").map(
        lambda e: e.substitute({sig.jet("g"): Expr.one()}))
    new_sys, new_pair, ins_rep = insert_parameter(
        bare, q1, J1_bare, ExtensionPlan.of(1, 0))
    _merge(rep, ins_rep, "insert-parameter")
    gp = parse_expression("u[t] + g^(-p)*u^p*u[x] + u[x,x,x]", new_sys.sig)
    rep.add("inserted source is u[t] + g^(-p)*u^p*u[x] + u[x,x,x]",
            (new_sys.equation("F") - gp).is_zero)
    return rep


# ----------------------------------------------------- the Klein-Gordon trio

def _kg_common(rep: Report, doc: SystemDocument, jres_name: str,
               with_witness: bool) -> Current:
    """Checks shared by the three Klein-Gordon documents; returns the
    embedding current of the extension under the scaling characteristic."""
    sys = doc.system
    sig = sys.sig
    q, J = doc.multiplier("q"), doc.current("J")
    sc, tr = doc.characteristic("sc"), doc.characteristic("tr")

    det = multiplier_determining(sys, q)
    rep.add("q: determining", all(e.is_zero for e in det.values()))
    _merge(rep, verify_multiplier_current_pair(sys, q, J), "q/J")
    rep.add("q: weight 1 under sc",
            _weight_is(sig, q[sys.labels[0]], sc, 1))
    rep.add("J: weight 2 under sc",
            all(_weight_is(sig, e, sc, 2) for _, e in J.components))

    ext = extend_system(sys, sys.sig.parameters)
    _merge(rep, check_system_symmetry(ext.system, sc), "extended sc symmetry")
    _merge(rep, scc_check(ext, q, sc, 2), "scc (omega=2)")

    pair = parameterized_pair(ext, q, J)
    j, t2 = theorem2_current(ext, pair, sc)
    _merge(rep, t2, "theorem2")
    rep.add(f"theorem2 current == {jres_name} exactly",
            (j - doc.current(jres_name)).is_zero)

    _merge(rep, theorem1_certificate(sys, q, J, tr), "theorem1 (tr)")
    _, lift_rep = lift_parameterized_multiplier(ext, q, J)
    _merge(rep, lift_rep, "lift")

    if with_witness:
        # 2J - j - j_(frozen F) is identically conserved and parameter-free
        frozen, _, _ = split_embedding_current(sys, q, sc)
        bar = J.scale(2) - j.map(lambda e: kill_parameter_jets(ext, e)) - frozen
        rep.add("witness == stored jjj", (bar - doc.current("jjj")).is_zero)
        rep.add("witness identically conserved",
                divergence(sig, bar).is_zero)
        params = set(sys.sig.parameters)
        free = all(not (isinstance(a, Jet) and a.field in params)
                   for _, e in bar.components for a in e.atoms())
        rep.add("witness free of the couplings", free)

    # the time-translation Noether current of the stored Lagrangian is -J
    L = doc.lagrangian("L")
    K = Current.of(sig, [-L, Expr.zero()])
    jn, n_rep = noether_current(sig, L, SymmetryWitness(tr, K))
    _merge(rep, n_rep, "noether (tr)")
    rep.add("noether current == -J", (jn + J).is_zero)
    return j


def _run_kg_phi_n() -> Report:
    rep = Report("examples:kg-phi-n")
    _kg_common(rep, document("kg-phi-n"), "jres", with_witness=True)
    return rep


def _power_rule(order: int, arg: Expr) -> Expr:
    """The n-th power law for an abstract interaction: the order-th
    derivative of y^n at y = arg, for arg a unit monomial."""
    n = Coefficient.from_constant("n")
    coeff = ONE_COEFF
    for k in range(order):
        coeff = coeff * (n - Coefficient.from_rational(k))
    target = ExponentVector.of(-order, n=1)
    if len(arg.terms) != 1:
        raise ValueError("power law needs a monomial argument")
    t, c = arg.terms[0]
    if not c.is_one:
        raise ValueError("power law needs a unit monomial argument")
    out = Expr.from_coefficient(coeff)
    for atom, ev in t:
        out = out * Expr.from_atom(atom, target.scale(ev.base))
    return out


def _run_kg_potential() -> Report:
    rep = Report("examples:kg-potential")
    doc = document("kg-potential")
    j = _kg_common(rep, doc, "jres2", with_witness=True)
    sig = doc.system.sig
    P = lambda s: parse_expression(s, sig)

    pair = parameterized_pair(extend_system(doc.system, ("g1", "g2")),
                              doc.multiplier("q"), doc.current("J"))
    th1, th2 = pair.theta_for("g1"), pair.theta_for("g2")
    rep.add("theta_g1 == (-V(g2*phi), 0)",
            (th1["t"] - P("-V(g2*phi)")).is_zero and th1["x"].is_zero)
    rep.add("theta_g2 == (-g1*phi*V'(g2*phi), 0)",
            (th2["t"] - P("-g1*phi*V'(g2*phi)")).is_zero
            and th2["x"].is_zero)

    # specializing V(y) = y^n, g2 = 1, g1 = g turns the embedding current
    # into the phi^n one
    target_doc = document("kg-phi-n")
    tsig = target_doc.system.sig
    g1, g2 = sig.jet("g1"), sig.jet("g2")
    g = Expr.from_atom(tsig.jet("g"))

    def specialize(e: Expr) -> Expr:
        e = substitute_function(e, "V", _power_rule)
        return e.substitute({g2: Expr.one(), g1: g})

    rep.add("V(y)=y^n, g2=1 specializes the current to the phi^n one",
            (j.map(specialize) - target_doc.current("jres")).is_zero)
    return rep


def _run_kg_w() -> Report:
    rep = Report("examples:kg-w")
    doc = document("kg-w")
    _kg_common(rep, doc, "jres", with_witness=False)
    sig = doc.system.sig
    P = lambda s: parse_expression(s, sig)
    pair = parameterized_pair(extend_system(doc.system, ("g",)),
                              doc.multiplier("q"), doc.current("J"))
    th = pair.theta_for("g")
    rep.add("theta == (-W(x)*phi^n, 0)",
            (th["t"] - P("-W(x)*phi^n")).is_zero and th["x"].is_zero)
    return rep


# -------------------------------------------------------------- trivial-ext

def _spectator(doc: SystemDocument, q_name: str, J_name: str,
               delta_field: str, delta_s: str, values=None):
    """The system enlarged by a constant spectator field s, its multiplier
    (zero on the spectator equations), and a characteristic that moves s in
    a way that is not a symmetry yet preserves F.q on solutions."""
    if values:
        sys, mult, cur, _ = _specialized(doc, values)
        q, J = mult[q_name], cur[J_name]
    else:
        sys, q, J = doc.system, doc.multiplier(q_name), doc.current(J_name)
    sig = sys.sig.with_fields(("s",))
    field = sys.sig.fields[0]
    equations = dict(sys.equations)
    solved = list(sys.solved)
    for mu in sig.independents:
        lhs = sig.jet("s", MultiIndex.of(mu))
        equations[f"s_{mu}"] = Expr.from_atom(lhs)
        solved.append((lhs, Expr.zero()))
    enlarged = DESystem.create(sig, equations, solved,
                               name=f"{sys.name}-spectator")
    values_q = q.as_dict()
    for mu in sig.independents:
        values_q[f"s_{mu}"] = Expr.zero()
    q_s = Multiplier.of(enlarged, values_q)
    delta = {field: parse_expression(delta_field, sig),
             "s": parse_expression(delta_s, sig)}
    return enlarged, q_s, J, delta


def _run_trivial_ext() -> Report:
    rep = Report("examples:trivial-ext")
    combos = [("gkdv", f"q{i}", f"J{i}", {1: None, 2: None, 3: None,
                                          4: {"p": 1}, 5: {"p": 2}}[i])
              for i in range(1, 6)]
    combos += [("kg-phi-n", "q", "J", None), ("kg-potential", "q", "J", None),
               ("kg-w", "q", "J", None)]
    for doc_name, qn, Jn, values in combos:
        doc = document(doc_name)
        if values:
            sys, mult, cur, _ = _specialized(doc, values)
            q, J = mult[qn], cur[Jn]
        else:
            sys, q, J = doc.system, doc.multiplier(qn), doc.current(Jn)
        label = f"{doc_name} {qn}" + (f" {values}" if values else "")
        ext = trivial_extend(sys)
        lifted, current, lift_rep = lift_trivial_multiplier(ext, q, J)
        _merge(rep, lift_rep, f"{label}: lift")
        q_back, J_back, proj_rep = project_trivial_multiplier(ext, lifted)
        _merge(rep, proj_rep, f"{label}: project")
        same = all((q_back[lab] - q[lab]).is_zero
                   for lab, _ in sys.equations)
        same = same and (J_back - J).is_zero
        rep.add(f"{label}: projection recovers the pair", same)
        # the pure adjoint-symmetry {0, J} with the scaling delta-g = g
        # embeds to exactly g*J
        g = ext.promoted[0]
        rho = {lab: Expr.zero() for lab, _ in sys.equations}
        for mu in sys.sig.independents:
            rho[ext.g_label(g, mu)] = J[mu]
        j = embedding_current(ext.system, rho, ext.scaling)
        g_expr = ext.zero_order(g)
        rep.add(f"{label}: embedding of (0, J) equals g*J",
                (j - J.map(lambda e: g_expr * e)).is_zero)

    # the certificate variant that does not need a symmetry: a motion of the
    # spectator that fails the symmetry test but preserves F.q on solutions
    for doc_name, qn, Jn, dfield, ds, values in (
            ("kg-phi-n", "q", "J", "phi[x]", "x*t", None),
            ("gkdv", "q2", "J2", "u[x]", "t^2", None)):
        doc = document(doc_name)
        enlarged, q_s, J, delta = _spectator(doc, qn, Jn, dfield, ds, values)
        label = f"{doc_name} spectator"
        rep.add(f"{label}: motion is not a symmetry",
                not check_system_symmetry(enlarged, delta).passed)
        cert = theorem1_certificate(enlarged, q_s, J, delta,
                                    fq_preserving_only=True)
        _merge(rep, cert, f"{label}: certificate")
    return rep


_SUITES = {
    "gkdv": _run_gkdv,
    "kg-phi-n": _run_kg_phi_n,
    "kg-potential": _run_kg_potential,
    "kg-w": _run_kg_w,
    "trivial-ext": _run_trivial_ext,
}
