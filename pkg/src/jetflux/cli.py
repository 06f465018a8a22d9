"""Command-line surface: each construction as a subcommand over documents.

Exit codes: 0 every check passed, 1 a check failed or the verdict is only a
necessary condition, 2 malformed input (arguments, documents, expressions).
"""

from __future__ import annotations

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from .documents import SystemDocument, load_system_document
from .embedding import (check_adjoint_symmetry, check_system_symmetry,
                        embedding_current, split_embedding_current,
                        theorem1_certificate)
from .errors import DocumentError, JetfluxError
from .expr import Expr
from .extension import (ExtensionPlan, current_weight, extend_system,
                        insert_parameter, lift_parameterized_multiplier,
                        lift_trivial_multiplier, parameterized_pair,
                        scc_check, theorem2_current, trivial_extend)
from .jets import scaling_weight, variation
from .noether import SymmetryWitness, noether_current, variation_split
from .registry import document_path, example_names, run_example
from .render import render, render_coefficient, render_current
from .report import Check, Report
from .systems import (Current, EquivalenceWitness, Multiplier,
                      currents_equivalent, divergence, is_conserved_on_shell,
                      multiplier_determining, verify_multiplier_current_pair)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}")


def _assignment(text: str) -> tuple[str, Fraction]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip():
        raise argparse.ArgumentTypeError(
            f"expected <constant>=<rational>, got {text!r}")
    return name.strip(), _fraction(value.strip())


def _load_document(args: argparse.Namespace) -> SystemDocument:
    spec = args.system
    if spec is None:
        raise DocumentError("this command needs --system <document>")
    path = Path(spec)
    if not path.is_file():
        try:
            path = document_path(Path(spec).stem)
        except DocumentError as exc:
            raise DocumentError(f"no such file {spec!r} and {exc}") from None
    doc = load_system_document(path)
    values = dict(args.set or ())
    if values:
        known = {c.name for c in doc.system.sig.constants}
        unknown = sorted(set(values) - known)
        if unknown:
            raise DocumentError(
                "--set names undeclared constants: " + ", ".join(unknown))
        doc = doc.specialize(values)
    return doc


def _single(values, flag: str, kind: str) -> str:
    values = values or []
    if not values:
        raise DocumentError(f"this command needs {flag} <{kind}>")
    if len(values) > 1:
        raise DocumentError(f"{flag} given {len(values)} times; expected one")
    return values[0]


def _current_str(j: Current) -> str:
    return render_current(j.as_dict())


def _multiplier_str(q: Multiplier) -> str:
    return "{" + ", ".join(f"{lab}: {render(e)}"
                           for lab, e in q.components) + "}"


def _promoted(doc: SystemDocument, args: argparse.Namespace):
    params = tuple(getattr(args, "param", None) or doc.system.sig.parameters)
    if not params:
        raise DocumentError("system declares no parameters to promote")
    return extend_system(doc.system, params)


# ---------------------------------------------------------------- handlers

def _cmd_determining(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    rep = Report("determining")
    for f, e in multiplier_determining(doc.system, q).items():
        rep.add(f"euler operator in {f} annihilates F.q", e.is_zero,
                "" if e.is_zero else render(e))
    return rep, None


def _cmd_verify_pair(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    J = doc.current(_single(args.current, "--current", "current"))
    return verify_multiplier_current_pair(doc.system, q, J), None


def _cmd_adjoint(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "adjoint values"))
    return check_adjoint_symmetry(doc.system, q.as_dict()), None


def _cmd_symmetry(doc, args):
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    return check_system_symmetry(doc.system, delta), None


def _cmd_embed_current(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "adjoint values"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    j = embedding_current(doc.system, q.as_dict(), delta)
    rep = Report("embed-current")
    rep.notes.append("j = " + _current_str(j))
    if doc.system.solved:
        ok = is_conserved_on_shell(doc.system, j)
        rep.add("current conserved on solutions", ok.passed,
                "" if ok.passed else ok.checks[0].detail)
    else:
        rep.notes.append("no solved form: conservation not checked")
    return rep, None


def _cmd_split(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    frozen_source, frozen_mult, full = split_embedding_current(
        doc.system, q, delta)
    rep = Report("split")
    gap = frozen_source + frozen_mult - full
    rep.add("parts sum to the boundary current", gap.is_zero)
    rep.notes.append("full = " + _current_str(full))
    rep.notes.append("frozen-source part = " + _current_str(frozen_source))
    rep.notes.append("frozen-multiplier part = " + _current_str(frozen_mult))
    return rep, None


def _cmd_theorem1(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    J = doc.current(_single(args.current, "--current", "current"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    rep = theorem1_certificate(doc.system, q, J, delta,
                               fq_preserving_only=args.fq_preserving)
    return rep, None


def _cmd_extend(doc, args):
    ext = _promoted(doc, args)
    rep = Report("extend")
    for g in ext.promoted:
        rep.add(f"constancy equations appended for {g}", True)
        for mu in doc.system.sig.independents:
            label = ext.g_label(g, mu)
            rep.notes.append(
                f"{label}: {render(ext.system.equation(label))} = 0")
    return rep, None


def _cmd_lift(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    J = doc.current(_single(args.current, "--current", "current"))
    ext = _promoted(doc, args)
    lifted, rep = lift_parameterized_multiplier(ext, q, J)
    rep.notes.append("lifted multiplier = " + _multiplier_str(lifted))
    return rep, None


def _cmd_theorem2(doc, args):
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    J = doc.current(_single(args.current, "--current", "current"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    ext = _promoted(doc, args)
    pair = parameterized_pair(ext, q, J)
    j, rep = theorem2_current(ext, pair, delta, omega=args.omega)
    rep.notes.append("j = " + _current_str(j))
    return rep, None


def _cmd_scc(doc, args):
    if args.omega is None:
        raise DocumentError("scc needs --omega <rational>")
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    return scc_check(_promoted(doc, args), q, delta, args.omega), None


def _cmd_trivial_extend(doc, args):
    ext = trivial_extend(doc.system)
    g = ext.promoted[0]
    rep = Report("trivial-extend")
    rep.add(f"fresh parameter {g} appended with constancy equations", True)
    if args.q or args.current:
        q = doc.multiplier(_single(args.q, "--q", "multiplier"))
        J = doc.current(_single(args.current, "--current", "current"))
        lifted, current, lift_rep = lift_trivial_multiplier(ext, q, J)
        for c in lift_rep.checks:
            rep.checks.append(c)
        rep.notes.append("lifted multiplier = " + _multiplier_str(lifted))
        rep.notes.append("lifted current = " + _current_str(current))
    return rep, None


def _cmd_insert_parameter(doc, args):
    if args.eta is None or args.rho is None:
        raise DocumentError(
            "insert-parameter needs --eta <rational> and --rho <rational>")
    q = doc.multiplier(_single(args.q, "--q", "multiplier"))
    J = doc.current(_single(args.current, "--current", "current"))
    plan = ExtensionPlan.of(args.eta, args.rho)
    new_sys, pair, rep = insert_parameter(doc.system, q, J, plan)
    for label, F in new_sys.equations:
        rep.notes.append(f"{label}: {render(F)} = 0")
    rep.notes.append("multiplier = " + _multiplier_str(pair.q))
    rep.notes.append("current = " + _current_str(pair.J))
    return rep, None


def _common_weight(sig, exprs, delta):
    weight = None
    for e in exprs:
        if e.is_zero:
            continue
        w = scaling_weight(sig, e, delta)
        if w is None or (weight is not None and w != weight):
            return None
        weight = w
    return weight


def _cmd_weight(doc, args):
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    sig = doc.system.sig
    if args.current:
        name = _single(args.current, "--current", "current")
        w = current_weight(sig, doc.current(name), delta)
        what = f"current {name}"
    elif args.q:
        name = _single(args.q, "--q", "multiplier")
        q = doc.multiplier(name)
        w = _common_weight(sig, (e for _, e in q.components), delta)
        what = f"multiplier {name}"
    elif args.lagrangian:
        name = _single(args.lagrangian, "--lagrangian", "lagrangian")
        w = scaling_weight(sig, doc.lagrangian(name), delta)
        what = f"lagrangian {name}"
    else:
        raise DocumentError(
            "weight needs one of --current, --q, --lagrangian")
    rep = Report("weight")
    rep.add(f"{what} is homogeneous under the characteristic", w is not None)
    if w is None:
        return rep, None
    text = render_coefficient(w)
    rep.notes.append(f"weight = {text}")
    return rep, text


def _cmd_equiv(doc, args):
    names = args.current or []
    if len(names) != 2:
        raise DocumentError("equiv needs --current twice: the two currents")
    A, B = doc.current(names[0]), doc.current(names[1])
    witness = None
    if args.bar or args.hat:
        witness = EquivalenceWitness(
            doc.current(args.bar) if args.bar else None,
            doc.current(args.hat) if args.hat else None)
    return currents_equivalent(doc.system, A, B, witness), None


def _cmd_noether(doc, args):
    L = doc.lagrangian(_single(args.lagrangian, "--lagrangian", "lagrangian"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    sig = doc.system.sig
    if args.current:
        K = doc.current(_single(args.current, "--current", "current K"))
    else:
        K = Current.of(sig, [Expr.zero()] * len(sig.independents))
    J, rep = noether_current(doc.system, L, SymmetryWitness(delta, K),
                             mode=args.mode)
    rep.notes.append("noether current = " + _current_str(J))
    return rep, None


def _cmd_ibp(doc, args):
    L = doc.lagrangian(_single(args.lagrangian, "--lagrangian", "lagrangian"))
    delta = doc.characteristic(_single(args.char, "--char", "characteristic"))
    sig = doc.system.sig
    el_part, j = variation_split(sig, L, delta)
    resid = variation(sig, L, delta) - el_part - divergence(sig, j)
    rep = Report("ibp")
    rep.add("variation(L) == Euler part + Div(boundary current)",
            resid.is_zero, "" if resid.is_zero else render(resid))
    rep.notes.append("euler part = " + render(el_part))
    rep.notes.append("boundary current = " + _current_str(j))
    return rep, None


def _cmd_examples(args):
    names = example_names() if args.name == "all" else (args.name,)
    combined = Report("examples")
    lines = []
    for n in names:
        r = run_example(n)
        combined.checks.extend(
            Check(f"{n}: {c.name}", c.passed, c.detail) for c in r.checks)
        combined.notes.extend(f"{n}: {note}" for note in r.notes)
        lines.append(f"{n}: {r.verdict} ({len(r.checks)} checks)")
        lines.extend(f"  FAIL {c.name}" + (f": {c.detail}" if c.detail else "")
                     for c in r.checks if not c.passed)
    return combined, "\n".join(lines)


# ------------------------------------------------------------------ parser

def _add_object_flags(p: argparse.ArgumentParser, *flags: str) -> None:
    spec = {
        "q": ("--q", "named multiplier (or per-equation adjoint values)"),
        "current": ("--current", "named current (repeatable where two are "
                                 "needed)"),
        "char": ("--char", "named characteristic"),
        "lagrangian": ("--lagrangian", "named lagrangian"),
    }
    for f in flags:
        flag, help_text = spec[f]
        p.add_argument(flag, action="append", metavar="NAME", help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="jetflux",
        description="Exact conserved-current constructions over system "
                    "documents.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--system", metavar="PATH",
                        help="TOML system document (a path, or the name of "
                             "a shipped example document)")
    common.add_argument("--set", action="append", type=_assignment,
                        metavar="CONST=RATIONAL", default=[],
                        help="fix a declared constant to an exact rational "
                             "(repeatable)")
    common.add_argument("--json", action="store_true",
                        help="machine-readable report")

    sub = parser.add_subparsers(dest="command", required=True)

    def cmd(name, handler, help_text, *, doc=True, parents=(common,)):
        p = sub.add_parser(name, parents=list(parents), help=help_text)
        p.set_defaults(handler=handler, needs_doc=doc)
        return p

    p = cmd("determining", _cmd_determining,
            "multiplier determining equations hold identically")
    _add_object_flags(p, "q")

    p = cmd("verify-pair", _cmd_verify_pair,
            "F.q == Div J off shell")
    _add_object_flags(p, "q", "current")

    p = cmd("adjoint", _cmd_adjoint,
            "per-equation values solve the adjoint linearization on "
            "solutions")
    _add_object_flags(p, "q")

    p = cmd("symmetry", _cmd_symmetry,
            "characteristic maps solutions to solutions")
    _add_object_flags(p, "char")

    p = cmd("embed-current", _cmd_embed_current,
            "boundary current of the auxiliary lagrangian for an "
            "adjoint-symmetry/symmetry pair")
    _add_object_flags(p, "q", "char")

    p = cmd("split", _cmd_split,
            "frozen-source / frozen-multiplier split of the boundary "
            "current")
    _add_object_flags(p, "q", "char")

    p = cmd("theorem1", _cmd_theorem1,
            "boundary current differs from the varied current by an "
            "identically conserved one")
    _add_object_flags(p, "q", "current", "char")
    p.add_argument("--fq-preserving", action="store_true",
                   help="only require the variation of F.q to vanish on "
                        "solutions instead of a full system symmetry")

    p = cmd("extend", _cmd_extend,
            "promote parameters to fields with constancy equations")
    p.add_argument("--param", action="append", metavar="NAME",
                   help="parameter to promote (default: all declared)")

    p = cmd("lift", _cmd_lift,
            "lift a base pair to the extended system")
    _add_object_flags(p, "q", "current")
    p.add_argument("--param", action="append", metavar="NAME")

    p = cmd("theorem2", _cmd_theorem2,
            "embedding current of the extension for a lifted pair and a "
            "symmetry characteristic")
    _add_object_flags(p, "q", "current", "char")
    p.add_argument("--param", action="append", metavar="NAME")
    p.add_argument("--omega", type=_fraction, metavar="RATIONAL",
                   help="also check j == omega * J on solutions")

    p = cmd("scc", _cmd_scc,
            "scaled conservation conditions for a multiplier and a "
            "characteristic")
    _add_object_flags(p, "q", "char")
    p.add_argument("--param", action="append", metavar="NAME")
    p.add_argument("--omega", type=_fraction, metavar="RATIONAL")

    p = cmd("trivial-extend", _cmd_trivial_extend,
            "append a fresh parameter the system never mentions; "
            "optionally lift a pair")
    _add_object_flags(p, "q", "current")

    p = cmd("insert-parameter", _cmd_insert_parameter,
            "rescale a pair by powers of a fresh parameter to target "
            "scaling weights")
    _add_object_flags(p, "q", "current")
    p.add_argument("--eta", type=_fraction, metavar="RATIONAL",
                   help="target source weight")
    p.add_argument("--rho", type=_fraction, metavar="RATIONAL",
                   help="target multiplier weight")

    p = cmd("weight", _cmd_weight,
            "common scaling weight of a named object under a "
            "characteristic")
    _add_object_flags(p, "q", "current", "char", "lagrangian")

    p = cmd("equiv", _cmd_equiv,
            "currents agree up to an identically conserved part plus one "
            "vanishing on solutions")
    _add_object_flags(p, "current")
    p.add_argument("--bar", metavar="NAME",
                   help="witness current, identically conserved")
    p.add_argument("--hat", metavar="NAME",
                   help="witness current, vanishing on solutions")

    p = cmd("noether", _cmd_noether,
            "noether current of a lagrangian symmetry witness")
    _add_object_flags(p, "lagrangian", "char", "current")
    p.add_argument("--mode", choices=("off-shell", "on-shell"),
                   default="off-shell")

    p = cmd("ibp", _cmd_ibp,
            "integration-by-parts split of the variation of a lagrangian")
    _add_object_flags(p, "lagrangian", "char")

    ex = sub.add_parser("examples", help="run the shipped example suites")
    ex_sub = ex.add_subparsers(dest="action", required=True)
    run_p = ex_sub.add_parser("run", help="run one suite or all of them")
    run_p.add_argument("name", metavar="NAME|all",
                       help="one of: " + ", ".join(example_names())
                            + ", all")
    run_p.add_argument("--json", action="store_true")
    run_p.set_defaults(handler=_cmd_examples, needs_doc=False)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        if args.needs_doc:
            rep, plain = args.handler(_load_document(args), args)
        else:
            rep, plain = args.handler(args)
    except JetfluxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    rep.millis = round((time.perf_counter() - started) * 1000.0, 3)
    if args.json:
        print(rep.to_json())
    elif plain is not None:
        print(plain)
    else:
        print(rep.to_text())
    return rep.exit_code


if __name__ == "__main__":
    raise SystemExit(main())
