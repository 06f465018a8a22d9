"""TOML system documents: one file declares a system and its named objects.

Schema::

    [system]
    name = "gkdv"                     # optional
    independents = ["t", "x"]
    fields = ["u"]
    constants = ["m"]                 # generic constants
    exponent_constants = ["p"]        # may appear in exponents
    parameters = ["g"]
    functions = ["V"]                 # abstract function symbols
    notes = "free text"               # optional

    [equations]
    F = "u[t] + g*u^p*u[x] + u[x,x,x]"

    [solved]                          # optional rewrite rules, lhs a jet
    "u[t]" = "-g*u^p*u[x] - u[x,x,x]"

    [multipliers]                     # a string (single equation) or a
    q1 = "1"                          # label -> expression table
    q4 = { F = "x - t*g*u" }

    [currents]                        # arrays ordered as independents
    J1 = ["u", "g*u^(p+1)/(p+1) + u[x,x]"]

    [characteristics]                 # tables field -> expression
    sc = { u = "u", g = "-p*g" }

    [lagrangians]                     # optional named Lagrangians
    L = "1/2*phi[t]^2 - 1/2*phi[x]^2"

Every violation raises DocumentError carrying the offending key path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import DocumentError, JetfluxError
from .expr import ConstantSymbol, Expr, Jet
from .jets import Characteristic, SystemSignature
from .parser import parse_expression
from .systems import Current, DESystem, Multiplier


@dataclass(frozen=True)
class SystemDocument:
    """A loaded document: the system plus its named objects."""

    system: DESystem
    multipliers: Mapping[str, Multiplier] = field(default_factory=dict)
    currents: Mapping[str, Current] = field(default_factory=dict)
    characteristics: Mapping[str, Characteristic] = field(default_factory=dict)
    lagrangians: Mapping[str, Expr] = field(default_factory=dict)
    notes: str = ""

    def multiplier(self, name: str) -> Multiplier:
        return _named(self.multipliers, name, "multiplier")

    def current(self, name: str) -> Current:
        return _named(self.currents, name, "current")

    def characteristic(self, name: str) -> Characteristic:
        return _named(self.characteristics, name, "characteristic")

    def lagrangian(self, name: str) -> Expr:
        return _named(self.lagrangians, name, "lagrangian")

    def specialize(self, values: Mapping[str, object]) -> "SystemDocument":
        """The same document with a subset of constants fixed to rationals."""
        if not values:
            return self
        sub = lambda e: e.substitute_constants(values)
        return SystemDocument(
            self.system.specialize(values),
            {n: m.map(sub) for n, m in self.multipliers.items()},
            {n: c.map(sub) for n, c in self.currents.items()},
            {n: {f: sub(e) for f, e in d.items()}
             for n, d in self.characteristics.items()},
            {n: sub(e) for n, e in self.lagrangians.items()},
            self.notes)


def _named(table, name, kind):
    try:
        return table[name]
    except KeyError:
        known = ", ".join(sorted(table)) or "none"
        raise DocumentError(f"unknown {kind} {name!r} (declared: {known})") \
            from None


def _want(table: Mapping, key: str, types, path: str, default=None,
          required: bool = False):
    if key not in table:
        if required:
            raise DocumentError(f"{path}.{key}: required key missing")
        return default
    value = table[key]
    if not isinstance(value, types):
        raise DocumentError(f"{path}.{key}: expected "
                            f"{getattr(types, '__name__', types)}, "
                            f"got {type(value).__name__}")
    return value

def _name_list(table: Mapping, key: str, path: str,
               required: bool = False) -> tuple[str, ...]:
    value = _want(table, key, list, path, default=[], required=required)
    for i, item in enumerate(value):
        if not isinstance(item, str):
            raise DocumentError(f"{path}.{key}[{i}]: expected string")
    return tuple(value)


def _parse(text, sig: SystemSignature, path: str) -> Expr:
    if not isinstance(text, str):
        raise DocumentError(f"{path}: expected expression string, "
                            f"got {type(text).__name__}")
    try:
        return parse_expression(text, sig)
    except JetfluxError as exc:
        raise DocumentError(f"{path}: {exc}") from exc


def _parse_jet(text: str, sig: SystemSignature, path: str) -> Jet:
    e = _parse(text, sig, path)
    terms = e.terms
    if len(terms) == 1:
        t, c = terms[0]
        if c.is_one and len(t) == 1:
            atom, ev = t[0]
            if isinstance(atom, Jet) and ev.is_constant and ev.base == 1:
                return atom
    raise DocumentError(f"{path}: solved-rule lhs must be a single jet, "
                        f"got {text!r}")


_SYSTEM_KEYS = {"name", "independents", "fields", "constants",
                "exponent_constants", "parameters", "functions", "notes"}
_TOP_KEYS = {"system", "equations", "solved", "multipliers", "currents",
             "characteristics", "lagrangians"}


def load_system_document(path: str | Path) -> SystemDocument:
    """Read, parse and validate a TOML system document."""
    path = Path(path)
    try:
        raw = tomllib.loads(path.read_text())
    except FileNotFoundError:
        raise DocumentError(f"no such document: {path}") from None
    except tomllib.TOMLDecodeError as exc:
        raise DocumentError(f"{path}: invalid TOML: {exc}") from exc
    return document_from_dict(raw, origin=str(path))


def document_from_dict(raw: Mapping, origin: str = "document") -> SystemDocument:
    for key in raw:
        if key not in _TOP_KEYS:
            raise DocumentError(f"{key}: unknown top-level table")

    head = _want(raw, "system", dict, origin, required=True)
    for key in head:
        if key not in _SYSTEM_KEYS:
            raise DocumentError(f"system.{key}: unknown key")
    name = _want(head, "name", str, "system", default="")
    notes = _want(head, "notes", str, "system", default="")
    constants = tuple(
        [ConstantSymbol(n) for n in _name_list(head, "constants", "system")]
        + [ConstantSymbol(n, role="exponent")
           for n in _name_list(head, "exponent_constants", "system")])
    try:
        sig = SystemSignature(
            independents=_name_list(head, "independents", "system",
                                    required=True),
            fields=_name_list(head, "fields", "system", required=True),
            parameters=_name_list(head, "parameters", "system"),
            constants=constants,
            functions=_name_list(head, "functions", "system"))
    except JetfluxError as exc:
        raise DocumentError(f"system: {exc}") from exc

    eq_table = _want(raw, "equations", dict, origin, required=True)
    if not eq_table:
        raise DocumentError("equations: at least one equation required")
    equations = {label: _parse(text, sig, f"equations.{label}")
                 for label, text in eq_table.items()}

    solved = []
    for lhs_text, rhs in _want(raw, "solved", dict, origin, default={}).items():
        lhs = _parse_jet(lhs_text, sig, f"solved.{lhs_text}")
        solved.append((lhs, _parse(rhs, sig, f"solved.{lhs_text}")))

    try:
        system = DESystem.create(sig, equations, solved, name=name)
    except JetfluxError as exc:
        raise DocumentError(f"{origin}: {exc}") from exc

    multipliers = {}
    for mname, spec in _want(raw, "multipliers", dict, origin,
                             default={}).items():
        mpath = f"multipliers.{mname}"
        if isinstance(spec, str):
            if len(system.equations) != 1:
                raise DocumentError(
                    f"{mpath}: a bare string needs a single-equation system; "
                    f"use a label table")
            values = {system.labels[0]: _parse(spec, sig, mpath)}
        elif isinstance(spec, dict):
            unknown = set(spec) - set(system.labels)
            if unknown:
                raise DocumentError(
                    f"{mpath}: unknown equation labels {sorted(unknown)}")
            values = {label: _parse(text, sig, f"{mpath}.{label}")
                      for label, text in spec.items()}
            for label in system.labels:
                values.setdefault(label, Expr.zero())
        else:
            raise DocumentError(f"{mpath}: expected string or label table")
        multipliers[mname] = Multiplier.of(system, values)

    currents = {}
    for cname, spec in _want(raw, "currents", dict, origin, default={}).items():
        cpath = f"currents.{cname}"
        if not isinstance(spec, list) or len(spec) != len(sig.independents):
            raise DocumentError(
                f"{cpath}: expected an array of {len(sig.independents)} "
                f"expressions ordered as {list(sig.independents)}")
        currents[cname] = Current.of(sig, [
            _parse(text, sig, f"{cpath}[{i}]") for i, text in enumerate(spec)])

    characteristics = {}
    for dname, spec in _want(raw, "characteristics", dict, origin,
                             default={}).items():
        dpath = f"characteristics.{dname}"
        if not isinstance(spec, dict):
            raise DocumentError(f"{dpath}: expected a field -> expression table")
        delta = {}
        for fname, text in spec.items():
            if fname not in sig.fields and fname not in sig.parameters:
                raise DocumentError(f"{dpath}.{fname}: not a declared field "
                                    f"or parameter")
            delta[fname] = _parse(text, sig, f"{dpath}.{fname}")
        characteristics[dname] = delta

    lagrangians = {
        lname: _parse(text, sig, f"lagrangians.{lname}")
        for lname, text in _want(raw, "lagrangians", dict, origin,
                                 default={}).items()}

    return SystemDocument(system, multipliers, currents, characteristics,
                          lagrangians, notes=notes)
