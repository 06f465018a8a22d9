"""TOML system documents: loading, validation errors and specialization."""

import pytest

from jetflux import (document_from_dict, load_system_document,
                     parse_expression)
from jetflux.errors import DocumentError
from jetflux.registry import document, document_path


def _base() -> dict:
    return {
        "system": {"independents": ["t", "x"], "fields": ["u"]},
        "equations": {"F": "u[t] - u[x,x]"},
        "solved": {"u[t]": "u[x,x]"},
    }


def test_shipped_gkdv_document_is_complete():
    doc = load_system_document(document_path("gkdv"))
    assert set(doc.multipliers) == {"q1", "q2", "q3", "q4", "q5"}
    assert set(doc.currents) == {"J1", "J2", "J3", "J4", "J5"}
    assert "sc" in doc.characteristics
    assert doc.system.sig.parameters == ("g",)


def test_minimal_document_round_trips():
    doc = document_from_dict(_base())
    sig = doc.system.sig
    assert sig.fields == ("u",)
    assert doc.system.solved
    assert not doc.multipliers and not doc.currents


def test_unknown_top_level_table_is_rejected():
    raw = _base()
    raw["extras"] = {}
    with pytest.raises(DocumentError, match="extras: unknown top-level table"):
        document_from_dict(raw)


def test_unknown_system_key_is_rejected():
    raw = _base()
    raw["system"]["dimension"] = 2
    with pytest.raises(DocumentError, match="system.dimension: unknown key"):
        document_from_dict(raw)


def test_missing_required_key_names_the_path():
    raw = _base()
    del raw["system"]["fields"]
    with pytest.raises(DocumentError, match="system.fields"):
        document_from_dict(raw)


def test_syntax_error_carries_the_key_path():
    raw = _base()
    raw["equations"]["F"] = "u[t] - "
    with pytest.raises(DocumentError, match="equations.F"):
        document_from_dict(raw)


def test_undeclared_identifier_carries_the_key_path():
    raw = _base()
    raw["equations"]["F"] = "u[t] - v[x,x]"
    with pytest.raises(DocumentError, match="equations.F"):
        document_from_dict(raw)


def test_non_increasing_solved_rule_is_rejected():
    raw = _base()
    raw["solved"] = {"u[x]": "u[x,x]"}
    with pytest.raises(DocumentError, match="solved"):
        document_from_dict(raw)


def test_solved_lhs_must_be_a_single_jet():
    raw = _base()
    raw["solved"] = {"2*u[t]": "u[x,x]"}
    with pytest.raises(DocumentError, match="single jet"):
        document_from_dict(raw)


def test_current_length_must_match_the_independents():
    raw = _base()
    raw["currents"] = {"J": ["u"]}
    with pytest.raises(DocumentError, match=r"currents.J: expected an array"):
        document_from_dict(raw)


def test_bare_multiplier_string_needs_a_single_equation():
    raw = _base()
    raw["equations"]["G"] = "u[t] - u[x,x]"
    raw["multipliers"] = {"q": "u"}
    with pytest.raises(DocumentError, match="single-equation"):
        document_from_dict(raw)


def test_multiplier_table_rejects_unknown_labels():
    raw = _base()
    raw["multipliers"] = {"q": {"H": "u"}}
    with pytest.raises(DocumentError, match=r"unknown equation labels \['H'\]"):
        document_from_dict(raw)


def test_multiplier_table_fills_missing_labels_with_zero():
    raw = _base()
    raw["equations"]["G"] = "u[t] - u[x,x]"
    raw["multipliers"] = {"q": {"F": "u"}}
    doc = document_from_dict(raw)
    assert doc.multiplier("q")["G"].is_zero


def test_characteristic_entries_must_be_declared_names():
    raw = _base()
    raw["characteristics"] = {"d": {"v": "u"}}
    with pytest.raises(DocumentError, match="not a declared field"):
        document_from_dict(raw)


def test_unknown_named_objects_list_the_known_ones():
    doc = document("gkdv")
    with pytest.raises(DocumentError, match="q1"):
        doc.multiplier("q9")
    with pytest.raises(DocumentError, match="J1"):
        doc.current("J9")
    with pytest.raises(DocumentError, match="sc"):
        doc.characteristic("zz")


def test_specialize_fixes_exponents_and_constants():
    doc = document("gkdv")
    at2 = doc.specialize({"p": 2})
    sig = at2.system.sig
    P = lambda s: parse_expression(s, sig)
    assert (at2.system.equation("F") - P("u[t] + g*u^2*u[x] + u[x,x,x]")).is_zero
    assert (at2.multiplier("q5")["F"] - doc.multiplier("q5")["F"]
            .substitute_constants({"p": 2})).is_zero
    # the characteristic specializes too
    assert (at2.characteristic("sc")["g"] - P("-2*g")).is_zero


def test_specialize_with_no_values_is_identity():
    doc = document("gkdv")
    assert doc.specialize({}) is doc


def test_invalid_toml_reports_the_file():
    import tempfile, os
    with tempfile.NamedTemporaryFile("w", suffix=".toml", delete=False) as fh:
        fh.write("[system\n")
        path = fh.name
    try:
        with pytest.raises(DocumentError, match="invalid TOML"):
            load_system_document(path)
    finally:
        os.unlink(path)


def test_missing_file_is_a_document_error():
    with pytest.raises(DocumentError, match="no such document"):
        load_system_document("/nonexistent/system.toml")
