"""Command-line interface: exit codes, plain and JSON output."""

import json

import pytest

from jetflux.cli import main
from jetflux.registry import document, document_path


GKDV = str(document_path("gkdv"))


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_weight_prints_the_bare_number(capsys):
    code, out, err = run(capsys, "weight", "--system", GKDV,
                         "--char", "sc", "--current", "J3")
    assert code == 0
    assert out.strip() == "2"
    assert err == ""


def test_weight_of_a_multiplier(capsys):
    code, out, _ = run(capsys, "weight", "--system", GKDV,
                       "--char", "sc", "--q", "q2")
    assert code == 0
    assert out.strip() == "1"


def test_shipped_names_work_without_a_path(capsys):
    code, out, _ = run(capsys, "weight", "--system", "gkdv",
                       "--char", "sc", "--current", "J3")
    assert code == 0
    assert out.strip() == "2"


def test_determining_passes_only_at_the_special_exponent(capsys):
    code, out, _ = run(capsys, "determining", "--system", GKDV,
                       "--q", "q4", "--set", "p=1")
    assert code == 0
    code, out, _ = run(capsys, "determining", "--system", GKDV, "--q", "q4")
    assert code == 1
    assert "FAIL" in out


def test_generic_multipliers_pass_determining(capsys):
    for q in ("q1", "q2", "q3"):
        code, _, _ = run(capsys, "determining", "--system", GKDV, "--q", q)
        assert code == 0, q


def test_verify_pair_exit_codes(capsys):
    code, _, _ = run(capsys, "verify-pair", "--system", GKDV,
                     "--q", "q2", "--current", "J2")
    assert code == 0
    code, out, _ = run(capsys, "verify-pair", "--system", GKDV,
                       "--q", "q2", "--current", "J3")
    assert code == 1


def test_json_output_matches_the_schema(capsys):
    code, out, _ = run(capsys, "verify-pair", "--system", GKDV,
                       "--q", "q2", "--current", "J2", "--json")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) >= {"command", "verdict", "checks", "millis"}
    assert doc["verdict"] == "pass"
    assert isinstance(doc["millis"], (int, float))
    for check in doc["checks"]:
        assert set(check) == {"name", "verdict", "residuals"}
        assert check["verdict"] in ("pass", "fail")


def test_json_residuals_reparse_to_the_same_expression(capsys):
    from jetflux import parse_expression, render
    code, out, _ = run(capsys, "determining", "--system", GKDV,
                       "--q", "q4", "--json")
    assert code == 1
    doc = json.loads(out)
    sig = document("gkdv").system.sig
    residuals = [r for c in doc["checks"] for r in c["residuals"]]
    assert residuals
    for text in residuals:
        assert render(parse_expression(text, sig)) == text


def test_nonexistent_system_is_an_input_error(capsys):
    code, out, err = run(capsys, "determining", "--system", "nowhere",
                         "--q", "q1")
    assert code == 2
    assert out == ""
    assert err.startswith("error:")


def test_unknown_object_name_is_an_input_error(capsys):
    code, _, err = run(capsys, "verify-pair", "--system", GKDV,
                       "--q", "q9", "--current", "J2")
    assert code == 2
    assert "q1" in err  # lists the declared names


def test_set_rejects_undeclared_constants(capsys):
    code, _, err = run(capsys, "determining", "--system", GKDV,
                       "--q", "q1", "--set", "zeta=3")
    assert code == 2


def test_malformed_set_is_an_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["determining", "--system", GKDV, "--q", "q1", "--set", "p"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_unknown_subcommand_is_an_argparse_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_symmetry_fails_on_the_base_and_passes_on_the_extension(capsys):
    code, out, _ = run(capsys, "symmetry", "--system", GKDV, "--char", "sc")
    assert code == 1
    assert "p*g*u^p*u[x]" in out
    code, _, _ = run(capsys, "symmetry", "--system", GKDV, "--char", "sc",
                     "--extend")
    assert code == 0


def test_theorem2_with_omega(capsys):
    code, out, _ = run(capsys, "theorem2", "--system", GKDV, "--q", "q2",
                       "--current", "J2", "--char", "sc", "--omega", "2")
    assert code == 0
    assert "on solutions j == (2) * J" in out


def test_equiv_without_witness_is_necessary_only(capsys):
    code, out, _ = run(capsys, "equiv", "--system", GKDV,
                       "--current", "J1", "--current", "J2")
    assert code == 1
    assert "necessary-only" in out


def test_equiv_of_a_current_with_itself_passes(capsys):
    code, out, _ = run(capsys, "equiv", "--system", GKDV,
                       "--current", "J1", "--current", "J1")
    assert code == 0


def test_examples_run_all(capsys):
    code, out, _ = run(capsys, "examples", "run", "all")
    assert code == 0
    for name in ("gkdv", "kg-phi-n", "kg-potential", "kg-w", "trivial-ext"):
        assert name in out


def test_examples_run_unknown_name(capsys):
    code, _, err = run(capsys, "examples", "run", "kdv")
    assert code == 2
    assert "gkdv" in err


def test_noether_energy_current(capsys):
    kg = str(document_path("kg-phi-n"))
    code, out, _ = run(capsys, "noether", "--system", kg,
                       "--lagrangian", "L", "--char", "tr",
                       "--current", "Ktr")
    assert code == 0
    assert "noether current" in out


def test_insert_parameter_from_a_parameterless_document(tmp_path, capsys):
    doc = tmp_path / "bare.toml"
    doc.write_text(
        '[system]\nindependents = ["t", "x"]\nfields = ["u"]\n'
        'exponent_constants = ["p"]\n\n'
        '[equations]\nF = "u[t] + u^p*u[x] + u[x,x,x]"\n\n'
        '[solved]\n"u[t]" = "-u^p*u[x] - u[x,x,x]"\n\n'
        '[multipliers]\none = "1"\n\n'
        '[currents]\nJ = ["u", "u^(p+1)/(p+1) + u[x,x]"]\n')
    code, out, _ = run(capsys, "insert-parameter", "--system", str(doc),
                       "--q", "one", "--current", "J",
                       "--eta", "1", "--rho", "0")
    assert code == 0
    assert "g^(-p)" in out
