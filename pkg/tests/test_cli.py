"""Command-line front end: output and exit codes."""
import json

import pytest

from unstable_ext.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("word,expected", [("Sq2 Sq2", "Sq^{3,1}"), ("Sq3", "Sq^{3}"), ("Sq1 Sq1", "0")])
def test_adem(capsys, word, expected):
    code, out, _ = run(capsys, "adem", *word.split())
    assert code == 0 and out.strip() == expected


def test_adem_parse_failure(capsys):
    code, _, err = run(capsys, "adem", "Sqx")
    assert code == 2 and "error" in err


def test_resolve_h4(capsys):
    code, out, _ = run(capsys, "resolve", "H(4)", "--steps", "3")
    assert code == 0
    assert out.splitlines()[0] == "J(8) ; J(7,6) ; J(6,4)"


def test_resolve_h2_terminates(capsys):
    code, out, _ = run(capsys, "resolve", "H(2)", "--steps", "3")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "J(2)" and "terminates" in lines[1]


def test_resolve_projective_cover(capsys):
    code, out, _ = run(capsys, "resolve", "SigmaF2", "--projective", "--steps", "1", "--max-degree", "16")
    assert code == 0 and out.splitlines()[0] == "F(1)"


def test_resolve_flavor_mismatch(capsys):
    code, _, err = run(capsys, "resolve", "F(1)", "--steps", "2")
    assert code == 2 and "--projective" in err


def test_ext_cells(capsys):
    code, out, _ = run(capsys, "ext", "T(F(1),F(1))", "F(1)", "--d", "5", "--max-degree", "64")
    assert code == 0 and out.splitlines()[-1].strip() == "d=5: 1"
    code, out, _ = run(capsys, "ext", "F(1)", "F(1)", "--d", "3")
    assert out.splitlines()[-1].strip() == "d=3: 0"
    code, out, _ = run(capsys, "ext", "Phi^1 F(1)", "F(1)", "--d", "2")
    assert out.splitlines()[-1].strip() == "d=2: 1"


def test_ext_bad_range(capsys):
    code, _, _ = run(capsys, "ext", "F(1)", "F(1)", "--d", "-1")
    assert code == 2


def test_ext_json_is_byte_identical(capsys, tmp_path):
    out_file = tmp_path / "ext.json"
    run(capsys, "ext", "Sigma F2", "F(1)", "--d", "3", "--json", "--out", str(out_file))
    first = out_file.read_text()
    run(capsys, "ext", "Sigma F2", "F(1)", "--d", "3", "--json", "--out", str(out_file))
    assert out_file.read_text() == first
    assert json.loads(first)["at_window"]["3"] == 1


def test_verify_counterexamples(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "counterexamples")
    assert code == 0
    assert "kernel_witness" in out and "limitation" in out


def test_verify_unknown_suite(capsys):
    code, _, _ = run(capsys, "verify", "--suite", "bogus")
    assert code == 2


def test_help_documents_grammar(capsys):
    code, out, _ = run(capsys, "resolve", "--help")
    assert code == 0 and "Phi[^r] X" in out and "T(X,Y)" in out
