"""Command line behavior: exit codes, report files, and printed text."""
from __future__ import annotations

import json

import pytest

from treeterm.cli import main
from treeterm.report import SCHEMA_VERSION
from conftest import APP_PATH, FGIH_PATH, NONMINIMAL_PATH

APP = str(APP_PATH)
FGIH = str(FGIH_PATH)
NONMINIMAL = str(NONMINIMAL_PATH)

LOOP_TEXT = (
    "symbol f : forall a. B(a) -> B(leaf) recursive 1;\n"
    "rule f[a] x -> f[a] x;\n"
)


@pytest.fixture
def loop_file(tmp_path):
    path = tmp_path / "loop.trs"
    path.write_text(LOOP_TEXT)
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# check

def test_check_terminating(capsys):
    code, out, _ = run(capsys, "check", FGIH)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"TERMINATING: {FGIH}"
    assert "  rules: 6, symbols: 4" in lines
    assert "  dependency pairs: 9, edges: 13" in lines
    assert "  nontrivial SCCs: 3" in lines
    assert "  SCC {0, 2}: ι[f]=1, ι[g]=1; strict: [2]; weak: [0]" in lines
    assert "  SCC {6, 7}: ι[i]=1; strict: [6, 7]" in lines
    assert "  SCC {8}: ι[h]=1; strict: [8]" in lines


def test_check_app(capsys):
    code, out, _ = run(capsys, "check", APP)
    assert code == 0
    assert out.startswith(f"TERMINATING: {APP}")
    assert "  dependency pairs: 3, edges: 2" in out


def test_check_unknown(capsys, loop_file):
    code, out, _ = run(capsys, "check", loop_file)
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == f"UNKNOWN: {loop_file}"
    assert "  failing SCC {0} (1 assignments tried)" in lines
    assert any("without a strict decrease" in l for l in lines)
    assert "  residual cycle: 0" in lines
    assert "    node 0: f♯(a) -> f♯(a)" in lines


def test_check_invalid(capsys):
    code, out, _ = run(capsys, "check", NONMINIMAL)
    assert code == 2
    assert out.splitlines()[0] == f"INVALID: {NONMINIMAL}"
    assert "E-MIN-PATTERN-MISMATCH" in out


def test_check_missing_file(capsys, tmp_path):
    code, out, err = run(capsys, "check", str(tmp_path / "absent.trs"))
    assert code == 3
    assert out == ""
    assert "cannot read" in err


def test_check_parse_error(capsys, tmp_path):
    bad = tmp_path / "bad.trs"
    bad.write_text("symbol f forall;;;\n")
    code, out, _ = run(capsys, "check", str(bad))
    assert code == 3


def test_check_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.trs"
    empty.write_text("")
    code, out, _ = run(capsys, "check", str(empty))
    assert code == 0
    assert out.startswith(f"TERMINATING: {empty}")
    assert "  rules: 0, symbols: 0" in out


# ---------------------------------------------------------------------------
# JSON reports

def test_check_json_to_stdout_is_pure(capsys):
    code, out, _ = run(capsys, "check", FGIH, "--json", "-")
    assert code == 0
    report = json.loads(out)  # nothing but the document on stdout
    assert report["schemaVersion"] == SCHEMA_VERSION
    assert report["outcome"] == "terminating"
    assert len(report["dependencyPairs"]) == 9
    assert len(report["edges"]) == 13
    assert [c["nodes"] for c in report["sccs"] if c["nontrivial"]] == [[0, 2], [6, 7], [8]]
    assert len(report["certificates"]) == 3


def test_check_json_file_and_human_output(capsys, tmp_path):
    dest = tmp_path / "report.json"
    code, out, _ = run(capsys, "check", APP, "--json", str(dest))
    assert code == 0
    assert out.startswith("TERMINATING")  # human text still printed
    report = json.loads(dest.read_text())
    assert report["outcome"] == "terminating"
    assert report["file"] == APP
    assert len(report["rules"]) == 4
    assert {tuple(e) for e in report["edges"]} == {(2, 0), (2, 1)}


def test_check_json_deterministic_modulo_timing(capsys):
    _, out1, _ = run(capsys, "check", FGIH, "--json", "-")
    _, out2, _ = run(capsys, "check", FGIH, "--json", "-")
    r1, r2 = json.loads(out1), json.loads(out2)
    r1.pop("timing"), r2.pop("timing")
    assert r1 == r2


def test_check_json_invalid_outcome(capsys):
    code, out, _ = run(capsys, "check", NONMINIMAL, "--json", "-")
    assert code == 2
    report = json.loads(out)
    assert report["outcome"] == "invalid"
    assert report["diagnostics"][0]["code"] == "E-MIN-PATTERN-MISMATCH"
    assert report["diagnostics"][0]["ruleIndex"] == 0


def test_check_json_parse_error_outcome(capsys, tmp_path):
    bad = tmp_path / "bad.trs"
    bad.write_text("rule ;\n")
    code, out, _ = run(capsys, "check", str(bad), "--json", "-")
    assert code == 3
    report = json.loads(out)
    assert report["outcome"] == "parse-error"
    assert report["diagnostics"][0]["code"] == "E-PARSE"


def test_check_json_unknown_failure_block(capsys, loop_file):
    code, out, _ = run(capsys, "check", loop_file, "--json", "-")
    assert code == 1
    report = json.loads(out)
    assert report["outcome"] == "unknown"
    assert report["failure"]["scc"] == [0]
    assert report["failure"]["searchSpace"] == 1
    assert report["failure"]["cycle"] == [0]


# ---------------------------------------------------------------------------
# graph

def test_graph_prints_dot(capsys):
    code, out, _ = run(capsys, "graph", FGIH)
    assert code == 0
    assert out.startswith("digraph dependency_pairs {")
    assert out.count("->") >= 13


def test_graph_writes_dot_file(capsys, tmp_path):
    dest = tmp_path / "graph.dot"
    code, out, _ = run(capsys, "graph", FGIH, "--dot", str(dest))
    assert code == 0
    text = dest.read_text()
    assert text.startswith("digraph dependency_pairs {")
    assert str(dest) in out  # a short confirmation line replaces the dump


def test_graph_rejects_invalid_system(capsys):
    code, _, _ = run(capsys, "graph", NONMINIMAL)
    assert code == 2


def test_check_writes_dot_file_too(capsys, tmp_path):
    dest = tmp_path / "check.dot"
    code, _, _ = run(capsys, "check", FGIH, "--dot", str(dest))
    assert code == 0
    assert "penwidth=2" in dest.read_text()  # verdict styling included


def test_graph_png_export(capsys, tmp_path):
    dest = tmp_path / "graph.png"
    code, _, _ = run(capsys, "graph", FGIH, "--png", str(dest))
    assert code == 0
    data = dest.read_bytes()
    assert data[:8] == b"\x89PNG\r\n\x1a\n"
    assert len(data) > 1000


# ---------------------------------------------------------------------------
# reduce

def test_reduce_single_form(capsys):
    code, out, _ = run(capsys, "reduce", FGIH, "--term", "i (Node Leaf Leaf)")
    assert code == 0
    assert out == "Node Leaf Leaf\n"


def test_reduce_all_forms_with_count(capsys):
    code, out, _ = run(capsys, "reduce", FGIH, "--term", "g (Node Leaf Leaf)", "--all")
    assert code == 0
    assert out == "f Leaf\n1 normal form(s)\n"


def test_reduce_oracle_annotations(capsys):
    code, out, _ = run(capsys, "reduce", FGIH, "--term", "i Leaf", "--oracle")
    assert code == 0
    assert out == "Leaf    # pattern form: leaf\n"


def test_reduce_fuel_exhausted(capsys, loop_file):
    code, out, _ = run(capsys, "reduce", loop_file, "--term", "f Leaf", "--fuel", "40")
    assert code == 1
    lines = out.splitlines()
    assert lines[0] == "FUEL EXHAUSTED after 1 expanded states (budget 40)"
    assert lines[1] == "  still reducing: f Leaf"


def test_reduce_skips_validation(capsys):
    # reduction must work even on systems the typechecker rejects
    code, out, _ = run(capsys, "reduce", NONMINIMAL, "--term", "f Leaf Leaf", "--fuel", "200")
    assert code == 1
    assert out.startswith("FUEL EXHAUSTED")


def test_reduce_term_parse_error(capsys):
    code, out, _ = run(capsys, "reduce", FGIH, "--term", "i [leaf")
    assert code == 3
    assert out.startswith("PARSE ERROR: --term:")


def test_reduce_lambda_term(capsys):
    code, out, _ = run(capsys, "reduce", FGIH, "--term", r"(\x. x) Leaf")
    assert code == 0
    assert out == "Leaf\n"


# ---------------------------------------------------------------------------
# typecheck

def test_typecheck_reports_contexts_and_types(capsys):
    code, out, _ = run(capsys, "typecheck", FGIH)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("rule 0: rule f[node(a,b)]")
    assert "  context: x : B(a), y : B(b)" in lines
    assert "  lhs type: B(node(a,b))" in lines
    assert "  context: (empty)" in lines
    assert lines[-1] == "ok: 6 rule(s), 4 symbol(s)"
    assert lines.count("  rhs: ok") == 6


def test_typecheck_app_contexts(capsys):
    code, out, _ = run(capsys, "typecheck", APP)
    assert code == 0
    assert "  lhs type: (B(a) -> B(b)) -> B(a) -> B(b)" in out
    assert out.rstrip().endswith("ok: 4 rule(s), 3 symbol(s)")


def test_typecheck_rejects_invalid(capsys):
    code, out, _ = run(capsys, "typecheck", NONMINIMAL)
    assert code == 2
    assert "E-MIN-PATTERN-MISMATCH" in out


def test_typecheck_empty_file(capsys, tmp_path):
    empty = tmp_path / "empty.trs"
    empty.write_text("# nothing here\n")
    code, out, _ = run(capsys, "typecheck", str(empty))
    assert code == 0
    assert out == "ok: 0 rule(s), 0 symbol(s)\n"


# ---------------------------------------------------------------------------
# argument handling

def test_unknown_subcommand_exits_nonzero(capsys):
    with pytest.raises(SystemExit):
        main(["frobnicate", FGIH])
    capsys.readouterr()


def test_reduce_requires_term(capsys):
    with pytest.raises(SystemExit):
        main(["reduce", FGIH])
    capsys.readouterr()
