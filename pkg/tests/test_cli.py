import io
import json
import subprocess
import sys

import pytest

from sievecalc.cli import main
from sievecalc.fincat import builtin
from sievecalc.topology import enumerate_topologies, topology_to_json

J2 = '{"covers": {"a": [["1_a"]], "b": [["f"], ["1_b", "f"]]}}'
J3 = '{"covers": {"a": [[], ["1_a"]], "b": [["1_b", "f"]]}}'


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


@pytest.fixture
def c2_file(tmp_path):
    p = tmp_path / "c2.json"
    p.write_text(json.dumps({"objects": ["a", "b"], "arrows": [{"name": "f", "dom": "a", "cod": "b"}], "compose": []}))
    return str(p)


INVOCATIONS = [
    ("validate",),
    ("sieves",),
    ("sieves", "--object", "b"),
    ("topologies",),
    ("lattice",),
    ("lattice", "--format", "dot"),
    ("generate", "--family", '[{"on": "a", "arrows": []}]'),
    ("meet", "--topology", J2, "--topology", J3),
    ("join", "--topology", J2, "--topology", J3),
    ("implies", "--topology", J2, "--topology", "bottom"),
    ("neg", "--topology", J2),
    ("closure", "--topology", J3, "--sieve", '{"on": "b", "arrows": []}'),
    ("open", "--topology", "bottom", "--ideal", '{"objects": ["a"]}'),
    ("closed", "--topology", "bottom", "--ideal", '{"objects": ["a"]}'),
    ("qc", "--topology", "bottom", "--ideal", '{"objects": []}'),
    ("booleanize", "--topology", "bottom"),
    ("factor", "--topology", J3, "--topology", "bottom"),
    ("dense", "--topology", J2, "--topology", "bottom"),
    ("skeletal", "--topology", J3, "--topology", "bottom"),
    ("relativize", "--topology", "top", "--topology", J2),
    ("atoms",),
    ("ideals",),
    ("ideals", "--topology", J3),
    ("prove", "--axioms", '[{"on": "a", "arrows": []}]', "--target", '{"on": "a", "arrows": []}'),
    ("prove", "--axioms", '[{"on": "a", "arrows": []}]', "--target", '{"on": "b", "arrows": []}'),
    ("check", "--axioms", "[]", "--derivation", '{"rule": "AxiomMaximal", "conclusion": {"on": "a", "arrows": ["1_a"]}}'),
]


@pytest.mark.parametrize("argv", INVOCATIONS, ids=lambda a: " ".join(a[:1] + a[1:2]))
def test_every_verb_is_deterministic(argv, c2_file):
    first = run(argv[0], "--category", c2_file, *argv[1:])
    second = run(argv[0], "--category", c2_file, *argv[1:])
    assert first[0] == 0, first[1]
    assert first == second


def test_topologies_output_matches_library(c2_file):
    code, out = run("topologies", "--category", c2_file)
    assert json.loads(out) == [topology_to_json(j) for j in enumerate_topologies(builtin("C2"))]
    assert len(json.loads(out)) == 4


def test_lattice_outputs(c2_file):
    code, out = run("lattice", "--category", c2_file, "--format", "dot")
    assert out.startswith("digraph")
    assert out.count("->") == 4
    assert out.count("[label=") == 4
    code, out = run("lattice", "--category", c2_file)
    doc = json.loads(out)
    assert len(doc["nodes"]) == 4 and doc["hasse"] == [[0, 1], [0, 2], [1, 3], [2, 3]]
    assert doc["leq"][0] == [True, True, True, True]


def test_values(c2_file):
    assert json.loads(run("open", "--category", "C2", "--topology", "bottom", "--ideal", '{"objects": ["a"]}')[1]) == json.loads(J2)
    assert json.loads(run("closed", "--category", "C2", "--topology", "bottom", "--ideal", '{"objects": ["a"]}')[1]) == json.loads(J3)
    assert json.loads(run("skeletal", "--category", "C2", "--topology", J3, "--topology", "bottom")[1]) == {"skeletal": False}
    assert json.loads(run("closure", "--category", "C2", "--topology", J3, "--sieve", '{"on": "b", "arrows": []}')[1]) == {
        "on": "b", "arrows": ["f"]
    }
    assert [t for t in json.loads(run("atoms", "--category", "C2")[1])] == [json.loads(J2), json.loads(J3)]


def test_prove_and_check_round_trip(tmp_path):
    ax = tmp_path / "ax.json"
    ax.write_text('[{"on": "a", "arrows": []}]')
    code, out = run("prove", "--category", "C2", "--axioms", str(ax), "--target", '{"on": "a", "arrows": []}')
    assert json.loads(out)["rule"] == "AxiomGiven"
    ax.write_text('[{"on": "b", "arrows": []}]')
    code, out = run("prove", "--category", "C2", "--axioms", str(ax), "--target", '{"on": "b", "arrows": ["f"]}')
    assert json.loads(out)["rule"] == "Transitivity"
    d = tmp_path / "d.json"
    d.write_text(out)
    code, out = run("check", "--category", "C2", "--axioms", str(ax), "--derivation", str(d))
    assert json.loads(out) == {"ok": True, "path": [], "reason": ""}


def test_domain_errors_exit_1(tmp_path):
    code, out = run("open", "--category", "C2", "--topology", "bottom", "--ideal", '{"objects": ["b"]}')
    assert code == 1 and json.loads(out)["code"] == "not_a_j_ideal"
    bad = tmp_path / "bad.json"
    bad.write_text('{"objects": ["a"], "arrows": [{"name": "f", "dom": "a", "cod": "z"}]}')
    code, out = run("validate", "--category", str(bad))
    doc = json.loads(out)
    assert code == 1 and doc["code"] == "validation_error" and doc["witness"]["violations"]
    code, out = run("relativize", "--category", "C2", "--topology", J3, "--topology", J2)
    assert code == 1 and json.loads(out)["code"] == "no_relativization"
    code, out = run("topologies", "--category", "SPAN", "--guard", "3")
    assert code == 1 and json.loads(out)["code"] == "guard_exceeded"
    code, out = run("meet", "--category", "C2", "--topology", '{"covers": {"b": [[]]}}', "--topology", "top")
    assert code == 1 and json.loads(out)["code"] == "not_a_topology"


def test_usage_errors_exit_2():
    assert run("meet", "--category", "C2")[0] == 2
    assert run("frobnicate")[0] == 2
    assert run("topologies")[0] == 2
    assert run("closure", "--category", "C2", "--topology", "top", "--sieve", "{not json")[0] == 2


def test_selftest_verb():
    code, out = run("selftest", "--suite", "1", "--suite", "9")
    assert code == 0
    assert out.count("[PASS]") == 2


def test_console_script_runs(c2_file):
    cmd = [sys.executable, "-m", "sievecalc.cli", "topologies", "--category", c2_file]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and len(json.loads(a)) == 4
