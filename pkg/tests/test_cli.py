import json
import subprocess
import sys

import pytest

from c2tools.cli import FAILED, OK, USAGE, main
from c2tools.graphs import cycle_graph


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_four_valent_k5_q7(capsys):
    code, out, _ = run(capsys, "c2", "--gen", "zigzag:3:completed", "--q", "7", "--method", "four-valent", "--json")
    assert code == OK
    report = json.loads(out)
    assert report["residues"] == {"7": 6}
    assert report["c"] == 15 and report["bound_ok"]


def test_bruteforce_zz3_q5(capsys):
    code, out, _ = run(capsys, "c2", "--gen", "zigzag:3", "--q", "5", "--method", "bruteforce")
    assert code == OK and "q=5 c2=4" in out


def test_triangle_from_file(capsys, tmp_path):
    path = tmp_path / "triangle.json"
    path.write_text(cycle_graph(3).to_json())
    code, out, _ = run(capsys, "c2", "--graph", str(path), "--q", "3", "--method", "bruteforce", "--json")
    report = json.loads(out)
    assert code == OK and report["residues"] == {"3": 1} and report["count"] == {"3": 9}


@pytest.mark.parametrize("method", ["three-valent", "denominator", "slr"])
def test_methods_on_zz4(capsys, method):
    code, out, _ = run(capsys, "c2", "--gen", "zigzag:4", "--q", "2,3,5", "--method", method, "--json")
    assert code == OK
    assert json.loads(out)["residues"] == {"2": 1, "3": 2, "5": 4}


def test_json_output_is_deterministic(capsys):
    argv = ("c2", "--gen", "k:5", "--q", "2,3", "--method", "slr", "--json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    assert json.dumps(json.loads(first), sort_keys=True, indent=2) == first.strip()


@pytest.mark.parametrize(
    "argv",
    [
        ("c2", "--gen", "zigzag:2"),
        ("c2", "--gen", "cube:3"),
        ("c2", "--gen", "k:5", "--q", "6"),
        ("c2", "--gen", "k:5", "--graph", "x.json"),
        ("c2",),
        ("c2", "--gen", "k:5", "--method", "three-valent"),
        ("c2", "--gen", "k:4", "--method", "four-valent"),
        ("c2", "--graph", "/nonexistent/graph.json"),
        ("verify", "bogus"),
        ("reduce", "--gen", "k:5"),
        ("reduce", "--poly", "a1 +* a2", "--trace", "t.json"),
        ("frobnicate",),
    ],
)
def test_usage_errors(capsys, argv):
    code, _, _ = run(capsys, *argv)
    assert code == USAGE


@pytest.mark.parametrize("suite", ["identities", "counting", "theorem3", "slr"])
def test_verify_suite(capsys, suite):
    code, out, _ = run(capsys, "verify", suite)
    assert code == OK
    assert out.strip().endswith("passed") and "FAIL" not in out


def test_verify_json(capsys):
    code, out, _ = run(capsys, "verify", "slr", "--json")
    data = json.loads(out)
    assert code == OK and data["suite"] == "slr" and all(c["ok"] for c in data["checks"])


def test_reduce_k5_trace(capsys, tmp_path):
    trace = tmp_path / "k5.json"
    code, out, _ = run(capsys, "reduce", "--gen", "k:5", "--trace", str(trace), "--json")
    assert code == OK
    report = json.loads(out)
    assert report["complete"] and report["replay_problems"] == []
    tree = json.loads(trace.read_text())
    assert tree["complete"] and tree["nodes"]


def test_reduce_irreducible_fixture(capsys, tmp_path):
    trace = tmp_path / "stuck.json"
    poly = "a1^2*a2^2 + a1*a2*a3^2 + a3^4 + a1^3*a3 + a2^3*a3"
    code, out, _ = run(capsys, "reduce", "--poly", poly, "--trace", str(trace))
    assert code == FAILED
    assert "failure-at-node" in out
    assert json.loads(trace.read_text())["failure"] is not None


def test_reduce_unwritable_trace(capsys):
    code, _, err = run(capsys, "reduce", "--gen", "k:5", "--trace", "/nonexistent/dir/t.json")
    assert code == USAGE and "cannot write" in err


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "c2tools.cli", "c2", "--gen", "k:4", "--q", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and "q=3 c2=2" in proc.stdout
