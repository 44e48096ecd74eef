from __future__ import annotations

import json
import subprocess
import sys

import pytest

from clone_lattice.cli import main

from conftest import FIXTURES, FP_SEEDED, MICRO


def test_analyze_to_stdout(capsys):
    assert main(["analyze", "--corpus", str(FP_SEEDED), "--similarity", "0.7"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["stats"]["false_positives_remaining"] == 0


def test_analyze_to_file(tmp_path, capsys):
    out = tmp_path / "r.json"
    assert main(["analyze", "--corpus", str(MICRO), "--report", str(out), "--no-slicing"]) == 0
    assert capsys.readouterr().out == ""
    assert json.loads(out.read_text())["config"]["slicing"] is False


def test_slice_command(capsys):
    assert main(["slice", str(FIXTURES), "--function", "mgau_eval", "--pointer", "active"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("// slice mgau_eval :: active")
    assert "   11          c = active[j];" in out


def test_slice_dot(capsys):
    assert main(["slice", str(FIXTURES), "--function", "mgau_eval", "--dot"]) == 0
    assert capsys.readouterr().out.startswith('digraph "mgau_eval"')


def test_vectors_command(capsys):
    assert main(["vectors", "--corpus", str(FP_SEEDED)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines and all(l.count("\t") == 3 for l in lines)


def test_verify_command(capsys):
    left = f"{FIXTURES}:dict2pid_dump:mdef->sseq"
    right = f"{FIXTURES}:gc_compute_closest_cw:gs->codeword"
    assert main(["verify", left, right]) == 0
    out = capsys.readouterr().out
    assert out.rstrip().endswith("verdict: TrueClone")
    assert "i <-> codeid" in out


@pytest.mark.parametrize(
    "argv",
    [
        ["analyze", "--corpus", "/does/not/exist"],
        ["analyze", "--corpus", str(MICRO), "--similarity", "0.5"],
        ["verify", "a:b", "c:d:e"],
        ["slice", str(FIXTURES), "--function", "nope"],
        [f"verify", f"{FIXTURES}:mgau_eval:zz", f"{FIXTURES}:mgau_eval:x"],
    ],
)
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert capsys.readouterr().err


def test_console_script_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "clone_lattice.cli", "vectors", "--corpus", str(FP_SEEDED)],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0 and "zero_prefix" in proc.stdout
