"""CLI: exit codes, JSON shape, witness files, determinism."""

import json
import subprocess
import sys

import numpy as np
import pytest

CLI = [sys.executable, "-m", "ncconvex"]


def run(args, cwd):
    return subprocess.run(CLI + args, capture_output=True, text=True,
                          cwd=cwd)


def test_eval_identity_magic(tmp_path):
    r = run(["eval", "--expr", "x1", "--x-tuple", "identity3"], tmp_path)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["schema"] == "ncconvex/1"
    n = doc["result"]["n"]
    assert n == 3
    got = np.array([[complex(*cell) for cell in row]
                    for row in doc["result"]["entries"]])
    np.testing.assert_allclose(got, np.eye(3))


def test_eval_with_a_tuple_file(tmp_path):
    a_file = tmp_path / "a.json"
    a_file.write_text(json.dumps([{
        "n": 2, "entries": [[[0.3, 0.0], [0.0, 0.0]],
                            [[0.0, 0.0], [-0.1, 0.0]]]}]))
    r = run(["eval", "--expr", "a1*x1 + x1*a1", "--signature", "1,1",
             "--a-tuple", str(a_file), "--x-tuple", "identity2"], tmp_path)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    got = np.array([[complex(*cell) for cell in row]
                    for row in doc["result"]["entries"]])
    np.testing.assert_allclose(got, np.diag([0.6, -0.2]), atol=1e-12)


def test_certify_square_consistent(tmp_path):
    r = run(["certify", "--expr", "x1^2", "--signature", "0,1",
             "--size", "3", "--seed", "7"], tmp_path)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["verdict"] == "CONSISTENT_DEGREE_LE_2"


def test_convexity1_quartic_emits_witness(tmp_path):
    r = run(["convexity1", "--preset", "quartic", "--size", "2",
             "--seed", "7"], tmp_path)
    assert r.returncode == 1
    doc = json.loads(r.stdout)
    assert doc["pass"] is False
    wfile = tmp_path / "witness.json"
    assert wfile.exists()
    # the emitted witness re-verifies standalone
    r2 = run(["convexity1", "--verify-witness", str(wfile)], tmp_path)
    assert r2.returncode == 0
    doc2 = json.loads(r2.stdout)
    assert doc2["violates"] is True
    assert doc2["min_eig"] < -1e-6


def test_convexity_witness_roundtrip(tmp_path):
    wout = tmp_path / "w.json"
    r = run(["convexity", "--preset", "quartic", "--size", "2",
             "--epsilon", "2", "--trials", "400", "--seed", "3",
             "--witness-out", str(wout)], tmp_path)
    assert r.returncode == 1
    assert wout.exists()
    r2 = run(["convexity", "--verify-witness", str(wout)], tmp_path)
    assert r2.returncode == 0
    assert json.loads(r2.stdout)["violates"] is True


def test_monotone_pass_and_fail(tmp_path):
    ok = run(["monotone", "--preset", "kraus-halfmass", "--g-transform",
              "--trials", "60", "--seed", "1"], tmp_path)
    assert ok.returncode == 0
    bad = run(["monotone", "--preset", "quartic", "--g-transform",
               "--interval=-1,1", "--trials", "200", "--seed", "1"],
              tmp_path)
    assert bad.returncode == 1
    assert json.loads(bad.stdout)["min_eig"] < -1e-6


def test_kraus_subcommand(tmp_path):
    csv = tmp_path / "sweep.csv"
    r = run(["kraus", "--preset", "kraus-halfmass", "--trials", "60",
             "--sweep-points", "11", "--csv-out", str(csv)], tmp_path)
    assert r.returncode == 0
    doc = json.loads(r.stdout)
    assert doc["cross_check_max_dev"] < 1e-9
    rows = csv.read_text().strip().splitlines()
    assert rows[0] == "t,f"
    assert len(rows) == 12


def test_axioms_subcommand(tmp_path):
    r = run(["axioms", "--expr", "x1^2", "--signature", "0,1",
             "--samples", "25"], tmp_path)
    assert r.returncode == 0
    assert json.loads(r.stdout)["pass"] is True


def test_usage_errors_exit_two(tmp_path):
    assert run(["eval", "--expr", "x1^"], tmp_path).returncode == 2
    assert run(["eval", "--expr", "x1"], tmp_path).returncode == 2
    assert run(["certify", "--preset", "nope"], tmp_path).returncode == 2
    assert run(["convexity1", "--expr", "x1^2", "--interval", "2,1"],
               tmp_path).returncode == 2


def test_json_out_matches_stdout(tmp_path):
    out = tmp_path / "report.json"
    r = run(["axioms", "--expr", "x1^2", "--signature", "0,1",
             "--samples", "10", "--json-out", str(out)], tmp_path)
    assert r.returncode == 0
    assert json.loads(out.read_text()) == json.loads(r.stdout)


def test_same_seed_byte_identical(tmp_path):
    args = ["convexity", "--preset", "mixed-ax", "--size", "2",
            "--trials", "40", "--seed", "11"]
    a = run(args, tmp_path)
    b = run(args, tmp_path)
    assert a.stdout == b.stdout
    assert a.returncode == b.returncode == 0
