"""CLI round trips: schemas, determinism, exit codes."""

import json
import subprocess
import sys

import numpy as np
import pytest

SQRT2 = float(np.sqrt(2.0))


def run_cli(args, **kwargs):
    return subprocess.run(
        [sys.executable, "-m", "conevol.cli", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )


@pytest.fixture
def square_file(tmp_path):
    path = tmp_path / "square.json"
    path.write_text(json.dumps({
        "n": 2,
        "normals": [[1, 0], [0, 1], [-1, 0], [0, -1]],
        "b": [0.5, 0.5, 0.5, 0.5],
    }))
    return path


@pytest.fixture
def trapezoid_file(tmp_path):
    path = tmp_path / "trap.json"
    path.write_text(json.dumps({
        "n": 2,
        "normals": [[0, 1], [1, 1], [0, -1], [-1, 1]],
        "b": [0.3, 1.0, 1.0, 1.0],
    }))
    return path


@pytest.fixture
def pentagon_file(tmp_path):
    path = tmp_path / "pent.json"
    path.write_text(json.dumps({
        "n": 2,
        "normals": [[1, 0], [0, -1], [-1, 0], [0, 1], [1, 1]],
        "b": [1, 1, 1, 1, 1],
        "gamma": [1 / 3, 1 / 3, 1 / 9, 1 / 9, 1 / 9],
    }))
    return path


class TestConeVolume:
    def test_square(self, square_file):
        res = run_cli(["cone-volume", "--input", str(square_file)])
        assert res.returncode == 0
        out = json.loads(res.stdout)
        assert out["volume"] == 1.0
        assert out["gamma"] == [0.25, 0.25, 0.25, 0.25]

    def test_canonicalizes_raw_normals(self, tmp_path):
        path = tmp_path / "raw.json"
        path.write_text(json.dumps({
            "n": 2,
            "normals": [[2, 0], [0, 1], [-1, 0], [0, -1]],
            "b": [1.0, 0.5, 0.5, 0.5],
        }))
        out = json.loads(run_cli(["cone-volume", "--input", str(path)]).stdout)
        assert out["b"][0] == 0.5

    def test_byte_identical_reruns(self, square_file, tmp_path):
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        for out in (out1, out2):
            res = run_cli([
                "cone-volume", "--input", str(square_file), "--output", str(out)
            ])
            assert res.returncode == 0
        assert out1.read_bytes() == out2.read_bytes()


class TestValidationErrors:
    def test_malformed_json_position(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text('{"n": 2, "normals": [[1, 0],]}')
        res = run_cli(["cone-volume", "--input", str(path)])
        assert res.returncode == 2
        err = json.loads(res.stderr)
        assert "line" in err["detail"] and "column" in err["detail"]

    def test_missing_field(self, tmp_path):
        path = tmp_path / "missing.json"
        path.write_text(json.dumps({"n": 2, "normals": [[1, 0], [0, 1], [-1, -1]]}))
        res = run_cli(["cone-volume", "--input", str(path)])
        assert res.returncode == 2

    def test_degenerate_normals(self, tmp_path):
        path = tmp_path / "degen.json"
        path.write_text(json.dumps({
            "n": 2, "normals": [[1, 0], [0, 1], [1, 1]], "b": [1, 1, 1],
        }))
        res = run_cli(["cone-volume", "--input", str(path)])
        assert res.returncode == 2
        assert json.loads(res.stderr)["error"].endswith("not_positively_spanning")

    def test_unnormalized_gamma(self, square_file):
        res = run_cli([
            "scc-check", "--input", str(square_file), "--gamma", "[0.5,0.5,0.5,0.5]"
        ])
        assert res.returncode == 2

    def test_unknown_command(self):
        res = run_cli(["no-such-command"])
        assert res.returncode == 2

    def test_format_mismatch(self, square_file):
        res = run_cli(["cone-volume", "--input", str(square_file), "--format", "csv"])
        assert res.returncode == 2
        assert "emits json" in json.loads(res.stderr)["detail"]


class TestPsccAndVerdicts:
    def test_pscc_payload(self, trapezoid_file):
        out = json.loads(run_cli(["pscc", "--input", str(trapezoid_file)]).stdout)
        assert len(out["bases"]) == 5
        assert out["separators"] == []
        assert out["d"] == 1
        assert out["dim"] == 3
        assert len(out["vrep"]) == 5

    def test_scc_check_verdicts_agree(self, trapezoid_file):
        res = run_cli([
            "scc-check",
            "--input", str(trapezoid_file),
            "--gamma", json.dumps([1 / 9, 2 / 9, 4 / 9, 2 / 9]),
        ])
        out = json.loads(res.stdout)
        assert out["verdict"]["status"] == "violates_inequality"
        assert out["verdict"]["flat"] == [0, 2]
        assert out["verdict"] == out["brute_force_verdict"]


class TestTypecones:
    def test_trapezoid_two_types(self, trapezoid_file):
        out = json.loads(run_cli([
            "typecones", "--input", str(trapezoid_file), "--trials", "80"
        ]).stdout)
        assert out["count"] == 2
        assert sorted(t["full_facets"] for t in out["types"]) == [False, True]


class TestEmitSystem:
    def test_json_polynomials(self, square_file):
        out = json.loads(run_cli(["emit-system", "--input", str(square_file)]).stdout)
        vol_terms = out["volume_poly"]["terms"]
        assert {tuple(t["e"]): t["c"] for t in vol_terms} == {
            (1, 1, 0, 0): 1.0, (1, 0, 0, 1): 1.0, (0, 1, 1, 0): 1.0, (0, 0, 1, 1): 1.0,
        }
        assert len(out["coupling"]) == 4

    def test_smtlib_rendering(self, square_file):
        res = run_cli(["emit-system", "--input", str(square_file), "--smtlib"])
        assert res.returncode == 0
        assert "(declare-const b1 Real)" in res.stdout
        assert "(assert (= g1" in res.stdout


class TestSolveInverse:
    def test_pentagon(self, pentagon_file):
        res = run_cli([
            "solve-inverse", "--input", str(pentagon_file), "--seed", "0",
            "--starts", "20",
        ])
        assert res.returncode == 0
        out = json.loads(res.stdout)
        assert out["rank_defects"] == [0]
        assert out["residuals"][0] <= 1e-10
        b = out["solutions"][0]
        assert np.allclose(
            b, [0.540342, 0.969688, 0.147164, 0.540342, 0.568825], atol=1e-5
        )

    def test_no_convergence_exit_code(self, square_file):
        res = run_cli([
            "solve-inverse", "--input", str(square_file),
            "--gamma", "[0.3,0.2,0.3,0.2]", "--starts", "6",
        ])
        assert res.returncode == 3
        err = json.loads(res.stderr)
        assert err["error"] == "inverse.no_convergence"
        assert err["best_residual"] > 1e-8

    def test_deterministic(self, pentagon_file, tmp_path):
        files = [tmp_path / "s1.json", tmp_path / "s2.json"]
        for f in files:
            run_cli([
                "solve-inverse", "--input", str(pentagon_file),
                "--seed", "3", "--output", str(f),
            ])
        assert files[0].read_bytes() == files[1].read_bytes()


class TestMembershipAndFigure:
    def test_membership(self, trapezoid_file):
        res = run_cli([
            "membership-trapezoid", "--input", str(trapezoid_file),
            "--gamma", json.dumps([1 / 9, 2 / 9, 4 / 9, 2 / 9]),
        ])
        out = json.loads(res.stdout)
        assert out["member"] is True
        res2 = run_cli([
            "membership-trapezoid", "--input", str(trapezoid_file),
            "--gamma", json.dumps([1 / 9 + 1e-3, 2 / 9 - 1e-3, 4 / 9, 2 / 9]),
        ])
        assert json.loads(res2.stdout)["member"] is False

    def test_figure1_csv(self, tmp_path):
        out = tmp_path / "fig1.csv"
        res = run_cli([
            "figure1-data", "--samples", "300", "--seed", "1",
            "--output", str(out),
        ])
        assert res.returncode == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "gamma1,gamma2,gamma3,subset"
        subsets = {line.rsplit(",", 1)[1] for line in lines[1:]}
        assert subsets == {"A", "B"}
        # rerun is byte-identical
        out2 = tmp_path / "fig1b.csv"
        run_cli([
            "figure1-data", "--samples", "300", "--seed", "1",
            "--output", str(out2),
        ])
        assert out.read_bytes() == out2.read_bytes()


class TestPaperSuite:
    def test_single_known_failure(self, tmp_path):
        out = tmp_path / "suite.json"
        res = run_cli(["paper-suite", "--output", str(out)])
        assert res.returncode == 1  # one check fails by construction
        rows = json.loads(out.read_text())
        failing = [r["name"] for r in rows if not r["passed"]]
        assert failing == ["pentagon-reference-digits"]
        assert any(r["name"] == "pentagon-inverse-solution" and r["passed"] for r in rows)
