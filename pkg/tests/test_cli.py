import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

TESTS_DIR = Path(__file__).parent
GOLDEN_DIR = TESTS_DIR / "golden"
CURVE_FILE = str(TESTS_DIR / "data" / "rotation_orbit.json")

GOLDEN_CASES = {
    "certify_conformal_flat.json": [
        "certify", "--builtin", "conformal_flat", "--n", "3",
        "--point", "0,0,0", "--r", "1",
    ],
    "certify_product_nonrigid_samples.json": [
        "certify", "--builtin", "product_nonrigid", "--n", "3",
        "--point", "0,0,0", "--r-samples", "0.5,1,2",
    ],
    "braid_degenerate.json": [
        "braid", "--n", "3", "--J", "identity", "--Jp", "diag:1,0,0",
    ],
    "prolong_one_param.json": [
        "prolong", "--algebra", "one_param",
        "--R", "[[0,1,0],[0,0,0],[0,0,0]]", "--max-order", "3",
    ],
    "lightlike_product_nonrigid.json": [
        "lightlike", "--builtin", "product_nonrigid", "--n", "3",
        "--point", "0,0,0", "--r", "1",
    ],
    "symspace_orbit.json": ["symspace", "--curve", CURVE_FILE, "--resample", "33"],
    "examples_list.txt": ["examples", "list"],
}


def run_cli(args, threads="1", env_extra=None, check=True):
    env = dict(os.environ)
    env["OMP_NUM_THREADS"] = threads
    env["OPENBLAS_NUM_THREADS"] = threads
    env.pop("RIGIDITY_LAB_TOL", None)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        [sys.executable, "-m", "rigidity_lab", *args],
        capture_output=True,
        env=env,
    )
    if check and proc.returncode != 0:
        raise AssertionError(
            f"cli failed ({proc.returncode}): {proc.stderr.decode()[:2000]}"
        )
    return proc


@pytest.mark.parametrize("name", sorted(GOLDEN_CASES))
def test_golden_reports(name):
    """Byte-identical reports across two runs, thread counts, and the stored
    golden file; regenerate with REGEN_GOLDEN=1 pytest tests/test_cli.py."""
    args = GOLDEN_CASES[name]
    first = run_cli(args, threads="1").stdout
    second = run_cli(args, threads="1").stdout
    threaded = run_cli(args, threads="4").stdout
    assert first == second, "report differs between identical runs"
    assert first == threaded, "report differs across thread counts"
    path = GOLDEN_DIR / name
    if os.environ.get("REGEN_GOLDEN"):
        path.write_bytes(first)
    assert path.exists(), f"golden file {name} missing; run with REGEN_GOLDEN=1"
    assert first == path.read_bytes(), f"report drifted from golden file {name}"


class TestExitCodes:
    def test_completed_is_zero_even_for_non_rigid(self):
        proc = run_cli(
            ["certify", "--builtin", "product_nonrigid", "--n", "3", "--r", "1"]
        )
        assert proc.returncode == 0
        assert json.loads(proc.stdout)["verdict"] == "non-rigid"

    def test_malformed_json_is_two_with_position(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 3, "oops..')
        proc = run_cli(["certify", "--chart", str(bad), "--r", "1"], check=False)
        assert proc.returncode == 2
        msg = proc.stderr.decode()
        assert "line" in msg and "column" in msg

    def test_domain_violation_is_two(self):
        proc = run_cli(
            ["certify", "--builtin", "conformal_flat", "--n", "3",
             "--point", "9,0,0", "--r", "1"],
            check=False,
        )
        assert proc.returncode == 2
        assert "outside" in proc.stderr.decode()

    def test_unknown_builtin_is_two(self):
        proc = run_cli(
            ["certify", "--builtin", "nope", "--n", "3", "--r", "1"], check=False
        )
        assert proc.returncode == 2

    def test_missing_r_is_two(self):
        proc = run_cli(
            ["certify", "--builtin", "conformal_flat", "--n", "3"], check=False
        )
        assert proc.returncode == 2


class TestFlags:
    def test_output_file(self, tmp_path):
        out = tmp_path / "report.json"
        run_cli(
            ["braid", "--n", "3", "--J", "identity", "--Jp", "identity",
             "--output", str(out)]
        )
        doc = json.loads(out.read_text())
        assert doc["report"]["kernel_dim"] == 0

    def test_env_tolerance_recorded(self):
        proc = run_cli(
            ["braid", "--n", "3", "--J", "identity", "--Jp", "identity"],
            env_extra={"RIGIDITY_LAB_TOL": "1e-8"},
        )
        doc = json.loads(proc.stdout)
        assert doc["tolerances"]["kernel_tol"] == 1e-8

    def test_flag_overrides_env(self):
        proc = run_cli(
            ["braid", "--n", "3", "--J", "identity", "--Jp", "identity",
             "--tol", "1e-9"],
            env_extra={"RIGIDITY_LAB_TOL": "1e-8"},
        )
        assert json.loads(proc.stdout)["tolerances"]["kernel_tol"] == 1e-9

    def test_bad_env_tolerance_is_two(self):
        proc = run_cli(
            ["braid", "--n", "3", "--J", "identity", "--Jp", "identity"],
            env_extra={"RIGIDITY_LAB_TOL": "not-a-float"},
            check=False,
        )
        assert proc.returncode == 2

    def test_kernel_basis_included(self):
        proc = run_cli(
            ["braid", "--n", "3", "--J", "identity", "--Jp", "diag:1,0,0",
             "--kernel-basis"]
        )
        doc = json.loads(proc.stdout)
        assert len(doc["report"]["kernel_basis"]) == doc["report"]["kernel_dim"]
        assert doc["report"]["unknown_labels"]

    def test_report_embeds_reproduction_metadata(self):
        proc = run_cli(
            ["certify", "--builtin", "conformal_flat", "--n", "3", "--r", "1",
             "--seed", "5", "--grid", "4"]
        )
        doc = json.loads(proc.stdout)
        assert doc["seed"] == 5
        assert doc["grid"] == 4
        assert doc["input_hash"]
        assert doc["input"]["chart"]["n"] == 3


class TestCommands:
    def test_braid_classical_variant(self):
        proc = run_cli(
            ["braid", "--n", "4", "--J", "minkowski", "--variant", "classical"]
        )
        assert json.loads(proc.stdout)["report"]["kernel_dim"] == 0

    def test_braid_symskew_variant(self):
        proc = run_cli(["braid", "--n", "2", "--variant", "symskew"])
        assert json.loads(proc.stdout)["report"]["kernel_dim"] == 0

    def test_prolong_infinite_type_witness(self):
        proc = run_cli(
            ["prolong", "--algebra", "one_param",
             "--R", "[[0,1,0],[0,0,0],[0,0,0]]", "--max-order", "3"]
        )
        doc = json.loads(proc.stdout)
        assert doc["type"]["kind"] == "infinite"
        assert doc["type"]["witness"]["sigma_ratio"] < 1e-8
        assert doc["prolongation_dims"] == {"1": 1, "2": 1, "3": 1}

    def test_prolong_so_finite(self):
        proc = run_cli(["prolong", "--algebra", "so", "--n", "3", "--max-order", "2"])
        doc = json.loads(proc.stdout)
        assert doc["type"] == {
            "kind": "finite", "order": 1,
            "dims": {"1": 0, "2": 0}, "verified_next_order": 2,
        }

    def test_certify_with_chart_file(self, tmp_path):
        doc = {"builtin": "conformal_flat", "n": 3}
        chart = tmp_path / "chart.json"
        chart.write_text(json.dumps(doc))
        proc = run_cli(["certify", "--chart", str(chart), "--r", "1"])
        assert json.loads(proc.stdout)["verdict"] == "2-rigid"

    def test_lightlike_lifts_gcs_builtin(self):
        proc = run_cli(
            ["lightlike", "--builtin", "conformal_flat", "--n", "3",
             "--point", "0,0,0", "--r", "1"]
        )
        doc = json.loads(proc.stdout)
        assert doc["verdict"] == "(3,1) sub-rigid"
        assert doc["dimension"] == 4
        assert doc["unconstrained_jet_components"]

    def test_lightlike_native_builtin(self):
        proc = run_cli(
            ["lightlike", "--builtin", "lightcone", "--n", "4",
             "--point", "0.1,0,0", "--r", "1"]
        )
        assert json.loads(proc.stdout)["verdict"] == "(3,1) sub-rigid"

    def test_symspace_mean_of_orbit(self):
        proc = run_cli(["symspace", "--curve", CURVE_FILE])
        doc = json.loads(proc.stdout)
        assert doc["closed"] is True
        mean = doc["mean"]
        assert abs(mean[0][0] - 1.5) < 1e-5
        assert abs(mean[0][1]) < 1e-5
