import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from uncertainty_lab import box, cli
from uncertainty_lab.experiments import SPIN_SWEEP_HEADER
from uncertainty_lab.model import build_noisy_unbiased, build_projective_spin, save_model
from uncertainty_lab.operators import KET, SX
from uncertainty_lab.relations import RelationId, RelationReport


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.reader(io.StringIO(text)))


def test_spin_sweep_header_and_rows(capsys):
    code, out, _ = run(capsys, "spin-sweep")
    table = rows(out)
    assert code == cli.EXIT_OK
    assert out.splitlines()[0] == (
        "phi,eps_A,eta_B,sigma_A,sigma_B,bound_half,bound_full,naive_lhs,ozawa_lhs,"
        "uvh_lhs,modak_lhs,sigma_Mout,sigma_Bout,r4_status,r5_status,r6_status,r7_status"
    )
    assert table[0] == SPIN_SWEEP_HEADER
    assert len(table) == 92
    first = dict(zip(table[0], table[1]))
    assert float(first["eps_A"]) < 1e-12 and first["r4_status"] == "violated"
    phis = [float(r[0]) for r in table[1:]]
    assert phis == sorted(phis)


def test_spin_sweep_json(capsys, tmp_path):
    out_file = tmp_path / "sweep.json"
    code, out, _ = run(capsys, "spin-sweep", "--steps", "5", "--format", "json", "--out", str(out_file))
    assert code == 0 and out == ""
    doc = json.loads(out_file.read_text())
    assert doc["scenario"] == "spin" and len(doc["records"]) == 5


def test_spin_sweep_bad_grid(capsys):
    code, _, err = run(capsys, "spin-sweep", "--steps", "1")
    assert code == cli.EXIT_INVALID and "steps" in err


def test_campaign_deterministic_bytes(capsys):
    a = run(capsys, "campaign", "--suite", "universal-relations", "--instances", "40", "--seed", "5")
    b = run(capsys, "campaign", "--suite", "universal-relations", "--instances", "40", "--seed", "5")
    assert a[0] == 0 and a[1] == b[1]
    assert rows(a[1])[0] == ["index", "passed", "worst_margin", "detail"]
    assert "40/40 passed" in a[2]


@pytest.mark.parametrize("suite", ["robertson", "unbiasedness-theorem", "box"])
def test_campaign_suites_pass(capsys, suite):
    code, out, _ = run(capsys, "campaign", "--suite", suite, "--instances", "50", "--seed", "42")
    assert code == 0 and len(rows(out)) == 51


def test_campaign_unknown_suite(capsys):
    code, _, err = run(capsys, "campaign", "--suite", "nope")
    assert code == cli.EXIT_INVALID and "unknown suite" in err


def test_frontier_budget_validation(capsys):
    code, _, err = run(capsys, "frontier", "--budget", "10")
    assert code == cli.EXIT_INVALID and "budget >= 100" in err


def test_frontier_csv(capsys):
    code, out, _ = run(capsys, "frontier", "--budget", "600")
    table = rows(out)
    assert code == 0
    assert table[0] == ["eps_A", "eta_B", "naive_lhs", "r4_status", "r5_status", "r6_status"]
    assert len(table) - 1 >= 5
    assert {r[4] for r in table[1:]} <= {"satisfied", "saturated"}


def test_frontier_blowup(capsys):
    code, out, _ = run(capsys, "frontier", "--budget", "600", "--blowup-caps", "0.5,0.05")
    table = rows(out)
    assert code == 0 and len(table) == 3
    assert float(table[-1][2]) > 0


def test_frontier_blowup_bad_caps(capsys):
    code, _, _ = run(capsys, "frontier", "--budget", "600", "--blowup-caps", "0.1,0.5")
    assert code == cli.EXIT_INVALID


def test_box_default_and_state_file(capsys, tmp_path):
    code, out, _ = run(capsys, "box")
    assert code == 0 and rows(out)[1][4] == "saturated"
    path = tmp_path / "two.json"
    box.save_box(box.from_modes({0: 1, 1: 1}, n_max=2), path)
    code, out, _ = run(capsys, "box", "--state", str(path), "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["status"] == "satisfied" and doc["boundary_term"] == pytest.approx(0.5)


def test_box_missing_file(capsys, tmp_path):
    code, _, _ = run(capsys, "box", "--state", str(tmp_path / "missing.json"))
    assert code == cli.EXIT_INVALID


def test_violation_exit_code(capsys, monkeypatch):
    bad = RelationReport.build(RelationId.BOX_PX, 0.0, 1.0)
    monkeypatch.setattr(box, "check_relation_4_1", lambda s, tol: bad)
    code, out, _ = run(capsys, "box")
    assert code == cli.EXIT_VIOLATION and "violated" in out


def test_audit_model_file(capsys, tmp_path):
    path = tmp_path / "spin.json"
    save_model(build_projective_spin(0.0), path)
    code, out, _ = run(capsys, "audit", "--model", str(path))
    table = {r[0]: r[1:] for r in rows(out)[1:]}
    assert code == 0
    assert table["measurement_bias_A"][1] == "unbiased"
    assert table["disturbance_bias_B"][1] == "biased"
    assert table["certificate"][1] == "tradeoff"


def test_audit_json_with_operator_and_state_files(capsys, tmp_path):
    model_path = tmp_path / "noisy.json"
    save_model(build_noisy_unbiased(SX, 0.5 * SX, KET["+z"]), model_path)
    op_path = tmp_path / "A.json"
    op_path.write_text(json.dumps([[[0, 0], [1, 0]], [[1, 0], [0, 0]]]))
    psi_path = tmp_path / "psi.json"
    psi_path.write_text(json.dumps([[1, 0], [0, 0]]))
    code, out, _ = run(capsys, "audit", "--model", str(model_path), "--A", str(op_path), "--psi", str(psi_path), "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["measurement_bias"]["is_unbiased"] is True
    assert doc["certificate"]["verdict"] == "tradeoff"


def test_audit_dimension_mismatch(capsys, tmp_path):
    path = tmp_path / "m.json"
    save_model(build_projective_spin(0.2), path)
    op = tmp_path / "big.json"
    op.write_text(json.dumps(np.eye(3).tolist()))
    code, _, _ = run(capsys, "audit", "--model", str(path), "--A", str(op))
    assert code == cli.EXIT_INVALID


def test_invalid_tolerances(capsys):
    code, _, _ = run(capsys, "box", "--tol-alg", "1e-6", "--tol-rel", "1e-9")
    assert code == cli.EXIT_INVALID


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "uncertainty_lab", "spin-sweep", "--steps", "3"], capture_output=True, text=True
    )
    assert proc.returncode == 0 and proc.stdout.startswith("phi,eps_A")
