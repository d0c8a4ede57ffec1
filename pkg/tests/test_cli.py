import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest
from scipy.integrate import trapezoid

from qwi.cli import main

from test_classical import WELL_ENERGIES

PROFILES = Path(__file__).resolve().parent.parent / "profiles"
WELL = str(PROFILES / "asymmetric_well.json")
DOUBLE = str(PROFILES / "double_well.json")
EMPTY = str(PROFILES / "no_states.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def _rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_solve_all_methods_agree(capsys):
    code, out, _ = run(capsys, "solve", WELL, "--no-meta")
    assert code == 0
    report = json.loads(out)
    columns = [[r["energy"] for r in report["methods"][m]] for m in ("classical", "transfer", "impedance")]
    for col in columns:
        np.testing.assert_allclose(col, WELL_ENERGIES, atol=1e-10)
    assert all(d <= 1e-10 for d in report["pairwise_max_delta"].values())
    assert all("residual" in r for m in report["methods"].values() for r in m)


def test_solve_csv_round_trips(capsys):
    code, out, _ = run(capsys, "solve", WELL, "--format", "csv", "--method", "classical")
    assert code == 0
    rows = _rows(out)
    assert [float(r["energy"]) for r in rows] == WELL_ENERGIES
    assert all(r["method"] == "classical" and r["norm_constant"] for r in rows)


def test_solve_empty_window(capsys):
    code, out, _ = run(capsys, "solve", EMPTY, "--no-meta")
    assert code == 0
    assert json.loads(out)["methods"] == {"classical": [], "transfer": [], "impedance": []}


def test_malformed_json(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"boundaries": [0, 2],\n "potentials": [5, -10 8]}')
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 1
    assert f"{bad}:2:" in err and "invalid JSON" in err


def test_invalid_profile_and_missing_file(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"boundaries": [2, 0], "potentials": [5, -10, 8]}')
    code, _, err = run(capsys, "solve", str(bad))
    assert code == 1 and "non-monotone" in err
    code, _, _ = run(capsys, "solve", str(tmp_path / "absent.json"))
    assert code == 1
    code, _, _ = run(capsys, "solve", WELL, "--method", "nonsense")
    assert code == 1


def _wavefunction(capsys, *extra):
    code, out, err = run(capsys, "wavefunction", WELL, *extra)
    assert code == 0, err
    rows = _rows(out)
    return {k: np.array([float(r[k]) for r in rows]) for k in ("x", "psi", "density")}


def test_wavefunction_greens_matches_classical(capsys):
    for state in range(4):
        c = _wavefunction(capsys, "--state", str(state), "--samples", "801")
        g = _wavefunction(capsys, "--state", str(state), "--samples", "801", "--method", "greens")
        np.testing.assert_array_equal(c["x"], g["x"])
        assert np.max(np.abs(c["density"] - g["density"])) < 1e-6
        np.testing.assert_allclose(c["psi"] ** 2, c["density"], rtol=1e-15)


def test_wavefunction_integrates_to_one(capsys):
    for method in ("classical", "impedance", "greens"):
        w = _wavefunction(capsys, "--state", "2", "--samples", "4001", "--method", method)
        assert trapezoid(w["density"], w["x"]) == pytest.approx(1.0, abs=1e-4)


def test_wavefunction_span_and_endpoints(capsys):
    w = _wavefunction(capsys, "--samples", "2")
    E = WELL_ENERGIES[0]
    assert w["x"][0] == pytest.approx(-10 / math.sqrt(2 * (5 - E)))
    assert w["x"][1] == pytest.approx(2 + 10 / math.sqrt(2 * (8 - E)))


def test_wavefunction_index_out_of_range(capsys):
    code, _, err = run(capsys, "wavefunction", WELL, "--state", "4")
    assert code == 1
    assert "4 bound states available" in err


def test_wavefunction_rejects_general_profiles(capsys):
    code, _, err = run(capsys, "wavefunction", DOUBLE)
    assert code == 1 and "3-region" in err


def test_compare_asymmetric_well(capsys):
    code, out, _ = run(capsys, "compare", WELL, "--no-meta")
    report = json.loads(out)
    assert code == 0 and report["status"] == "PASS"
    assert report["oracle"]["max_delta_vs_transfer"] < 1e-4
    assert all(c["relative_difference"] < 1e-10 for c in report["normalization_checks"])


def test_compare_double_well(capsys):
    code, out, _ = run(capsys, "compare", DOUBLE, "--no-meta")
    report = json.loads(out)
    assert code == 0 and report["status"] == "PASS"
    assert "unsupported" in report["methods"]["classical"]
    assert "unsupported" in report["methods"]["impedance"]
    assert len(report["methods"]["transfer"]) == len(report["oracle"]["energies"]) == 4


def test_compare_no_states(capsys):
    code, out, _ = run(capsys, "compare", EMPTY, "--no-meta")
    assert code == 0
    assert json.loads(out)["oracle"]["status"] == "0 states, trivially consistent"


def test_compare_fails_on_tight_tolerance(capsys):
    code, out, _ = run(capsys, "compare", WELL, "--no-meta", "--oracle-tol", "1e-9")
    assert code == 2
    assert json.loads(out)["status"] == "FAIL"


def test_output_is_deterministic(tmp_path, capsys):
    outs = []
    for name in ("a.json", "b.json"):
        path = tmp_path / name
        assert main(["compare", WELL, "--no-meta", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    code, out, _ = run(capsys, "solve", WELL)
    assert json.loads(out)["meta"]["command"] == "solve"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qwi", "solve", WELL, "--format", "csv"],
                          capture_output=True, text=True, check=True)
    assert len(_rows(proc.stdout)) == 12
