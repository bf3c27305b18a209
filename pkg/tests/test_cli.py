"""CLI behaviour: documents, exit codes, determinism, round trips.

All invocations go through main(argv) in-process; stdout/stderr are captured
with capsys.  Golden strings below pin the byte-level output contract.
"""

import json

import numpy as np
import pytest

import modalenergy as me
from modalenergy.cli import main

CHECK_GOLDEN = """\
method      mapping  real   sum
moving      no       yes    yes
eigvec      yes      no     yes
hermitian   yes      yes    no
transpose   yes      no     no
normality_index = 0.514718625761
"""


def _model_path(fixtures_dir, name):
    return str(fixtures_dir / name)


def test_decompose_oscillator(fixtures_dir, capsys):
    rc = main(["decompose", "--model", _model_path(fixtures_dir, "oscillator.json")])
    out = capsys.readouterr().out
    assert rc == 0
    doc = json.loads(out)
    assert doc["command"] == "decompose"
    assert doc["n"] == 2
    assert doc["eigenvalues"] == [{"re": 0, "im": 1}, {"re": 0, "im": -1}]
    assert doc["pairs"] == [[0, 1]]
    assert doc["config"]["tol"] == 1e-8
    assert doc["residuals"]["biorthogonality"] <= 1e-12


def test_decompose_jordan_exit_2(fixtures_dir, capsys):
    rc = main(["decompose", "--model", _model_path(fixtures_dir, "jordan.json")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "mode" in err and "defective" in err


def test_missing_file_exit_1(capsys):
    rc = main(["decompose", "--model", "no/such/file.json"])
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")


def test_usage_errors_exit_1(capsys):
    assert main(["decompose"]) == 1  # missing --model
    assert main(["frobnicate"]) == 1  # unknown command
    assert main([]) == 1
    assert main(["energy", "--model", "x.json", "--x0", "1,0", "--method", "bogus"]) == 1
    capsys.readouterr()


def test_help_exits_zero():
    with pytest.raises(SystemExit) as info:
        main(["--help"])
    assert info.value.code == 0


def test_decompose_rejects_csv(fixtures_dir, capsys):
    rc = main(["decompose", "--model", _model_path(fixtures_dir, "oscillator.json"),
               "--format", "csv"])
    assert rc == 1
    capsys.readouterr()


def test_check_golden(fixtures_dir, capsys):
    rc = main(["check", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0"])
    out = capsys.readouterr().out
    assert rc == 0
    assert out == CHECK_GOLDEN


def test_check_json_mirror(fixtures_dir, capsys, tmp_path):
    out_path = tmp_path / "check.json"
    rc = main(["check", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0", "--out", str(out_path)])
    capsys.readouterr()
    assert rc == 0
    doc = json.loads(out_path.read_text())
    cells = doc["cells"]
    assert cells["hermitian"]["mapping"] and cells["hermitian"]["real"]
    assert not cells["hermitian"]["sum"]
    assert cells["eigvec"]["sum"] and not cells["eigvec"]["real"]
    assert doc["normality_index"] == pytest.approx(1.0 / (1.0 + 2.0 * np.sqrt(2.0) / 3.0))


def test_check_lossless_swing_physical(fixtures_dir, capsys, tmp_path):
    model_path = tmp_path / "lossless.json"
    rc = main(["swing", "--swing", _model_path(fixtures_dir, "swing_lossless.json"),
               "--out", str(model_path)])
    assert rc == 0
    rc = main(["check", "--model", str(model_path), "--x0", "0.1,-0.1,0,0",
               "--kind", "physical"])
    out = capsys.readouterr().out
    assert rc == 0
    assert "normality_index = 1\n" in out
    herm_row = [ln for ln in out.splitlines() if ln.startswith("hermitian")][0]
    assert herm_row.split() == ["hermitian", "yes", "yes", "yes"]  # normal case: sum holds


def test_normality_value(fixtures_dir, capsys):
    rc = main(["normality", "--model", _model_path(fixtures_dir, "damped_oscillator.json")])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.splitlines()
    value = float(lines[0].split("=")[1])
    assert value == pytest.approx(1.0 / (1.0 + 2.0 * np.sqrt(2.0) / 3.0), abs=1e-10)
    comm = float(lines[1].split("=")[1])
    assert comm == pytest.approx(2.0 * np.sqrt(2.0), abs=1e-10)


def test_energy_csv_layout(fixtures_dir, capsys):
    rc = main(["energy", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.splitlines()
    meta = [ln for ln in lines if ln.startswith("#")]
    assert "# kind=normalized" in meta and "# method=all" in meta
    header = [ln for ln in lines if ln.startswith("t,")][0]
    assert header == ("t,method,kind,mode,energy_re,energy_im,power_re,power_im,"
                      "sum_re,sum_im,total_energy,total_power")
    rows = [ln.split(",") for ln in lines if not ln.startswith("#") and not ln.startswith("t,")]
    assert len(rows) == 4 * 3  # 4 methods x (2 modes + ALL)
    herm_all = [r for r in rows if r[1] == "hermitian" and r[3] == "ALL"][0]
    assert float(herm_all[4]) == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert float(herm_all[10]) == pytest.approx(0.5)


def test_energy_zero_state_csv(fixtures_dir, capsys):
    with pytest.warns(UserWarning):
        rc = main(["energy", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
                   "--x0", "0,0"])
    out = capsys.readouterr().out
    assert rc == 0
    rows = [ln.split(",") for ln in out.splitlines()
            if not ln.startswith("#") and not ln.startswith("t,")]
    for row in rows:
        assert float(row[4]) == 0.0 and float(row[5]) == 0.0  # energy columns
        assert float(row[6]) == 0.0 and float(row[7]) == 0.0  # power columns


def test_energy_method_filter_and_json(fixtures_dir, capsys):
    rc = main(["energy", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0", "--method", "hermitian", "--format", "json"])
    out = capsys.readouterr().out
    assert rc == 0
    doc = json.loads(out)
    assert [r["method"] for r in doc["reports"]] == ["hermitian"]
    rep = doc["reports"][0]
    assert rep["energy_sum"]["re"] == pytest.approx(2.0 / 3.0, abs=1e-12)
    assert rep["sum_error_pct"] == pytest.approx(100.0 / 3.0, abs=1e-9)
    assert rep["paired"][0]["modes"] == [0, 1]


def test_energy_physical_refused_on_flagged_weight(tmp_path, capsys):
    doc = {"n": 2, "A": [[0.0, 1.0], [-1.0, 0.0]], "P": [[1.0, 2.0], [0.0, 1.0]],
           "labels": None}
    path = tmp_path / "flagged.json"
    path.write_text(json.dumps(doc))
    rc = main(["energy", "--model", str(path), "--x0", "1,0", "--kind", "physical"])
    err = capsys.readouterr().err
    assert rc == 1
    assert "refused" in err or "flagged" in err


def test_simulate_csv(fixtures_dir, capsys):
    rc = main(["simulate", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0", "--t-dist", "0.5", "--t-end", "1", "--dt", "0.25"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = out.splitlines()
    rows = [ln.split(",") for ln in lines if not ln.startswith("#") and not ln.startswith("t,")]
    assert len(rows) == 5 * 4 * 3  # samples x methods x (modes + ALL)
    for row in rows:
        if float(row[0]) < 0.5:
            assert float(row[10]) == 0.0  # zero total energy before the step
    t_at_jump = [r for r in rows if float(r[0]) == 0.5 and r[1] == "moving" and r[3] == "ALL"][0]
    assert float(t_at_jump[10]) == pytest.approx(0.5)  # V(x0) = 0.5 for x0=[1,0]


def test_simulate_bad_grid_exit_1(fixtures_dir, capsys):
    rc = main(["simulate", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
               "--x0", "1,0", "--t-dist", "3", "--t-end", "1", "--dt", "0.25"])
    assert rc == 1
    capsys.readouterr()


def test_swing_conversion_and_round_trip(fixtures_dir, capsys, tmp_path):
    out_path = tmp_path / "model.json"
    rc = main(["swing", "--swing", _model_path(fixtures_dir, "swing_single.json"),
               "--out", str(out_path)])
    capsys.readouterr()
    assert rc == 0
    doc = json.loads(out_path.read_text())
    assert doc["n"] == 2
    assert doc["A"] == [[0.0, 1.0], [-1.0, -0.0]]
    assert doc["labels"] == ["delta_1", "omega_1"]

    # round trip: decomposing the written file matches the in-memory build
    params = me.load_swing(_model_path(fixtures_dir, "swing_single.json"))
    direct = me.decompose(me.build_swing_system(params).A)
    rc = main(["decompose", "--model", str(out_path)])
    out = capsys.readouterr().out
    assert rc == 0
    eigs = [complex(d["re"], d["im"]) for d in json.loads(out)["eigenvalues"]]
    np.testing.assert_allclose(eigs, direct.lambdas, atol=1e-12)


def test_byte_determinism(fixtures_dir, capsys):
    args_energy = ["energy", "--model", _model_path(fixtures_dir, "swing_damped.json"),
                   "--x0", "0.1,0.2,-0.3,0.4"]
    # swing files are not model files: must be rejected
    assert main(args_energy) == 1
    capsys.readouterr()

    args = ["energy", "--model", _model_path(fixtures_dir, "damped_oscillator.json"),
            "--x0", "0.3,-0.4", "--kind", "normalized"]
    runs = []
    for _ in range(2):
        assert main(args) == 0
        runs.append(capsys.readouterr().out)
    assert runs[0] == runs[1]


def test_modal_tol_env(fixtures_dir, capsys, monkeypatch):
    monkeypatch.setenv("MODAL_TOL", "1e-05")
    rc = main(["decompose", "--model", _model_path(fixtures_dir, "oscillator.json")])
    doc = json.loads(capsys.readouterr().out)
    assert rc == 0
    assert doc["config"]["tol"] == 1e-5

    rc = main(["decompose", "--model", _model_path(fixtures_dir, "oscillator.json"),
               "--tol", "1e-7"])
    doc = json.loads(capsys.readouterr().out)
    assert doc["config"]["tol"] == 1e-7  # flag wins over the environment

    monkeypatch.setenv("MODAL_TOL", "not-a-number")
    rc = main(["decompose", "--model", _model_path(fixtures_dir, "oscillator.json")])
    assert rc == 1
    capsys.readouterr()
