import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from blowuplab.cli import main


def run(tmp_path, *argv, name="out"):
    out = tmp_path / name
    code = main([argv[0], "--out", str(out), *argv[1:]])
    return code, out


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def snapshot(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir())}


# --- profile ------------------------------------------------------------------------

def test_profile_default(tmp_path):
    code, out = run(tmp_path, "profile")
    assert code == 0
    rep = json.loads((out / "profile_report.json").read_text())
    assert rep["verdict"] == "pass"
    assert rep["measurements"][0]["ode_residual_max"] <= rep["thresholds"]["ode_residual_max"]
    assert len(read_csv(out / "profile.csv")) == 1025


def test_profile_degenerate(tmp_path):
    code, out = run(tmp_path, "profile", "--amplitude", "0")
    assert code == 2 and not out.exists()
    code, out = run(tmp_path, "profile", "--amplitude", "0", "--allow-degenerate", name="deg")
    assert code == 0
    rep = json.loads((out / "profile_report.json").read_text())
    assert rep["measurements"][0]["ode_residual_max"] == 0.0


def test_profile_coarse_tolerance(tmp_path):
    fine = json.loads((run(tmp_path, "profile", name="f")[1] / "profile_report.json").read_text())
    code, out = run(tmp_path, "profile", "--tol", "1e-2", name="c")
    assert code == 0
    coarse = json.loads((out / "profile_report.json").read_text())
    assert coarse["thresholds"]["ode_residual_max"] > fine["thresholds"]["ode_residual_max"]


# --- field --------------------------------------------------------------------------

def test_field_grid(tmp_path):
    code, out = run(tmp_path, "field", "--n-r", "32", "--n-x3", "1", "--n-t", "8")
    assert code == 0
    rows = read_csv(out / "field.csv")
    assert len(rows) == 257
    assert rows[0] == ["r", "x3", "t", "v1", "v2", "v3", "v_theta", "h1", "P", "h"]
    body = np.array([[float(x) for x in r] for r in rows[1:]])
    assert np.all(body[:, 5] == 0)
    assert np.max(np.abs(body[body[:, 0] == 1.0][:, 6])) <= 1e-8


def test_field_t_max_rejected(tmp_path):
    for t in ("0.5", "0.7"):
        code, out = run(tmp_path, "field", "--t-max", t)
        assert code == 2 and not out.exists()


def test_field_alpha_zero_h1_is_h(tmp_path):
    code, out = run(tmp_path, "field", "--alpha", "0")
    assert code == 0
    rows = read_csv(out / "field.csv")
    i, j = rows[0].index("h1"), rows[0].index("h")
    assert all(r[i] == r[j] for r in rows[1:])


def test_field_axis_marker(tmp_path):
    code, out = run(tmp_path, "field", "--alpha", "0.5", "--n-t", "2")
    rows = read_csv(out / "field.csv")
    i = rows[0].index("h1")
    axis = [r[i] for r in rows[1:] if float(r[0]) == 0.0]
    assert axis and all(v == "-inf" for v in axis)


# --- verify -------------------------------------------------------------------------

def test_verify_default_and_deterministic(tmp_path):
    code, a = run(tmp_path, "verify", "--jobs", "1", name="a")
    assert code == 0
    summary = json.loads((a / "summary.json").read_text())
    assert summary["verdict"] == "pass"
    assert [s["suite"] for s in summary["suites"]] == [
        "verify_pde", "verify_bounds", "energy", "blowup", "stokes", "boundary"]
    code, b = run(tmp_path, "verify", "--jobs", "3", name="b")
    assert code == 0
    assert snapshot(a) == snapshot(b)


def test_verify_negative_control(tmp_path):
    code, out = run(tmp_path, "verify", "--drop-radial-term", "--jobs", "1")
    assert code == 1
    pde = json.loads((out / "verify_pde.json").read_text())
    assert pde["verdict"] == "fail"
    assert pde["summary"]["max_residual"] > 0.1


def test_verify_degenerate(tmp_path):
    code, out = run(tmp_path, "verify", "--amplitude", "0", "--allow-degenerate", "--jobs", "1")
    assert code == 0


def test_verify_bad_grid(tmp_path):
    code, out = run(tmp_path, "verify", "--levels", "2")
    assert code == 2 and not out.exists()


# --- norms, region, blowup ------------------------------------------------------------

def test_norms(tmp_path):
    code, out = run(tmp_path, "norms", "--p", "1,2", "--alpha", "0.5")
    assert code == 0
    rep = json.loads((out / "norms_report.json").read_text())
    for entry in rep["measurements"]:
        assert entry["weighted_h"]["summary"]["max_residual"] <= 1e-3
    l2 = [e for e in rep["measurements"] if e["p"] == 2][0]["phi_tilde"]["fit"]
    assert abs(l2["exponent"]) < 0.01


def test_norms_log_case(tmp_path):
    code, out = run(tmp_path, "norms", "--p", "1", "--alpha", "1")
    assert code == 0
    rep = json.loads((out / "norms_report.json").read_text())
    entry = rep["measurements"][0]
    assert entry["weighted_h"]["measurements"][0]["logarithmic_case"]
    assert entry["h1"]["params"]["logarithmic"]


def test_region(tmp_path):
    code, out = run(tmp_path, "region", "--q", "10", "--p", "1", "--resolution", "21")
    assert code == 0
    data = json.loads((out / "region.json").read_text())
    assert abs(data["sup_diagonal"]["value"] - 1.618033988749895) <= 1e-6
    assert data["sup_p_q1"] == {"value": 2.0, "open": True}
    assert abs(data["infimum"]["value"] - (2 * 6**0.5 - 2)) <= 1e-4
    assert data["alpha_window"]["lo"] == pytest.approx(0.8, abs=1e-6)
    assert len(read_csv(out / "region.csv")) == 21 * 21 + 1
    assert read_csv(out / "frontier.csv")[0] == ["q", "p"]


def test_region_usage(tmp_path):
    assert run(tmp_path, "region", "--k-order", "4")[0] == 2
    assert run(tmp_path, "region", "--alpha", "1.5", "--k-order", "1")[0] == 2


def test_blowup(tmp_path):
    code, out = run(tmp_path, "blowup", "--alpha", "0.5")
    assert code == 0
    rep = json.loads((out / "blowup.json").read_text())
    assert rep["measurements"][0]["measured_rate"] == pytest.approx(0.25, rel=0.02)
    code, out = run(tmp_path, "blowup", "--alpha", "1.5", name="b2")
    assert code == 0
    assert json.loads((out / "blowup.json").read_text())["measurements"][0]["lower_bounded"]


def test_blowup_narrow_window(tmp_path):
    code, out = run(tmp_path, "blowup", "--window", "1e-4,1e-2")
    assert code == 2 and not out.exists()


# --- config, env, reproducibility ---------------------------------------------------

def test_config_file_and_flag_precedence(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[common]\nalpha = 0\n\n[field]\nn_r = 4\nn_t = 3\n")
    code, out = run(tmp_path, "field", "--config", str(ini))
    assert code == 0
    assert len(read_csv(out / "field.csv")) == 13
    code, out = run(tmp_path, "field", "--config", str(ini), "--n-r", "5", name="o")
    assert len(read_csv(out / "field.csv")) == 16


def test_config_errors(tmp_path):
    bad = tmp_path / "bad.ini"
    bad.write_text("[field]\nbogus = 1\n")
    assert run(tmp_path, "field", "--config", str(bad))[0] == 2
    assert run(tmp_path, "field", "--config", str(tmp_path / "missing.ini"))[0] == 2
    worse = tmp_path / "worse.ini"
    worse.write_text("[field]\nn_r = many\n")
    assert run(tmp_path, "field", "--config", str(worse))[0] == 2
    assert run(tmp_path, "field", "--T", "0.9")[0] == 2
    assert run(tmp_path, "profile", "--tol", "0")[0] == 2


def test_env_overrides_out(tmp_path, monkeypatch):
    target = tmp_path / "env_out"
    monkeypatch.setenv("BLOWUPLAB_OUT", str(target))
    code, flag_dir = run(tmp_path, "field", "--n-t", "2")
    assert code == 0
    assert (target / "field.csv").exists() and not flag_dir.exists()


def test_byte_identical_reruns(tmp_path):
    for cmd in (["profile"], ["field"], ["region", "--resolution", "11"],
                ["norms", "--p", "2"], ["blowup"]):
        _, a = run(tmp_path, *cmd, name="a_" + cmd[0])
        _, b = run(tmp_path, *cmd, name="b_" + cmd[0])
        assert snapshot(a) == snapshot(b)


def test_output_formats(tmp_path):
    _, out = run(tmp_path, "region", "--resolution", "5")
    raw = (out / "region.json").read_bytes()
    data = json.loads(raw)
    assert raw.decode("utf-8") == json.dumps(data, sort_keys=True, indent=2,
                                             ensure_ascii=False) + "\n"
    assert b"\r\n" not in (out / "region.csv").read_bytes()
    assert not [p for p in out.iterdir() if p.name.startswith(".")]


def test_console_script(tmp_path):
    out = tmp_path / "cs"
    proc = subprocess.run([sys.executable, "-m", "blowuplab.cli", "region", "--resolution", "3",
                           "--out", str(out)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "blowuplab.cli", "field", "--t-max", "1"],
                          capture_output=True, text=True, cwd=tmp_path)
    assert proc.returncode == 2 and "t_max" in proc.stderr
