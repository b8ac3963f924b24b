"""End-to-end tests of the command-line interface (in-process)."""

import json

import pytest

from superdir.cli import main


def _run(argv):
    return main(argv)


def test_pattern_command_writes_csv_and_sidecar(tmp_path):
    out = tmp_path / "pattern.csv"
    rc = _run(["pattern", "--antennas", "12", "--points", "181",
               "--angles", "3,90,150", "--out", str(out)])
    assert rc == 0
    text = out.read_text(encoding="utf-8")
    assert text.splitlines()[0] == "sweep,label,metric,mean,stderr,trials"
    assert ",insp,directivity," in text
    assert ",zf,directivity," in text
    meta = json.loads((tmp_path / "pattern.csv.meta.json").read_text())
    assert meta["sweep"] == "pattern"
    assert meta["user_angles_deg"] == [3.0, 90.0, 150.0]


def test_se_sweep_runs_and_is_byte_identical_on_rerun(tmp_path):
    out1 = tmp_path / "a.csv"
    out2 = tmp_path / "b.csv"
    argv = ["se-sweep", "--antennas", "6", "--users", "2", "--spacing", "0.3",
            "--trials", "5", "--seed", "11"]
    assert _run(argv + ["--out", str(out1)]) == 0
    assert _run(argv + ["--out", str(out2)]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    meta = json.loads((tmp_path / "a.csv.meta.json").read_text())
    assert meta["master_seed"] == 11
    assert meta["sweep"] == "se"
    assert "config_sha256" in meta


def test_config_file_with_flag_overrides(tmp_path):
    cfg = {"num_antennas": 6, "spacing": 0.3, "num_users": 2, "trials": 4,
           "snr_db": [0.0, 20.0], "precoders": ["mrt", "zf"]}
    cfg_path = tmp_path / "scenario.json"
    cfg_path.write_text(json.dumps(cfg))
    out = tmp_path / "se.csv"
    rc = _run(["se-sweep", "--config", str(cfg_path), "--trials", "2",
               "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert all(line.endswith(",2") for line in lines[1:])  # trials overridden
    assert len(lines) == 1 + 2 * 2  # two families times two SNR points


def test_unknown_config_key_is_usage_error(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({"num_antennas": 6, "spacing": 0.3,
                                    "bogus_knob": 1}))
    rc = _run(["se-sweep", "--config", str(cfg_path),
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "bogus_knob" in capsys.readouterr().err


def test_invalid_json_config_is_usage_error(tmp_path, capsys):
    cfg_path = tmp_path / "broken.json"
    cfg_path.write_text("{not json")
    rc = _run(["se-sweep", "--config", str(cfg_path),
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_missing_config_file_is_usage_error(tmp_path, capsys):
    rc = _run(["se-sweep", "--config", str(tmp_path / "nope.json"),
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2
    assert "nope.json" in capsys.readouterr().err


def test_invalid_scenario_values_are_usage_errors(tmp_path):
    rc = _run(["se-sweep", "--antennas", "4", "--users", "9",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 2


def test_indefinite_geometry_is_simulation_failure(tmp_path, capsys):
    rc = _run(["gain-sweep", "--antennas", "16", "--spacing", "0.1",
               "--users", "2", "--trials", "2",
               "--out", str(tmp_path / "x.csv")])
    assert rc == 3
    assert "positive definite" in capsys.readouterr().err


def test_gain_sweep_spacings_flag(tmp_path):
    out = tmp_path / "gain.csv"
    rc = _run(["gain-sweep", "--antennas", "6", "--users", "2",
               "--trials", "3", "--spacings", "0.5,0.25",
               "--out", str(out)])
    assert rc == 0
    text = out.read_text()
    assert text.count("\n0.25,") >= 1 and "\n0.5," in text


def test_estimate_and_wideband_commands(tmp_path):
    rc = _run(["estimate-sweep", "--antennas", "6", "--users", "2",
               "--spacing", "0.25", "--trials", "3",
               "--out", str(tmp_path / "est.csv")])
    assert rc == 0
    est = (tmp_path / "est.csv").read_text()
    assert "coupling-aware" in est and "conventional" in est
    rc = _run(["wideband-sweep", "--antennas", "8", "--users", "2",
               "--spacing", "0.25", "--trials", "2",
               "--out", str(tmp_path / "wb.csv")])
    assert rc == 0
    wb = (tmp_path / "wb.csv").read_text()
    assert "wideband" in wb and "narrowband" in wb


def test_plot_flag_writes_png(tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "se.csv"
    png = tmp_path / "se.png"
    rc = _run(["se-sweep", "--antennas", "6", "--users", "2", "--trials", "2",
               "--spacing", "0.3", "--out", str(out), "--plot", str(png)])
    assert rc == 0
    assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
