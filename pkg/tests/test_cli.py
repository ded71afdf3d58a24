"""CLI round trips, driven in-process through main(argv)."""

import json

import numpy as np
import pytest

from skytwin.gateway.cli import main

from test_scenario import minimal_doc


@pytest.fixture
def scenario_path(tmp_path):
    p = tmp_path / "scenario.json"
    p.write_text(json.dumps(minimal_doc()))
    return p


def test_generate_validate_run_replay_cycle(tmp_path, capsys):
    out = tmp_path / "gen.json"
    assert main(["generate", "--density", "4", "--duration", "600",
                 "--geometry", "head-on", "--seed", "3", "--out", str(out)]) == 0
    assert main(["validate", "--scenario", str(out)]) == 0

    log = tmp_path / "run.jsonl"
    assert main(["run", "--scenario", str(out), "--log", str(log)]) == 0
    assert main(["replay", "--scenario", str(out), "--log", str(log)]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert json.loads(lines[-1])["identical"] is True


def test_validate_reports_error_code(tmp_path, capsys):
    doc = minimal_doc()
    doc["traffic"]["flights"][0]["plan"]["route"] = ["AA", "GHOST"]
    p = tmp_path / "bad.json"
    p.write_text(json.dumps(doc))
    assert main(["validate", "--scenario", str(p)]) == 1
    out = json.loads(capsys.readouterr().out)
    assert out["valid"] is False
    assert out["code"] == "unknown-waypoint"


def test_predict_emits_profile_csv(tmp_path, capsys):
    out = tmp_path / "prof.csv"
    assert main(["predict", "--fl0", "350", "--target-fl", "250",
                 "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "t_s,fl,cas_kt,rocd_fpm,dist_nm"
    last = lines[-1].split(",")
    assert float(last[1]) == pytest.approx(250.0, abs=0.01)


def test_fit_and_sample_round_trip(tmp_path, capsys):
    # synthesize a descent-track CSV: 40 flights, ~6 s cadence
    rows = ["callsign,t,lat,lon,fl,gs,hdg"]
    rng = np.random.default_rng(4)
    for i in range(40):
        fl0 = 380.0
        rate = rng.uniform(1800.0, 2600.0)   # ft/min
        gs = rng.uniform(420.0, 470.0)
        for k in range(0, 700, 6):
            fl = max(180.0, fl0 - rate * k / 60.0 / 100.0)
            rows.append(f"DES{i:03d},{k},{51.0 - k * 1e-4},{0.0},{fl:.2f},{gs:.1f},180")
    tracks = tmp_path / "tracks.csv"
    tracks.write_text("\n".join(rows) + "\n")

    model_path = tmp_path / "model.json"
    assert main(["fit", "--tracks", str(tracks), "--type", "B738",
                 "--phase", "descent", "--gmm-components", "1",
                 "--seed", "2", "--out", str(model_path)]) == 0
    assert model_path.exists()

    sample_path = tmp_path / "corr.json"
    assert main(["sample", "--model", str(model_path), "--seed", "7",
                 "--out", str(sample_path)]) == 0
    doc = json.loads(sample_path.read_text())
    assert len(doc["delta_cas"]) == len(doc["fl_grid"])
    assert all(0.2 <= m <= 3.0 for m in doc["thrust_mult"])


def test_mae_and_replicate_reports(tmp_path, capsys):
    mae_out = tmp_path / "mae.json"
    assert main(["mae", "--runs", "6", "--seed", "1", "--out", str(mae_out)]) == 0
    report = json.loads(mae_out.read_text())
    assert report["cas"]["ratio"] < 0.8

    rep_out = tmp_path / "rep.json"
    plot_out = tmp_path / "plot.json"
    assert main(["replicate", "--exercises", "2", "--seed", "1",
                 "--out", str(rep_out), "--plot-data", str(plot_out)]) == 0
    plot = json.loads(plot_out.read_text())
    assert len(plot["points"]) == 2
