"""Scenario files, generation determinism, track ingestion."""

import json

import numpy as np
import pytest

from skytwin.scenario import (
    GenerationError,
    ScenarioError,
    generate_scenario,
    import_tracks,
    load_scenario,
    save_scenario,
    world_from_spec,
)
from skytwin.scenario.generate import GenerationParams
from skytwin.scenario.files import validate_scenario


def minimal_doc():
    return {
        "schema_version": 1,
        "name": "minimal",
        "seed": 1,
        "duration_s": 600.0,
        "airspace": {
            "airac_date": "2025-01-23",
            "sectors": [{"id": "S1", "floor_fl": 100.0, "ceiling_fl": 460.0,
                         "boundary": [[49.0, -3.0], [53.0, -3.0], [53.0, 3.0], [49.0, 3.0]]}],
            "waypoints": [{"ident": "AA", "lat": 50.0, "lon": 0.0},
                          {"ident": "BB", "lat": 52.0, "lon": 0.0}],
            "bandbox": {"groups": [["G1", ["S1"]]]},
        },
        "simulated_groups": ["G1"],
        "traffic": {
            "mode": "generated",
            "flights": [{
                "plan": {"callsign": "TST001", "aircraft_type": "B738",
                         "departure": "EGLL", "destination": "EHAM",
                         "route": ["AA", "BB"], "requested_fl": 350.0,
                         "requested_cas": 280.0, "requested_mach": 0.78},
                "entry_time_s": 0.0,
                "entry": {"lat": 50.0, "lon": 0.0, "fl": 330.0,
                          "heading": 0.0, "cas": 280.0},
                "cruise": [280.0, 0.78],
            }],
            "tracks": [],
        },
    }


def test_minimal_scenario_loads_and_builds(tmp_path):
    p = tmp_path / "s.json"
    p.write_text(json.dumps(minimal_doc()))
    spec = load_scenario(p)
    world = world_from_spec(spec)
    assert len(world.aircraft) == 1
    assert "TST001" in world.aircraft


def test_unknown_waypoint_names_flight_and_field(tmp_path):
    doc = minimal_doc()
    doc["traffic"]["flights"][0]["plan"]["route"] = ["AA", "NOPE"]
    with pytest.raises(ScenarioError) as err:
        validate_scenario(doc)
    assert err.value.code == "unknown-waypoint"
    assert "NOPE" in str(err.value) and "TST001" in str(err.value)
    assert "route[1]" in err.value.path


def test_schema_version_gate():
    doc = minimal_doc()
    doc["schema_version"] = 99
    with pytest.raises(ScenarioError) as err:
        validate_scenario(doc)
    assert err.value.code == "schema-version"


def test_save_load_save_byte_identical(tmp_path):
    spec = generate_scenario(GenerationParams(density_per_10min=5, duration_s=1200), 77)
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    save_scenario(spec, p1)
    save_scenario(load_scenario(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()


def test_generation_deterministic_per_seed():
    params = GenerationParams(density_per_10min=8, duration_s=900)
    a = generate_scenario(params, 5).canonical_text()
    b = generate_scenario(params, 5).canonical_text()
    c = generate_scenario(params, 6).canonical_text()
    assert a == b
    assert a != c


def test_generation_poisson_moment():
    params = GenerationParams(density_per_10min=6.0, duration_s=3600.0)
    counts = [
        len(generate_scenario(params, seed).doc["traffic"]["flights"])
        for seed in range(300)
    ]
    mean = np.mean(counts)
    lam = 6.0 / 600.0 * 3600.0
    # 3 sigma of the sample mean of a Poisson(36)
    assert abs(mean - lam) < 3.0 * np.sqrt(lam / len(counts))


def test_generation_rejects_bad_params():
    with pytest.raises(GenerationError):
        GenerationParams(density_per_10min=0.0)
    with pytest.raises(GenerationError):
        GenerationParams(conflict_geometry="spiral")
    with pytest.raises(GenerationError):
        GenerationParams(type_mix={"B738": 0.5})


def test_crossing_template_produces_conflict_when_unflown():
    spec = generate_scenario(
        GenerationParams(density_per_10min=4, duration_s=1800, conflict_geometry="crossing"), 11)
    world = world_from_spec(spec)
    min_cpa = float("inf")
    while not world.done():
        world.tick()
        snap = world.log.snapshots()[-1]
        acs = snap["aircraft"]
        for i in range(len(acs)):
            for j in range(i + 1, len(acs)):
                a, b = acs[i], acs[j]
                if abs(a["fl"] - b["fl"]) < 10.0:
                    from skytwin.geo import great_circle_nm
                    min_cpa = min(min_cpa, great_circle_nm(a["lat"], a["lon"], b["lat"], b["lon"]))
    assert min_cpa < 5.0


# ----------------------------------------------------------------- tracks

def make_csv(rows):
    head = "callsign,t,lat,lon,fl,gs,hdg\n"
    return head + "\n".join(",".join(str(x) for x in r) for r in rows) + "\n"


def test_import_straight_flight_no_flags():
    rows = [("AAA111", 6 * i, 51.0, 0.01 * i, 330, 420, 90) for i in range(20)]
    tracks, errors = import_tracks(make_csv(rows))
    assert errors == []
    assert len(tracks) == 1
    assert tracks[0].flags == []


def test_gap_flagging():
    rows = [("AAA111", 0, 51.0, 0.0, 330, 420, 90),
            ("AAA111", 6, 51.0, 0.01, 330, 420, 90),
            ("AAA111", 96, 51.0, 0.15, 330, 420, 90)]
    tracks, _ = import_tracks(make_csv(rows))
    assert any("gap" in f for f in tracks[0].flags)
    assert tracks[0].rows[1].quality == "gap-after"


def test_fl_jump_flagging():
    rows = [("AAA111", 0, 51.0, 0.0, 330, 420, 90),
            ("AAA111", 6, 51.0, 0.01, 355, 420, 90)]
    tracks, _ = import_tracks(make_csv(rows))
    assert any("FL jump" in f for f in tracks[0].flags)


def test_shuffled_rows_equal_sorted():
    rng = np.random.default_rng(3)
    rows = [("AAA111", 6 * i, 51.0 + 0.001 * i, 0.01 * i, 330, 420, 90) for i in range(30)]
    rows += [("BBB222", 6 * i, 50.0, 0.02 * i, 350, 430, 90) for i in range(30)]
    shuffled = list(rows)
    rng.shuffle(shuffled)
    a, _ = import_tracks(make_csv(rows))
    b, _ = import_tracks(make_csv(shuffled))
    assert [t.callsign for t in a] == [t.callsign for t in b]
    for ta, tb in zip(a, b):
        assert [(r.t, r.lat, r.lon) for r in ta.rows] == [(r.t, r.lat, r.lon) for r in tb.rows]


def test_bad_rows_reported_and_skipped():
    text = "callsign,t,lat,lon,fl,gs,hdg\nAAA111,0,51.0,0.0,330,420,90\nAAA111,notanumber,51,0,330,420,90\nAAA111,12,51.0,0.02,330,420,90\n"
    tracks, errors = import_tracks(text)
    assert len(errors) == 1 and errors[0]["line"] == 3
    assert len(tracks[0].rows) == 2


def test_missing_columns_rejected():
    with pytest.raises(ValueError, match="columns"):
        import_tracks("callsign,t,lat\nX,0,51\n")
