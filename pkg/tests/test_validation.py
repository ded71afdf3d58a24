"""Distribution distances, extractors, and the experiment pipelines."""

import numpy as np
import pytest

from skytwin import validation as val
from skytwin.atmosphere import WindGrid
from skytwin.kernel.clearances import ClimbDescendNow, FlyHeading
from skytwin.perf import (
    Guidance,
    Kinematics,
    load_coefficients,
    mean_mode_correction,
    predict_profile,
    sample_correction,
)
from skytwin.perf.profiles import FlightProfile

from conftest import make_world, spawn_cruise
from test_perf_model import known_mixture_model, rollout_descent

B738 = load_coefficients("B738")
CALM = WindGrid.calm()


# -------------------------------------------------------------- distances

def ks_brute(a, b):
    pts = np.concatenate([a, b])
    best = 0.0
    for x in pts:
        fa = np.mean(np.asarray(a) <= x)
        fb = np.mean(np.asarray(b) <= x)
        best = max(best, abs(fa - fb))
    return best


def w1_quantile_oracle(a, b, n=1_000_000):
    q = (np.arange(n) + 0.5) / n
    qa = np.quantile(a, q, method="inverted_cdf")
    qb = np.quantile(b, q, method="inverted_cdf")
    return float(np.mean(np.abs(qa - qb)))


def test_ks_identical_and_disjoint():
    x = np.arange(10.0)
    assert val.ks_distance(x, x) == 0.0
    assert val.ks_distance(x, x + 100.0) == 1.0


def test_ks_matches_brute_force():
    rng = np.random.default_rng(8)
    a = rng.normal(0, 1, 100)
    b = rng.normal(0.3, 1.2, 100)
    assert val.ks_distance(a, b) == pytest.approx(ks_brute(a, b), abs=1e-12)


def test_ks_symmetry():
    rng = np.random.default_rng(9)
    a, b = rng.normal(size=50), rng.normal(size=70)
    assert val.ks_distance(a, b) == val.ks_distance(b, a)


def test_ks_empty_rejected():
    with pytest.raises(ValueError):
        val.ks_distance([], [1.0])


def test_wasserstein_identical_translation():
    rng = np.random.default_rng(10)
    a = rng.normal(size=200)
    assert val.wasserstein_1d(a, a) == 0.0
    assert val.wasserstein_1d(a, a + 3.25) == pytest.approx(3.25, abs=1e-12)
    assert val.wasserstein_1d(a, a - 1.5) == pytest.approx(1.5, abs=1e-12)


def test_wasserstein_matches_quantile_oracle_unequal_sizes():
    rng = np.random.default_rng(11)
    a = rng.normal(0, 1, 83)
    b = rng.normal(0.4, 1.7, 131)
    assert val.wasserstein_1d(a, b) == pytest.approx(w1_quantile_oracle(a, b), abs=1e-4)


# -------------------------------------------------------------- extractors

def test_time_to_bottom_of_descent():
    t = np.arange(0.0, 100.0)
    fl = np.maximum(200.0, 300.0 - 2.0 * t)    # levels at t=50
    prof = FlightProfile(t=t, fl=fl, cas=np.full_like(t, 280.0))
    bod = val.time_to_bottom_of_descent(prof, 200.0)
    assert bod is not None and 49.0 <= bod <= 53.0
    assert val.time_to_bottom_of_descent(prof, 100.0) is None


def test_cas_and_rocd_at_fl():
    prof = rollout_descent(mean_mode_correction(known_mixture_model()))
    c = val.cas_at_fl(prof, 250.0)
    r = val.rocd_at_fl(prof, 250.0)
    assert c is not None and 150.0 < c < 370.0
    assert r is not None and r < -300.0
    assert val.cas_at_fl(prof, 500.0) is None


# ------------------------------------------------------ fidelity pipeline

def test_fidelity_zero_variance_degenerate():
    model = known_mixture_model(var_scale=0.0)
    single = mean_mode_correction(model)
    # collapse the mixture to a point mass so sampling equals the mean
    from skytwin.perf.gmm import ScoreGMM
    from skytwin.perf.model import TrajectoryModel
    point = TrajectoryModel(
        aircraft_type=model.aircraft_type, phase=model.phase, bases=model.bases,
        score_gmm=ScoreGMM(weights=np.array([1.0]),
                           means=model.score_gmm.mixture_mean()[None, :],
                           covariances=np.zeros((1, 3, 3))),
        cruise_pmf=model.cruise_pmf,
        base_cas_on_grid=model.base_cas_on_grid,
        fallback_cruise=model.fallback_cruise,
    )
    corpus = [rollout_descent(single, seed_cas_offset=float(single.delta_cas[-1]))] * 5
    reports = val.fidelity_experiment(
        point, corpus,
        rollout=lambda corr: rollout_descent(corr, seed_cas_offset=float(corr.delta_cas[-1])),
        extractors={"t_bod": lambda p: val.time_to_bottom_of_descent(p, 140.0)},
        n_samples=5, seed=0,
    )
    assert reports["t_bod"].ks == 0.0
    assert reports["t_bod"].wasserstein < 1.0


def test_fidelity_deterministic_given_seed():
    model = known_mixture_model()
    corpus = [rollout_descent(sample_correction(model, 50 + i)) for i in range(6)]
    kw = dict(
        rollout=lambda corr: rollout_descent(corr),
        extractors={"t_bod": lambda p: val.time_to_bottom_of_descent(p, 140.0)},
        n_samples=6, seed=4,
    )
    a = val.fidelity_experiment(model, corpus, **kw)
    b = val.fidelity_experiment(model, corpus, **kw)
    assert a["t_bod"].ks == b["t_bod"].ks
    assert a["t_bod"].wasserstein == b["t_bod"].wasserstein


# ------------------------------------------------------- mean-mode ratios

def make_runs(n, bias_kt, seed=0):
    """Descent runs whose 'truth' flies the base schedule plus a CAS bias."""
    from skytwin.atmosphere import cas_to_tas, mach_to_tas, tas_to_cas
    rng = np.random.default_rng(seed)
    runs = []
    grid = np.linspace(150.0, 370.0, 23)
    for i in range(n):
        delta = np.full_like(grid, bias_kt + rng.normal(0.0, 1.0))
        from skytwin.perf.model import CorrectionSample
        corr = CorrectionSample(grid, delta, np.ones_like(grid), np.ones_like(grid))
        start_fl = 370.0
        sched = B738.base_cas(start_fl) + float(delta[-1])
        tas0 = min(cas_to_tas(sched, start_fl), mach_to_tas(B738.base_mach, start_fl))
        kin = Kinematics(lat=51.0, lon=0.0, fl=start_fl, heading=270.0,
                         cas=tas_to_cas(tas0, start_fl))
        guid = Guidance(target_fl=160.0)
        ref = predict_profile(kin, guid, corr.curves(), B738, CALM, stop_after_level_s=30.0)
        runs.append(val.ReplayRun(initial=kin, guidance=guid, reference=ref))
    return runs


def test_self_comparison_ratio_is_one():
    model = known_mixture_model()
    runs = make_runs(3, 0.0)
    out = val.mean_mode_mae_experiment(runs, model, model, B738, CALM)
    assert out["cas"]["ratio"] == 1.0
    assert out["rocd"]["ratio"] == 1.0


def test_planted_bias_model_beats_baseline():
    bias = 15.0
    runs = make_runs(8, bias, seed=2)
    # fit on a larger corpus generated the same way
    corpus = [r.reference for r in make_runs(40, bias, seed=3)]
    from skytwin.perf import fit_model
    model = fit_model(corpus, "B738", "descent", k_components=2, gmm_components=1,
                      seed=1, coeffs=B738)
    out = val.mean_mode_mae_experiment(runs, model, None, B738, CALM)
    assert out["cas"]["ratio"] < 0.8
    assert out["rocd"]["ratio"] < 0.8


def test_short_future_excluded():
    run = make_runs(1, 0.0)[0]
    short = val.ReplayRun(
        initial=run.initial, guidance=run.guidance,
        reference=FlightProfile(t=run.reference.t[:30], fl=run.reference.fl[:30],
                                cas=run.reference.cas[:30]),
    )
    out = val.mean_mode_mae_experiment([run, short], None, None, B738, CALM)
    assert out["excluded_runs"] == 1
    assert out["n_runs"] == 1


# ------------------------------------------------------------- replication

def exercise_fixture(name="EX01", sub_dt=1.0):
    def build():
        w = make_world(seed=31, duration_s=300.0, sub_dt=sub_dt)
        spawn_cruise(w, "AAA111", fl=330.0)
        spawn_cruise(w, "BBB222", fl=350.0, lat=51.0)
        return w
    log = [
        (12.0, "AAA111", ClimbDescendNow(350.0)),
        (30.0, "BBB222", FlyHeading(120.0)),
    ]
    return build, log


def test_self_replication_error_exactly_zero():
    build, log = exercise_fixture()
    reference = val.record_reference(build(), list(log), ["AAA111", "BBB222"])
    ex = val.ReplicationExercise("EX01", build, list(log), reference)
    report = val.replication_experiment([ex])
    row = report["exercises"][0]
    assert row["mean_lateral_nm"] == 0.0
    assert row["mean_vertical_fl"] == 0.0
    assert report["passed"]


def test_refined_reference_errors_small():
    build_fine, log = exercise_fixture(sub_dt=0.125)
    build_coarse, _ = exercise_fixture(sub_dt=1.0)
    reference = val.record_reference(build_fine(), list(log), ["AAA111", "BBB222"])
    ex = val.ReplicationExercise("EXREF", build_coarse, list(log), reference)
    report = val.replication_experiment([ex])
    row = report["exercises"][0]
    assert row["mean_lateral_nm"] < 0.1
    assert row["mean_vertical_fl"] < 1.0


def test_unknown_aircraft_marks_run_invalid():
    build, log = exercise_fixture()
    log = log + [(40.0, "GHOST1", FlyHeading(90.0))]
    reference = val.record_reference(build(), [e for e in log if e[1] != "GHOST1"],
                                     ["AAA111"])
    ex = val.ReplicationExercise("EXBAD", build, log, reference)
    report = val.replication_experiment([ex])
    assert report["invalid"] and "GHOST1" in report["invalid"][0]["reason"]
    assert not report["passed"]


def test_plot_data_shape():
    build, log = exercise_fixture()
    reference = val.record_reference(build(), list(log), ["AAA111"])
    report = val.replication_experiment(
        [val.ReplicationExercise("EX01", build, list(log), reference)])
    plot = val.replication_plot_data(report)
    assert plot["threshold_lateral_nm"] == 2.5
    assert plot["threshold_vertical_fl"] == 5.0
    assert plot["points"][0]["exercise"] == "EX01"
