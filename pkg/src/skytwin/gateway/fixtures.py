"""Synthetic fixtures for the evidence pipelines.

Real-world counterparts of these experiments need licensed operational
data; the numbers reported there (see docs/reference_targets.json) are
recorded as annotated reference targets. These fixtures make the same
pipelines runnable end-to-end on synthetic inputs with known ground truth.
"""

from __future__ import annotations

import numpy as np

from .. import validation as val
from ..atmosphere import WindGrid
from ..kernel.clearances import ClimbDescendNow, DescendNowLevelBy, FlyHeading
from ..perf.coefficients import load_coefficients
from ..perf.fpca import FunctionalBasis
from ..perf.gmm import ScoreGMM
from ..perf.model import CorrectionSample, TrajectoryModel, fit_model, sample_correction
from ..perf.tem import Guidance, Kinematics, predict_profile

CALM = WindGrid.calm()


def known_descent_generator(seed_grid=(160.0, 380.0, 23)) -> TrajectoryModel:
    """Ground-truth generator: two correction regimes (fast/slow descents)."""
    coeffs = load_coefficients("B738")
    grid = np.linspace(*seed_grid)
    n = len(grid)
    flat = np.full(n, 1.0 / np.sqrt(n))
    bump = np.sin(np.pi * (grid - grid[0]) / (grid[-1] - grid[0]))
    bump = bump / np.linalg.norm(bump)
    bases = {
        "cas": FunctionalBasis(grid, np.full(n, 4.0), flat[None, :], np.array([25.0])),
        "thrust": FunctionalBasis(grid, np.ones(n), bump[None, :], np.array([0.003])),
        "drag": FunctionalBasis(grid, np.ones(n), flat[None, :], np.array([0.01])),
    }
    m_cas = 7.0 * np.sqrt(n)
    m_drag = 0.10 * np.sqrt(n)
    gmm = ScoreGMM(
        weights=np.array([0.55, 0.45]),
        means=np.array([[m_cas, 0.0, m_drag], [-m_cas, 0.0, -m_drag]]),
        covariances=np.array([np.diag([6.0, 0.02, 0.04]),
                              np.diag([6.0, 0.02, 0.04])]),
    )
    return TrajectoryModel(
        aircraft_type="B738", phase="descent", bases=bases, score_gmm=gmm,
        cruise_pmf=(((280.0, 0.78), 0.5), ((270.0, 0.77), 0.3), ((290.0, 0.79), 0.2)),
        base_cas_on_grid=np.array([coeffs.base_cas(f) for f in grid]),
        fallback_cruise=(coeffs.base_cas(350.0), coeffs.base_mach),
    )


def descent_rollout(correction: CorrectionSample, start_fl=370.0, target_fl=180.0):
    from ..atmosphere import cas_to_tas, mach_to_tas, tas_to_cas
    coeffs = load_coefficients("B738")
    # start on the governing schedule leg so there is no entry transient
    sched = coeffs.base_cas(start_fl) + float(np.interp(start_fl, correction.fl_grid,
                                                        correction.delta_cas))
    tas0 = min(cas_to_tas(sched, start_fl), mach_to_tas(coeffs.base_mach, start_fl))
    kin = Kinematics(lat=51.5, lon=0.0, fl=start_fl, heading=270.0,
                     cas=tas_to_cas(tas0, start_fl))
    return predict_profile(kin, Guidance(target_fl=target_fl), correction.curves(),
                           coeffs, CALM, stop_after_level_s=20.0)


def fidelity_fixture(n_corpus: int = 2000, n_samples: int = 2000, seed: int = 0,
                     target_fl: float = 180.0) -> dict:
    """Fit on synthetic descents from the known two-regime generator, sample
    the refit model, and compare quantity distributions."""
    generator = known_descent_generator()
    coeffs = load_coefficients("B738")
    gen_seeds = np.random.SeedSequence([seed, 1]).generate_state(n_corpus)
    corpus = [descent_rollout(sample_correction(generator, int(s))) for s in gen_seeds]
    refit = fit_model(corpus, "B738", "descent", k_components=None,
                      gmm_components=2, seed=seed, coeffs=coeffs)

    extractors = {
        "time_to_bottom_of_descent_s": lambda p: val.time_to_bottom_of_descent(p, target_fl),
        "cas_at_fl250_kt": lambda p: val.cas_at_fl(p, 250.0),
        "rocd_at_fl250_fpm": lambda p: val.rocd_at_fl(p, 250.0),
    }
    reports = val.fidelity_experiment(
        refit, corpus, rollout=descent_rollout, extractors=extractors,
        n_samples=n_samples, seed=seed + 1,
    )
    t_bod = [val.time_to_bottom_of_descent(p, target_fl) for p in corpus]
    t_bod = [t for t in t_bod if t is not None]
    iqr = float(np.percentile(t_bod, 75) - np.percentile(t_bod, 25))
    return {
        "n_corpus": n_corpus,
        "n_samples": n_samples,
        "seed": seed,
        "corpus_iqr_s": iqr,
        "quantities": {k: r.to_dict() for k, r in reports.items()},
        "components_kept": {q: refit.bases[q].n_components for q in ("cas", "thrust", "drag")},
    }


def mae_fixture(n_runs: int = 30, bias_kt: float = 15.0, seed: int = 0) -> dict:
    """Planted-bias mean-mode experiment: truth flies the base schedule plus
    a CAS bias; the fitted model must beat the uncorrected baseline."""
    coeffs = load_coefficients("B738")
    rng = np.random.default_rng(seed)
    grid = np.linspace(160.0, 380.0, 23)

    from ..atmosphere import cas_to_tas, mach_to_tas, tas_to_cas

    def truth_runs(n, rng):
        runs = []
        for _ in range(n):
            delta = np.full_like(grid, bias_kt + rng.normal(0.0, 2.0))
            corr = CorrectionSample(grid, delta, np.ones_like(grid), np.ones_like(grid))
            start_fl = 370.0
            sched = coeffs.base_cas(start_fl) + float(delta[-1])
            tas0 = min(cas_to_tas(sched, start_fl), mach_to_tas(coeffs.base_mach, start_fl))
            kin = Kinematics(lat=51.5, lon=0.0, fl=start_fl, heading=270.0,
                             cas=tas_to_cas(tas0, start_fl))
            guid = Guidance(target_fl=180.0)
            ref = predict_profile(kin, guid, corr.curves(), coeffs, CALM,
                                  stop_after_level_s=30.0)
            runs.append(val.ReplayRun(initial=kin, guidance=guid, reference=ref))
        return runs

    fit_corpus = [r.reference for r in truth_runs(max(30, n_runs), rng)]
    model = fit_model(fit_corpus, "B738", "descent", k_components=2,
                      gmm_components=1, seed=seed, coeffs=coeffs)
    eval_runs = truth_runs(n_runs, rng)
    report = val.mean_mode_mae_experiment(eval_runs, model, None, coeffs, CALM)
    report["bias_kt"] = bias_kt
    report["seed"] = seed
    return report


def _exercise(i: int, seed: int, sub_dt: float):
    """One synthetic college-style exercise: two flights, a scripted
    clearance sequence."""
    from ..airspace import AirspaceDefinition, BandboxConfig, FlightPlan, Sector, Waypoint
    from ..kernel.world import LatencyModel, World

    rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
    fl_a = float(rng.choice([310.0, 330.0, 350.0]))
    fl_b = float(rng.choice([320.0, 340.0, 360.0]))
    hdg_offset = float(rng.uniform(-20.0, 20.0))

    def build():
        sector = Sector(id="EX", floor=100.0, ceiling=460.0,
                        lateral_boundary=((49.0, -4.0), (54.0, -4.0), (54.0, 4.0), (49.0, 4.0)))
        wps = (Waypoint("ENTRY", 51.5, -3.0), Waypoint("EXITP", 51.5, 3.0),
               Waypoint("SOUTH", 50.0, 0.0))
        air = AirspaceDefinition("2025-01-23", (sector,), wps,
                                 BandboxConfig(groups=(("GEX", frozenset({"EX"})),)))
        w = World(air, seed=seed * 1000 + i, duration_s=900.0,
                  latency=LatencyModel(5.0, 2.0), sub_dt=sub_dt)
        plan_a = FlightPlan(f"EXA{i:02d}", "B738", "EGLL", "EHAM",
                            ("ENTRY", "EXITP"), 370.0, 285.0, 0.78)
        plan_b = FlightPlan(f"EXB{i:02d}", "A320", "EGKK", "EDDF",
                            ("ENTRY", "EXITP"), 360.0, 280.0, 0.78)
        w.spawn_simulated(plan_a, Kinematics(lat=51.5, lon=-3.0, fl=fl_a,
                                             heading=90.0, cas=280.0))
        w.spawn_simulated(plan_b, Kinematics(lat=51.2, lon=-2.8, fl=fl_b,
                                             heading=(90.0 + hdg_offset) % 360.0, cas=275.0))
        return w

    log = [
        (30.0, f"EXA{i:02d}", ClimbDescendNow(fl_a + 20.0)),
        (90.0, f"EXB{i:02d}", FlyHeading((120.0 + hdg_offset) % 360.0)),
        (240.0, f"EXA{i:02d}", DescendNowLevelBy(fl_a - 40.0, "EXITP")),
        (360.0, f"EXB{i:02d}", ClimbDescendNow(fl_b - 30.0)),
    ]
    return build, log, [f"EXA{i:02d}", f"EXB{i:02d}"]


def replication_fixture(n_exercises: int = 10, seed: int = 0,
                        reference_sub_dt: float = 0.125) -> tuple[dict, dict]:
    """Exercises re-simulated against a refined-integrator reference."""
    exercises = []
    for i in range(n_exercises):
        build_fine, log, callsigns = _exercise(i, seed, sub_dt=reference_sub_dt)
        build_coarse, _, _ = _exercise(i, seed, sub_dt=1.0)
        reference = val.record_reference(build_fine(), list(log), callsigns)
        exercises.append(val.ReplicationExercise(
            name=f"exercise-{i:02d}", build_world=build_coarse,
            clearance_log=list(log), reference=reference))
    report = val.replication_experiment(exercises)
    return report, val.replication_plot_data(report)


def self_replication_fixture(seed: int = 0) -> dict:
    """Identical-kernel replication: errors must be exactly zero."""
    build, log, callsigns = _exercise(0, seed, sub_dt=1.0)
    reference = val.record_reference(build(), list(log), callsigns)
    ex = val.ReplicationExercise("self", build, list(log), reference)
    return val.replication_experiment([ex])
