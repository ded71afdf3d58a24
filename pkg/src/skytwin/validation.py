"""Statistical evidence pipelines: distribution fidelity, mean-mode error
ratios, and kernel replication.

The distances are exact two-sample computations (no binning). Experiment
functions are deterministic given (model, corpus, N, seed) and emit plain
dict reports plus plot-ready data tables.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import geo
from .perf.model import TrajectoryModel, identity_correction, mean_mode_correction, sample_correction
from .perf.profiles import FlightProfile
from .perf.tem import Guidance, Kinematics, tem_step

LEVEL_BY_BAND_FL = 1.0
BOD_ROCD_BAND = 300.0      # ft/min
BOD_SUSTAIN_SAMPLES = 3

LATERAL_THRESHOLD_NM = 2.5
VERTICAL_THRESHOLD_FL = 5.0


# --------------------------------------------------------------- distances

def ks_distance(sample_a, sample_b) -> float:
    """Exact two-sample Kolmogorov-Smirnov distance by sort-merge."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("KS distance needs non-empty samples")
    pooled = np.concatenate([a, b])
    fa = np.searchsorted(a, pooled, side="right") / len(a)
    fb = np.searchsorted(b, pooled, side="right") / len(b)
    return float(np.max(np.abs(fa - fb)))


def wasserstein_1d(sample_a, sample_b) -> float:
    """1-D W1 distance: integral of |ECDF_a - ECDF_b| over the line."""
    a = np.sort(np.asarray(sample_a, dtype=float))
    b = np.sort(np.asarray(sample_b, dtype=float))
    if len(a) == 0 or len(b) == 0:
        raise ValueError("Wasserstein distance needs non-empty samples")
    pooled = np.sort(np.concatenate([a, b]))
    if len(pooled) < 2:
        return 0.0
    mid = pooled[:-1]
    fa = np.searchsorted(a, mid, side="right") / len(a)
    fb = np.searchsorted(b, mid, side="right") / len(b)
    return float(np.sum(np.abs(fa - fb) * np.diff(pooled)))


def ecdf(sample) -> tuple[np.ndarray, np.ndarray]:
    x = np.sort(np.asarray(sample, dtype=float))
    return x, np.arange(1, len(x) + 1) / len(x)


@dataclass
class DistributionReport:
    quantity: str
    ks: float
    wasserstein: float
    n_a: int
    n_b: int
    excluded_a: int = 0
    excluded_b: int = 0
    ecdf_a: tuple = ()
    ecdf_b: tuple = ()

    def to_dict(self) -> dict:
        return {
            "quantity": self.quantity, "ks": self.ks, "wasserstein": self.wasserstein,
            "n_a": self.n_a, "n_b": self.n_b,
            "excluded_a": self.excluded_a, "excluded_b": self.excluded_b,
        }


# -------------------------------------------------------------- extractors

def time_to_bottom_of_descent(profile: FlightProfile, cleared_fl: float) -> float | None:
    """First time inside 1 FL of the cleared level with ROCD under 300 ft/min
    sustained for 3 consecutive samples; None when never reached."""
    ok = (np.abs(profile.fl - cleared_fl) < LEVEL_BY_BAND_FL) & \
         (np.abs(profile.rocd) < BOD_ROCD_BAND)
    run = 0
    for i, flag in enumerate(ok):
        run = run + 1 if flag else 0
        if run >= BOD_SUSTAIN_SAMPLES:
            return float(profile.t[i - BOD_SUSTAIN_SAMPLES + 1])
    return None


def cas_at_fl(profile: FlightProfile, fl: float, descending: bool = True) -> float | None:
    return profile.value_at_fl(profile.cas, fl, descending)


def rocd_at_fl(profile: FlightProfile, fl: float, descending: bool = True) -> float | None:
    return profile.value_at_fl(profile.rocd, fl, descending)


# ---------------------------------------------------- fidelity experiment

def fidelity_experiment(model: TrajectoryModel, corpus: list[FlightProfile],
                        rollout, extractors: dict, n_samples: int, seed: int) -> dict:
    """Sample ``n_samples`` profiles from the generative model via ``rollout``
    (a callable correction -> FlightProfile) and compare each extracted
    quantity's distribution against the held-out corpus."""
    seeds = np.random.SeedSequence(seed).generate_state(n_samples)
    sampled = [rollout(sample_correction(model, int(s))) for s in seeds]

    reports = {}
    for name, extract in extractors.items():
        vals_a, skip_a = _extract_all(corpus, extract)
        vals_b, skip_b = _extract_all(sampled, extract)
        if not vals_a or not vals_b:
            raise ValueError(f"extractor {name} produced an empty sample")
        reports[name] = DistributionReport(
            quantity=name,
            ks=ks_distance(vals_a, vals_b),
            wasserstein=wasserstein_1d(vals_a, vals_b),
            n_a=len(vals_a), n_b=len(vals_b),
            excluded_a=skip_a, excluded_b=skip_b,
            ecdf_a=ecdf(vals_a), ecdf_b=ecdf(vals_b),
        )
    return reports


def _extract_all(profiles, extract) -> tuple[list[float], int]:
    vals, skipped = [], 0
    for p in profiles:
        v = extract(p)
        if v is None:
            skipped += 1
        else:
            vals.append(v)
    return vals, skipped


# ---------------------------------------------------- mean-mode MAE ratios

@dataclass
class ReplayRun:
    """One recorded flight to predict: the starting state, the clearance
    context in force, and the recorded future states."""

    initial: Kinematics
    guidance: Guidance
    reference: FlightProfile
    aircraft_type: str = "B738"
    phase: str = "descent"


def _rollout_like(run: ReplayRun, correction, coeffs, wind) -> FlightProfile:
    kin = run.initial
    t = [0.0]
    fls, cass, rocds = [kin.fl], [kin.cas], [kin.rocd]
    for i in range(1, len(run.reference.t)):
        dt = float(run.reference.t[i] - run.reference.t[i - 1])
        kin = tem_step(kin, run.guidance, correction, coeffs, wind, dt)
        t.append(float(run.reference.t[i]))
        fls.append(kin.fl)
        cass.append(kin.cas)
        rocds.append(kin.rocd)
    return FlightProfile(t=np.array(t), fl=np.array(fls), cas=np.array(cass),
                         rocd=np.array(rocds))


def mean_mode_mae_experiment(runs: list[ReplayRun], model: TrajectoryModel | None,
                             baseline: TrajectoryModel | None, coeffs, wind) -> dict:
    """MAE of mean-mode vs baseline predictions against recorded futures.

    ``model``/``baseline`` may be None for raw uncorrected coefficients.
    Runs with under 60 s of future data are excluded (and counted).
    """
    corr_model = (mean_mode_correction(model) if model is not None
                  else identity_correction()).curves()
    corr_base = (mean_mode_correction(baseline) if baseline is not None
                 else identity_correction()).curves()
    abs_err = {"model": {"cas": [], "rocd": []}, "baseline": {"cas": [], "rocd": []}}
    excluded = 0
    for run in runs:
        if run.reference.t[-1] - run.reference.t[0] < 60.0:
            excluded += 1
            continue
        for tag, corr in (("model", corr_model), ("baseline", corr_base)):
            pred = _rollout_like(run, corr, coeffs, wind)
            abs_err[tag]["cas"].append(np.abs(pred.cas - run.reference.cas))
            abs_err[tag]["rocd"].append(np.abs(pred.rocd - run.reference.rocd))
    out = {"excluded_runs": excluded, "n_runs": len(runs) - excluded}
    for q in ("cas", "rocd"):
        mae_m = float(np.mean(np.concatenate(abs_err["model"][q])))
        mae_b = float(np.mean(np.concatenate(abs_err["baseline"][q])))
        out[q] = {
            "mae_model": mae_m,
            "mae_baseline": mae_b,
            "ratio": mae_m / mae_b if mae_b > 0 else 1.0,
        }
    return out


# ------------------------------------------------- replication experiment

@dataclass
class ReplicationExercise:
    name: str
    build_world: object            # callable () -> World
    clearance_log: list            # (t_issue, callsign, Clearance)
    reference: dict                # callsign -> list of (t, lat, lon, fl)


def record_reference(world, clearance_log: list, callsigns: list[str]) -> dict:
    """Run a world under a clearance log and record 6 s reference positions,
    with the same issue timing the replication loop uses."""
    pending = sorted(clearance_log, key=lambda e: e[0])
    reference: dict[str, list] = {cs: [] for cs in callsigns}
    while not world.done():
        while pending and pending[0][0] <= world.sim_time + 1e-9:
            _, cs, clr = pending.pop(0)
            world.issue_clearance(cs, clr, issuer="replication")
        world.tick()
        for cs in callsigns:
            if cs in world.aircraft:
                ac = world.aircraft[cs]
                reference[cs].append((world.sim_time, ac.kin.lat, ac.kin.lon, ac.kin.fl))
    return reference


def replication_experiment(exercises: list[ReplicationExercise]) -> dict:
    """Re-simulate each exercise issuing the logged clearances at the logged
    sim times; report mean lateral/vertical errors against the reference."""
    rows = []
    invalid = []
    for ex in exercises:
        world = ex.build_world()
        pending = sorted(ex.clearance_log, key=lambda e: e[0])
        bad = [cs for _, cs, _ in pending
               if cs not in world.aircraft and
               not any(a.callsign == cs for _, a in world.pending_spawns)]
        if bad:
            invalid.append({"exercise": ex.name, "reason": f"unknown aircraft {sorted(set(bad))}"})
            continue
        lat_errs, fl_errs = [], []
        ref_idx = {cs: 0 for cs in ex.reference}
        while not world.done():
            while pending and pending[0][0] <= world.sim_time + 1e-9:
                _, cs, clr = pending.pop(0)
                world.issue_clearance(cs, clr, issuer="replication")
            world.tick()
            t = world.sim_time
            for cs, ref_rows in ex.reference.items():
                i = ref_idx[cs]
                while i < len(ref_rows) and ref_rows[i][0] < t - 1e-9:
                    i += 1
                ref_idx[cs] = i
                if i < len(ref_rows) and abs(ref_rows[i][0] - t) < 1e-6 and cs in world.aircraft:
                    ac = world.aircraft[cs]
                    _, rlat, rlon, rfl = ref_rows[i]
                    lat_errs.append(geo.great_circle_nm(ac.kin.lat, ac.kin.lon, rlat, rlon))
                    fl_errs.append(abs(ac.kin.fl - rfl))
        rows.append({
            "exercise": ex.name,
            "mean_lateral_nm": float(np.mean(lat_errs)) if lat_errs else float("nan"),
            "mean_vertical_fl": float(np.mean(fl_errs)) if fl_errs else float("nan"),
            "n_points": len(lat_errs),
        })
    passed = all(
        r["mean_lateral_nm"] < LATERAL_THRESHOLD_NM and
        r["mean_vertical_fl"] < VERTICAL_THRESHOLD_FL
        for r in rows
    ) and not invalid
    return {
        "exercises": rows,
        "invalid": invalid,
        "thresholds": {"lateral_nm": LATERAL_THRESHOLD_NM, "vertical_fl": VERTICAL_THRESHOLD_FL},
        "passed": passed,
    }


def replication_plot_data(report: dict) -> dict:
    """Scatter-plot table: one point per exercise plus the threshold lines."""
    return {
        "points": [
            {"exercise": r["exercise"], "x_lateral_nm": r["mean_lateral_nm"],
             "y_vertical_fl": r["mean_vertical_fl"]}
            for r in report["exercises"]
        ],
        "threshold_lateral_nm": report["thresholds"]["lateral_nm"],
        "threshold_vertical_fl": report["thresholds"]["vertical_fl"],
    }
