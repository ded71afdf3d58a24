"""The generative correction model: fitting, sampling, and persistence.

A ``TrajectoryModel`` corrects the base performance tables for one
(aircraft type, phase) pair: an additive CAS delta plus multiplicative
thrust and drag factors, each a curve over flight level. Per-quantity
curves get an FPCA basis; the concatenated score vectors get one joint
Gaussian mixture so cross-correlations between speed and force corrections
survive. Cruise speeds come from an empirical PMF of observed
(CAS, Mach) pairs.

Fitting recovers the correction curves from observed profiles by inverting
the energy balance: the observed energy rate fixes the net force along the
path, and the residual against the base tables is attributed to the
phase-dominant force (thrust in climb, drag in descent) while the other
multiplier stays at one. The per-sample inversion is exact in the sense
that replaying a recovered curve reproduces the observed energy rate.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..atmosphere import KAPPA, R_GAS, cas_to_tas_array, isa_density, isa_temperature
from ..units import FL_TO_M, G0, KT_TO_MS
from .coefficients import PerfCoefficients
from .fpca import FitError, FunctionalBasis, fit_fpca
from .gmm import ScoreGMM, fit_gmm
from .profiles import FlightProfile, _monotone_in_fl
from .tem import CAS_CEIL, CAS_FLOOR, CorrectionCurves

MULT_FLOOR, MULT_CEIL = 0.2, 3.0
MODEL_FORMAT_VERSION = 1
MIN_CORPUS = 30
MIN_FL_SPAN = 50.0
ACCEL_MASK_MS2 = 0.3   # speed-transient cutoff for the energy inversion
MACH_BAND = 0.008      # |observed mach - schedule mach| marking mach-governed flight

QUANTITIES = ("cas", "thrust", "drag")


@dataclass(frozen=True)
class CorrectionSample:
    """One realization of the three correction curves."""

    fl_grid: np.ndarray
    delta_cas: np.ndarray
    thrust_mult: np.ndarray
    drag_mult: np.ndarray
    seed_tag: int = -1

    def __post_init__(self):
        for name in ("fl_grid", "delta_cas", "thrust_mult", "drag_mult"):
            object.__setattr__(self, name, np.asarray(getattr(self, name), dtype=float))

    def curves(self) -> CorrectionCurves:
        return CorrectionCurves(self.fl_grid, self.delta_cas, self.thrust_mult, self.drag_mult)


def identity_correction() -> CorrectionSample:
    """Uncorrected dynamics: zero CAS delta, unit force multipliers."""
    grid = np.array([0.0, 600.0])
    return CorrectionSample(grid, np.zeros(2), np.ones(2), np.ones(2), seed_tag=-1)


@dataclass(frozen=True)
class TrajectoryModel:
    aircraft_type: str
    phase: str                       # "climb" | "descent"
    bases: dict[str, FunctionalBasis]
    score_gmm: ScoreGMM
    cruise_pmf: tuple[tuple[tuple[float, float], float], ...]  # ((cas, mach), mass)
    base_cas_on_grid: np.ndarray
    fallback_cruise: tuple[float, float]
    corpus_size: int = 0
    fit_seed: int = 0

    def __post_init__(self):
        if self.phase not in ("climb", "descent"):
            raise FitError(f"phase must be climb or descent, got {self.phase!r}")
        if set(self.bases) != set(QUANTITIES):
            raise FitError(f"bases must cover {QUANTITIES}")
        grid = self.bases["cas"].fl_grid
        for q in QUANTITIES:
            if not np.array_equal(self.bases[q].fl_grid, grid):
                raise FitError("all bases must share one fl_grid")
        dim = sum(self.bases[q].n_components for q in QUANTITIES)
        if self.score_gmm.dim != dim:
            raise FitError(f"GMM dimension {self.score_gmm.dim} != total components {dim}")
        if self.cruise_pmf:
            total = sum(wt for _, wt in self.cruise_pmf)
            if abs(total - 1.0) > 1e-9:
                raise FitError("cruise PMF masses must sum to 1")
        object.__setattr__(self, "base_cas_on_grid", np.asarray(self.base_cas_on_grid, dtype=float))

    @property
    def fl_grid(self) -> np.ndarray:
        return self.bases["cas"].fl_grid

    def split_scores(self, scores: np.ndarray) -> dict[str, np.ndarray]:
        out = {}
        i = 0
        for q in QUANTITIES:
            k = self.bases[q].n_components
            out[q] = scores[..., i:i + k]
            i += k
        return out

    def correction_from_scores(self, scores: np.ndarray, seed_tag: int = -1) -> CorrectionSample:
        per_q = self.split_scores(np.asarray(scores, dtype=float))
        dcas = self.bases["cas"].reconstruct(per_q["cas"])
        tm = self.bases["thrust"].reconstruct(per_q["thrust"])
        dm = self.bases["drag"].reconstruct(per_q["drag"])
        dcas = np.clip(dcas, CAS_FLOOR - self.base_cas_on_grid, CAS_CEIL - self.base_cas_on_grid)
        tm = np.clip(tm, MULT_FLOOR, MULT_CEIL)
        dm = np.clip(dm, MULT_FLOOR, MULT_CEIL)
        return CorrectionSample(self.fl_grid, dcas, tm, dm, seed_tag=seed_tag)


def sample_correction(model: TrajectoryModel, rng_seed: int) -> CorrectionSample:
    """Seeded draw from the score mixture, reconstructed and clipped."""
    rng = np.random.default_rng(rng_seed)
    scores = model.score_gmm.sample(rng, 1)[0]
    return model.correction_from_scores(scores, seed_tag=rng_seed)


def mean_mode_correction(model: TrajectoryModel) -> CorrectionSample:
    """Deterministic correction at the mixture mean score vector."""
    return model.correction_from_scores(model.score_gmm.mixture_mean(), seed_tag=-1)


def sample_cruise_speed(model: TrajectoryModel, rng_seed: int,
                        warnings: list | None = None) -> tuple[float, float]:
    """Categorical draw of a historic (cruise CAS, cruise Mach) pair."""
    if not model.cruise_pmf:
        if warnings is not None:
            warnings.append("empty-cruise-pmf")
        return model.fallback_cruise
    rng = np.random.default_rng(rng_seed)
    weights = np.array([wt for _, wt in model.cruise_pmf])
    idx = int(rng.choice(len(weights), p=weights / weights.sum()))
    return model.cruise_pmf[idx][0]


# ---------------------------------------------------------------- fitting

def recover_correction_curves(profile: FlightProfile, phase: str,
                              coeffs: PerfCoefficients, fl_grid: np.ndarray) -> np.ndarray:
    """(3, n_grid) stack of delta-CAS, thrust-mult, drag-mult for one profile.

    The net along-path force is observed from the energy rate; in climb the
    residual is attributed to thrust (drag multiplier one), in descent to
    drag (thrust multiplier one).
    """
    t, fl, cas = profile.t, profile.fl, profile.cas
    if len(t) < 5:
        raise FitError("profile too short to differentiate")
    v = cas_to_tas_array(cas, fl) * KT_TO_MS
    hdot = np.gradient(fl * FL_TO_M, t)
    vdot = np.gradient(v, t)
    mass = coeffs.mass_ref
    force_obs = mass * (G0 * hdot + v * vdot) / v

    # forced-acceleration segments (speed transients) follow a different
    # energy split than the schedule relations invert; drop them
    steady = np.abs(vdot) <= ACCEL_MASK_MS2
    if steady.sum() >= 10:
        t, fl, cas = t[steady], fl[steady], cas[steady]
        v, force_obs = v[steady], force_obs[steady]

    h = fl * FL_TO_M
    rho = np.array([isa_density(x) for x in h])
    q = 0.5 * rho * v * v * coeffs.wing_area
    cl = mass * G0 / q
    drag = q * (coeffs.c_d0 + coeffs.c_d2 * cl * cl)
    t_climb = np.array([coeffs.climb_thrust(x) for x in h])

    if phase == "climb":
        tm = (force_obs + drag) / t_climb
        dm = np.ones_like(tm)
    else:
        dm = (coeffs.descent_thrust_factor * t_climb - force_obs) / drag
        tm = np.ones_like(dm)
    tm = np.clip(tm, MULT_FLOOR, MULT_CEIL)
    dm = np.clip(dm, MULT_FLOOR, MULT_CEIL)
    base = np.array([coeffs.base_cas(x) for x in fl])
    dcas = np.clip(cas - base, CAS_FLOOR - base, CAS_CEIL - base)

    # above the crossover the mach leg flies the aircraft and the observed
    # CAS is a mach artifact; learn the delta from the CAS-governed samples
    # only and extend it constantly into the mach band, so replaying the
    # curve reproduces the original regime boundary
    t_amb = np.array([isa_temperature(x) for x in h])
    mach_obs = v / np.sqrt(KAPPA * R_GAS * t_amb)
    cas_governed = np.abs(mach_obs - coeffs.base_mach) > MACH_BAND
    if cas_governed.sum() < 5:
        cas_governed = np.ones_like(cas_governed, dtype=bool)

    descending = phase == "descent"
    out = np.empty((3, len(fl_grid)))
    for row, series, sel in ((0, dcas, cas_governed), (1, tm, None), (2, dm, None)):
        f_src = fl[sel] if sel is not None else fl
        v_src = series[sel] if sel is not None else series
        f, vals = _monotone_in_fl(f_src, v_src, descending)
        # masking may shave the profile ends; small shortfalls clamp, larger
        # ones mean the profile genuinely misses the grid
        if row != 0 and (f[0] > fl_grid[0] + 10.0 or f[-1] < fl_grid[-1] - 10.0):
            raise FitError(
                f"profile FL span [{f[0]:.1f}, {f[-1]:.1f}] does not cover the grid"
            )
        out[row] = np.interp(fl_grid, f, vals)
    return out


def default_fl_grid(corpus: list[FlightProfile], n_grid: int = 41) -> np.ndarray:
    lo = max(float(p.fl.min()) for p in corpus)
    hi = min(float(p.fl.max()) for p in corpus)
    lo, hi = lo + 2.0, hi - 2.0   # stay clear of capture kinks at the ends
    if hi - lo < MIN_FL_SPAN * 0.5:
        raise FitError(f"common FL span [{lo:.0f}, {hi:.0f}] too small to fit")
    return np.linspace(lo, hi, n_grid)


def fit_model(corpus: list[FlightProfile], aircraft_type: str, phase: str,
              k_components: int | None, gmm_components: int, seed: int,
              coeffs: PerfCoefficients, fl_grid: np.ndarray | None = None,
              n_grid: int = 41) -> TrajectoryModel:
    """Fit the generative correction model on a corpus of observed profiles."""
    if len(corpus) < MIN_CORPUS:
        raise FitError(f"corpus of {len(corpus)} profiles; need >= {MIN_CORPUS}")
    for i, p in enumerate(corpus):
        if p.fl_span() < MIN_FL_SPAN:
            raise FitError(f"trajectory {i} spans {p.fl_span():.1f} FL; need >= {MIN_FL_SPAN}")
    if fl_grid is None:
        fl_grid = default_fl_grid(corpus, n_grid)
    fl_grid = np.asarray(fl_grid, dtype=float)

    stacks = np.stack([
        recover_correction_curves(p, phase, coeffs, fl_grid) for p in corpus
    ])  # (N, 3, n_grid)

    bases: dict[str, FunctionalBasis] = {}
    score_blocks = []
    for qi, q in enumerate(QUANTITIES):
        basis = fit_fpca(fl_grid, stacks[:, qi, :], k_components)
        bases[q] = basis
        score_blocks.append(basis.project(stacks[:, qi, :]))
    scores = np.hstack(score_blocks)
    gmm = fit_gmm(scores, gmm_components, seed)

    pairs: dict[tuple[float, float], int] = {}
    for p in corpus:
        if p.cruise_cas is not None and p.cruise_mach is not None:
            key = (round(p.cruise_cas), round(p.cruise_mach, 2))
            pairs[key] = pairs.get(key, 0) + 1
    total = sum(pairs.values())
    pmf = tuple(sorted(((k, v / total) for k, v in pairs.items()))) if total else ()

    return TrajectoryModel(
        aircraft_type=aircraft_type,
        phase=phase,
        bases=bases,
        score_gmm=gmm,
        cruise_pmf=pmf,
        base_cas_on_grid=np.array([coeffs.base_cas(fl) for fl in fl_grid]),
        fallback_cruise=(coeffs.base_cas(350.0), coeffs.base_mach),
        corpus_size=len(corpus),
        fit_seed=seed,
    )


# ------------------------------------------------------------- persistence

def save_model(model: TrajectoryModel, path: str | Path) -> None:
    doc = {
        "format_version": MODEL_FORMAT_VERSION,
        "aircraft_type": model.aircraft_type,
        "phase": model.phase,
        "fl_grid": model.fl_grid.tolist(),
        "bases": {
            q: {
                "mean_curve": model.bases[q].mean_curve.tolist(),
                "eigenfunctions": model.bases[q].eigenfunctions.tolist(),
                "eigenvalues": model.bases[q].eigenvalues.tolist(),
            }
            for q in QUANTITIES
        },
        "score_gmm": {
            "weights": model.score_gmm.weights.tolist(),
            "means": model.score_gmm.means.tolist(),
            "covariances": model.score_gmm.covariances.tolist(),
        },
        "cruise_pmf": [[list(pair), wt] for pair, wt in model.cruise_pmf],
        "base_cas_on_grid": model.base_cas_on_grid.tolist(),
        "fallback_cruise": list(model.fallback_cruise),
        "fit_meta": {"corpus_size": model.corpus_size, "seed": model.fit_seed},
    }
    Path(path).write_text(json.dumps(doc, indent=1) + "\n")


def load_model(path: str | Path) -> TrajectoryModel:
    doc = json.loads(Path(path).read_text())
    if doc.get("format_version") != MODEL_FORMAT_VERSION:
        raise FitError(f"unsupported model format version {doc.get('format_version')}")
    grid = np.array(doc["fl_grid"])
    bases = {
        q: FunctionalBasis(
            fl_grid=grid,
            mean_curve=np.array(doc["bases"][q]["mean_curve"]),
            eigenfunctions=np.array(doc["bases"][q]["eigenfunctions"]),
            eigenvalues=np.array(doc["bases"][q]["eigenvalues"]),
        )
        for q in QUANTITIES
    }
    gmm = ScoreGMM(
        weights=np.array(doc["score_gmm"]["weights"]),
        means=np.array(doc["score_gmm"]["means"]),
        covariances=np.array(doc["score_gmm"]["covariances"]),
    )
    return TrajectoryModel(
        aircraft_type=doc["aircraft_type"],
        phase=doc["phase"],
        bases=bases,
        score_gmm=gmm,
        cruise_pmf=tuple((tuple(pair), wt) for pair, wt in doc["cruise_pmf"]),
        base_cas_on_grid=np.array(doc["base_cas_on_grid"]),
        fallback_cruise=tuple(doc["fallback_cruise"]),
        corpus_size=doc["fit_meta"]["corpus_size"],
        fit_seed=doc["fit_meta"]["seed"],
    )
