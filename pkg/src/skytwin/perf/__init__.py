"""Probabilistic physics-informed trajectory engine.

A total-energy point-mass integrator whose speed, thrust, and drag terms are
perturbed by a learned correction model (functional PCA over per-flight-level
curves, Gaussian mixture over the component scores), with cruise speeds drawn
from an empirical PMF.
"""

from .coefficients import PerfCoefficients, load_coefficients, bundled_types
from .profiles import FlightProfile
from .fpca import FunctionalBasis, fit_fpca
from .gmm import ScoreGMM, fit_gmm
from .model import (
    CorrectionSample,
    TrajectoryModel,
    fit_model,
    identity_correction,
    load_model,
    mean_mode_correction,
    sample_correction,
    sample_cruise_speed,
    save_model,
)
from .tem import Guidance, IntegrationFault, Kinematics, predict_profile, tem_step

__all__ = [
    "PerfCoefficients",
    "load_coefficients",
    "bundled_types",
    "FlightProfile",
    "FunctionalBasis",
    "fit_fpca",
    "ScoreGMM",
    "fit_gmm",
    "CorrectionSample",
    "TrajectoryModel",
    "fit_model",
    "identity_correction",
    "mean_mode_correction",
    "sample_correction",
    "sample_cruise_speed",
    "save_model",
    "load_model",
    "Guidance",
    "Kinematics",
    "IntegrationFault",
    "tem_step",
    "predict_profile",
]
