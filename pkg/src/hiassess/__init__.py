"""Grade health-index predictions against an ensemble of prognosed trajectories."""

from .assessment import AssessmentReport, assess, assess_all, assessment_score, threshold_quantile
from .calibration import CalibrationSpec, CalibrationTable, run_calibration
from .degradation import REFERENCE_PARAMS, DegradationParams, derive_coefficients, simulate_ensemble, simulate_trajectory
from .estimation import WindowModel, fit_window, simulate_from_window_model
from .metrics import ALL_METRICS, MetricKind
from .patterns import empirical_quantile
from .series import PrognosisEnsemble, Trajectory

__version__ = "0.1.0"

__all__ = [
    "ALL_METRICS",
    "AssessmentReport",
    "CalibrationSpec",
    "CalibrationTable",
    "DegradationParams",
    "MetricKind",
    "REFERENCE_PARAMS",
    "PrognosisEnsemble",
    "Trajectory",
    "WindowModel",
    "assess",
    "assess_all",
    "assessment_score",
    "derive_coefficients",
    "empirical_quantile",
    "fit_window",
    "run_calibration",
    "simulate_ensemble",
    "simulate_from_window_model",
    "simulate_trajectory",
    "threshold_quantile",
]
