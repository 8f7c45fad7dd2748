from .networks import NETWORKS, SET_LABELS, SimSpec, generate, simulate_var1, spectral_radius, truth_matrix
from .montecarlo import (
    REFERENCE_COUNTS,
    REFERENCE_RUNS,
    CalibrationRow,
    DetectionMatrix,
    calibration_frame,
    calibration_report,
    run_monte_carlo,
    truth_frame,
)

__all__ = [
    "NETWORKS",
    "SET_LABELS",
    "SimSpec",
    "generate",
    "simulate_var1",
    "spectral_radius",
    "truth_matrix",
    "REFERENCE_COUNTS",
    "REFERENCE_RUNS",
    "CalibrationRow",
    "DetectionMatrix",
    "calibration_frame",
    "calibration_report",
    "run_monte_carlo",
    "truth_frame",
]
