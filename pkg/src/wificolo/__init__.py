"""WiFi colocation toolkit.

Infers physical proximity between devices from pairwise WiFi scan
similarity, calibrates decision thresholds from a walk-away-from-your-AP
experiment, simulates the hotspot/receiver duty cycle used when no access
points are in range, and quantifies the entropy of MAC-based colocation
records.
"""

from wificolo.scanlog import ApObservation, Scan, ScanLog, parse_scan_log, write_scan_log
from wificolo.features import FeatureVector, feature_vector
from wificolo.classifier import (
    CalibrationCurve,
    EvalReport,
    ThresholdProfile,
    calibrate,
    classify,
    evaluate,
    sweep_thresholds,
    threshold_profile,
)

__version__ = "0.1.0"

__all__ = [
    "ApObservation",
    "Scan",
    "ScanLog",
    "parse_scan_log",
    "write_scan_log",
    "FeatureVector",
    "feature_vector",
    "CalibrationCurve",
    "ThresholdProfile",
    "EvalReport",
    "calibrate",
    "threshold_profile",
    "classify",
    "evaluate",
    "sweep_thresholds",
    "__version__",
]
