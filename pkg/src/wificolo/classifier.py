"""Threshold calibration and the three-feature OR classifier.

Calibration compares each subject's scans against that subject's reference
scan (taken right next to their AP, ground-truth distance 0) and averages
the resulting feature vectors per distance across subjects. A
ThresholdProfile is the calibration curve read at one distance k; the
classifier votes "colocated" when any feature strictly exceeds its profile
value. Evaluation labels a pair positive when its true distance is at most
k and reports standard binary-classification metrics.
"""

from __future__ import annotations

import bisect
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

from wificolo.features import FeatureVector, feature_vector
from wificolo.scanlog import Scan, ScanLog

CURVE_CSV_HEADER = "distance_ft,jaccard,pearson,das"
REPORT_CSV_HEADER = "k_ft,tp,fp,tn,fn,precision,recall,f_score"

# F-score reported at the 10 ft threshold on live six-subject data; a
# synthetic corpus is under no obligation to match it.
REFERENCE_F_SCORE_10FT = 0.65


@dataclass(frozen=True)
class CurvePoint:
    """Mean feature values at one calibration distance."""

    jaccard: float
    pearson: float
    das: float


@dataclass(frozen=True)
class CalibrationCurve:
    """Per-distance mean features, averaged over every contributing scan."""

    points: dict[float, CurvePoint]
    subject_count: int
    scans_per_distance: dict[float, int]

    def distances(self) -> list[float]:
        return sorted(self.points)


@dataclass(frozen=True)
class ThresholdProfile:
    """Decision boundary: the calibration curve evaluated at distance k_ft."""

    k_ft: float
    avg_jaccard: float
    avg_pearson: float
    avg_das: float


@dataclass(frozen=True)
class EvalReport:
    """Confusion counts and derived metrics at one distance threshold."""

    k_ft: float
    true_pos: int
    false_pos: int
    true_neg: int
    false_neg: int
    precision: float
    recall: float
    f_score: float

    @classmethod
    def from_counts(cls, k_ft: float, tp: int, fp: int, tn: int, fn: int) -> "EvalReport":
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f_score = (
            2.0 * precision * recall / (precision + recall) if precision + recall else 0.0
        )
        return cls(k_ft, tp, fp, tn, fn, precision, recall, f_score)


def _subject_series(log: ScanLog) -> dict[str, tuple[Scan, list[tuple[float, Scan]]]]:
    """Group a calibration-shaped log by device: (reference scan, distance scans).

    Every scan must carry ground_truth_distance_ft; every device must have
    exactly one reference scan at distance 0 and at least one scan beyond it.
    """
    if not log.scans:
        raise ValueError("empty scan log")
    by_device: dict[str, list[Scan]] = {}
    for scan in log.scans:
        by_device.setdefault(scan.device_id, []).append(scan)

    series: dict[str, tuple[Scan, list[tuple[float, Scan]]]] = {}
    for device, scans in by_device.items():
        references = []
        distance_scans = []
        for scan in scans:
            d = scan.ground_truth_distance_ft
            if d is None:
                raise ValueError(
                    f"device {device}: scan at t={scan.timestamp_s:g} lacks "
                    "ground_truth_distance_ft"
                )
            if d == 0:
                references.append(scan)
            else:
                distance_scans.append((d, scan))
        if not references:
            raise ValueError(f"device {device}: no reference scan at distance 0")
        if len(references) > 1:
            raise ValueError(
                f"device {device}: {len(references)} reference scans at distance 0"
            )
        if not distance_scans:
            raise ValueError(f"device {device}: no scans at distance > 0")
        series[device] = (references[0], distance_scans)
    return series


def calibrate(log: ScanLog) -> CalibrationCurve:
    """Average per-distance features of (reference, scan) pairs across subjects.

    Distances present for only some subjects are averaged over the subjects
    that have them.
    """
    series = _subject_series(log)
    sums: dict[float, list[float]] = {}
    counts: dict[float, int] = {}
    for device in sorted(series):
        reference, distance_scans = series[device]
        for d, scan in distance_scans:
            fv = feature_vector(reference, scan)
            acc = sums.setdefault(d, [0.0, 0.0, 0.0])
            acc[0] += fv.jaccard
            acc[1] += fv.pearson
            acc[2] += fv.das
            counts[d] = counts.get(d, 0) + 1
    points = {
        d: CurvePoint(acc[0] / counts[d], acc[1] / counts[d], acc[2] / counts[d])
        for d, acc in sums.items()
    }
    return CalibrationCurve(points=points, subject_count=len(series), scans_per_distance=counts)


def threshold_profile(curve: CalibrationCurve, k_ft: float) -> ThresholdProfile:
    """Read the curve at distance k_ft.

    Exact keys are returned as-is; k between keys is linearly interpolated;
    k beyond the largest key clamps to that key's value. k below the
    smallest key is an error (nothing to anchor the interpolation).
    """
    if not curve.points:
        raise ValueError("empty calibration curve")
    distances = sorted(curve.points)
    if k_ft < distances[0]:
        raise ValueError(
            f"threshold {k_ft:g} ft below smallest calibrated distance {distances[0]:g} ft"
        )
    if k_ft >= distances[-1]:
        p = curve.points[distances[-1]]
        return ThresholdProfile(k_ft, p.jaccard, p.pearson, p.das)
    i = bisect.bisect_left(distances, k_ft)
    if distances[i] == k_ft:
        p = curve.points[k_ft]
        return ThresholdProfile(k_ft, p.jaccard, p.pearson, p.das)
    lo, hi = distances[i - 1], distances[i]
    t = (k_ft - lo) / (hi - lo)
    p_lo, p_hi = curve.points[lo], curve.points[hi]
    return ThresholdProfile(
        k_ft,
        p_lo.jaccard + (p_hi.jaccard - p_lo.jaccard) * t,
        p_lo.pearson + (p_hi.pearson - p_lo.pearson) * t,
        p_lo.das + (p_hi.das - p_lo.das) * t,
    )


def classify(fv: FeatureVector, profile: ThresholdProfile) -> bool:
    """True iff any feature strictly exceeds its profile value; ties are negative."""
    return (
        fv.jaccard > profile.avg_jaccard
        or fv.pearson > profile.avg_pearson
        or fv.das > profile.avg_das
    )


def evaluate(log: ScanLog, profile: ThresholdProfile) -> EvalReport:
    """Score the classifier on every (reference, distance scan) pair.

    Ground truth is positive iff the scan's distance is at most profile.k_ft.
    The d=0 reference scan anchors each pair and is not itself evaluated.
    """
    series = _subject_series(log)
    tp = fp = tn = fn = 0
    for device in sorted(series):
        reference, distance_scans = series[device]
        for d, scan in distance_scans:
            predicted = classify(feature_vector(reference, scan), profile)
            actual = d <= profile.k_ft
            if predicted and actual:
                tp += 1
            elif predicted and not actual:
                fp += 1
            elif not predicted and actual:
                fn += 1
            else:
                tn += 1
    return EvalReport.from_counts(profile.k_ft, tp, fp, tn, fn)


def sweep_thresholds(
    log: ScanLog,
    curve: CalibrationCurve,
    ks: Sequence[float],
    workers: int = 1,
) -> list[EvalReport]:
    """One EvalReport per threshold, in input order.

    Evaluations are independent, so `workers > 1` may run them in a thread
    pool; results are identical to the sequential order either way.
    """
    if not ks:
        raise ValueError("empty threshold list")
    profiles = [threshold_profile(curve, k) for k in ks]
    if workers <= 1:
        return [evaluate(log, p) for p in profiles]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda p: evaluate(log, p), profiles))


def curve_to_csv(curve: CalibrationCurve) -> str:
    """CSV rows per distance, ascending; header is fixed for plotting tools."""
    lines = [CURVE_CSV_HEADER]
    for d in curve.distances():
        p = curve.points[d]
        lines.append(f"{d},{p.jaccard},{p.pearson},{p.das}")
    return "\n".join(lines) + "\n"


def curve_from_csv(text: str) -> CalibrationCurve:
    """Parse a curve CSV back into a CalibrationCurve.

    Subject and per-distance scan counts are not part of the CSV, so they
    come back empty; the points are all a threshold sweep needs.
    """
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != CURVE_CSV_HEADER:
        raise ValueError(f"bad curve CSV header: expected {CURVE_CSV_HEADER!r}")
    points = {}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 4:
            raise ValueError(f"bad curve CSV row: {ln!r}")
        d, j, p, das = (float(x) for x in parts)
        points[d] = CurvePoint(j, p, das)
    if not points:
        raise ValueError("curve CSV has no data rows")
    return CalibrationCurve(points=points, subject_count=0, scans_per_distance={})


def reports_to_csv(reports: Sequence[EvalReport]) -> str:
    lines = [REPORT_CSV_HEADER]
    for r in reports:
        lines.append(
            f"{r.k_ft},{r.true_pos},{r.false_pos},{r.true_neg},{r.false_neg},"
            f"{r.precision},{r.recall},{r.f_score}"
        )
    return "\n".join(lines) + "\n"
