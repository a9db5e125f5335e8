"""Pairwise proximity features between two WiFi scans.

Three similarity signals over the scans' AP sets and signal strengths:
set overlap (Jaccard), signal-strength correlation over shared APs
(Pearson), and an RSSI-agreement-weighted overlap (Das proximity). All
three are symmetric and total: degenerate inputs (empty scans, fewer than
two shared APs, zero-variance RSSI vectors) map to 0 rather than raising,
so classification stays defined on every scan pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from wificolo.scanlog import Scan


@dataclass(frozen=True)
class FeatureVector:
    """The feature triple for one scan pair, plus the AP counts behind it."""

    jaccard: float
    pearson: float
    das: float
    shared_ap_count: int
    union_ap_count: int


def jaccard(a: Scan, b: Scan) -> float:
    """Shared over union AP count; 0.0 when both scans are empty."""
    sa, sb = a.bssids, b.bssids
    union = len(sa | sb)
    if union == 0:
        return 0.0
    return len(sa & sb) / union


def pearson(a: Scan, b: Scan) -> float:
    """Sample correlation of RSSI pairs over shared APs.

    Returns 0.0 when fewer than 2 APs are shared or either RSSI vector has
    zero variance (correlation undefined, and no evidence of proximity).
    """
    shared = sorted(a.bssids & b.bssids)
    if len(shared) < 2:
        return 0.0
    ra = [a.observations[x].rssi_dbm for x in shared]
    rb = [b.observations[x].rssi_dbm for x in shared]
    n = len(shared)
    mean_a = math.fsum(ra) / n
    mean_b = math.fsum(rb) / n
    cov = math.fsum((x - mean_a) * (y - mean_b) for x, y in zip(ra, rb))
    var_a = math.fsum((x - mean_a) ** 2 for x in ra)
    var_b = math.fsum((y - mean_b) ** 2 for y in rb)
    if var_a == 0.0 or var_b == 0.0:
        return 0.0
    r = cov / math.sqrt(var_a * var_b)
    # guard float overshoot so the contract range [-1, 1] is exact
    return max(-1.0, min(1.0, r))


def das_proximity(a: Scan, b: Scan) -> float:
    """RSSI-agreement-weighted overlap.

    Each shared AP contributes 1 / (1 + |rssi_a - rssi_b|) (dB difference),
    normalized by the union AP count; 0.0 when the union is empty. Weights
    are at most 1, so the value never exceeds the Jaccard similarity.
    """
    sa, sb = a.bssids, b.bssids
    union = len(sa | sb)
    if union == 0:
        return 0.0
    total = math.fsum(
        1.0 / (1.0 + abs(a.observations[x].rssi_dbm - b.observations[x].rssi_dbm))
        for x in sa & sb
    )
    return total / union


def feature_vector(a: Scan, b: Scan) -> FeatureVector:
    """Bundle the three features; components equal the individual functions."""
    sa, sb = a.bssids, b.bssids
    return FeatureVector(
        jaccard=jaccard(a, b),
        pearson=pearson(a, b),
        das=das_proximity(a, b),
        shared_ap_count=len(sa & sb),
        union_ap_count=len(sa | sb),
    )
