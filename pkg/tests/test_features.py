"""Feature extraction checked against independent oracles.

The pearson oracle below is a naive two-pass covariance implementation
kept deliberately separate from the library code: any algebraic
shortcut in the library must still agree with the textbook form.
"""

import math
import random

import pytest

from wificolo.features import FeatureVector, feature_vector, das_proximity, jaccard, pearson
from wificolo.scanlog import ApObservation, Scan


def make_scan(device_id, timestamp_s, readings):
    obs = [ApObservation(bssid=b, rssi_dbm=r) for b, r in readings.items()]
    return Scan.from_observations(device_id, timestamp_s, obs)


def random_bssid(rng):
    return ":".join(f"{rng.randrange(256):02x}" for _ in range(6))


def random_scan_pair(rng):
    pool = [random_bssid(rng) for _ in range(rng.randint(1, 40))]
    def draw():
        size = rng.randint(0, len(pool))
        picks = rng.sample(pool, size)
        return {b: rng.uniform(-120.0, 0.0) for b in picks}
    a = make_scan("a", 0.0, draw())
    b = make_scan("b", 0.0, draw())
    return a, b


# Oracles -------------------------------------------------------------------

def rssi_map(scan):
    return {b: obs.rssi_dbm for b, obs in scan.observations.items()}


def oracle_jaccard(a, b):
    sa, sb = set(a.observations), set(b.observations)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def oracle_pearson(a, b):
    ra, rb = rssi_map(a), rssi_map(b)
    shared = sorted(set(ra) & set(rb))
    if len(shared) < 2:
        return 0.0
    xs = [ra[k] for k in shared]
    ys = [rb[k] for k in shared]
    n = len(shared)
    mx = math.fsum(xs) / n
    my = math.fsum(ys) / n
    cov = math.fsum((x - mx) * (y - my) for x, y in zip(xs, ys))
    vx = math.fsum((x - mx) ** 2 for x in xs)
    vy = math.fsum((y - my) ** 2 for y in ys)
    if vx == 0.0 or vy == 0.0:
        return 0.0
    r = cov / math.sqrt(vx * vy)
    return max(-1.0, min(1.0, r))


def oracle_das(a, b):
    ra, rb = rssi_map(a), rssi_map(b)
    union = set(ra) | set(rb)
    if not union:
        return 0.0
    total = math.fsum(
        1.0 / (1.0 + abs(ra[k] - rb[k])) for k in set(ra) & set(rb)
    )
    return total / len(union)


# Randomized agreement ------------------------------------------------------

def test_jaccard_matches_set_arithmetic_on_random_scans():
    rng = random.Random(1001)
    for _ in range(10_000):
        a, b = random_scan_pair(rng)
        assert jaccard(a, b) == pytest.approx(oracle_jaccard(a, b), abs=1e-12)


def test_pearson_matches_two_pass_covariance_oracle():
    rng = random.Random(1002)
    for _ in range(10_000):
        a, b = random_scan_pair(rng)
        assert pearson(a, b) == pytest.approx(oracle_pearson(a, b), abs=1e-9)


def test_das_matches_direct_sum_and_never_exceeds_jaccard():
    rng = random.Random(1003)
    for _ in range(10_000):
        a, b = random_scan_pair(rng)
        got = das_proximity(a, b)
        assert got == pytest.approx(oracle_das(a, b), abs=1e-12)
        assert got <= jaccard(a, b) + 1e-12


# Hand-checked values -------------------------------------------------------

def test_jaccard_known_values():
    a = make_scan("a", 0.0, {"00:00:00:00:00:01": -50.0, "00:00:00:00:00:02": -60.0})
    b = make_scan("b", 0.0, {"00:00:00:00:00:02": -61.0, "00:00:00:00:00:03": -70.0})
    # one shared AP out of three distinct
    assert jaccard(a, b) == pytest.approx(1.0 / 3.0)


def test_jaccard_identical_sets_is_one():
    readings = {"00:00:00:00:00:01": -50.0, "00:00:00:00:00:02": -60.0}
    a = make_scan("a", 0.0, readings)
    b = make_scan("b", 0.0, {k: v - 5.0 for k, v in readings.items()})
    assert jaccard(a, b) == 1.0


def test_jaccard_disjoint_sets_is_zero():
    a = make_scan("a", 0.0, {"00:00:00:00:00:01": -50.0})
    b = make_scan("b", 0.0, {"00:00:00:00:00:02": -60.0})
    assert jaccard(a, b) == 0.0


def test_pearson_perfect_positive_correlation():
    a = make_scan("a", 0.0, {
        "00:00:00:00:00:01": -50.0,
        "00:00:00:00:00:02": -60.0,
        "00:00:00:00:00:03": -70.0,
    })
    b = make_scan("b", 0.0, {
        "00:00:00:00:00:01": -55.0,
        "00:00:00:00:00:02": -65.0,
        "00:00:00:00:00:03": -75.0,
    })
    assert pearson(a, b) == pytest.approx(1.0)


def test_pearson_perfect_negative_correlation():
    a = make_scan("a", 0.0, {
        "00:00:00:00:00:01": -50.0,
        "00:00:00:00:00:02": -60.0,
    })
    b = make_scan("b", 0.0, {
        "00:00:00:00:00:01": -80.0,
        "00:00:00:00:00:02": -70.0,
    })
    assert pearson(a, b) == pytest.approx(-1.0)


def test_pearson_fewer_than_two_shared_aps_is_zero():
    a = make_scan("a", 0.0, {"00:00:00:00:00:01": -50.0, "00:00:00:00:00:02": -55.0})
    b = make_scan("b", 0.0, {"00:00:00:00:00:01": -60.0, "00:00:00:00:00:03": -65.0})
    assert pearson(a, b) == 0.0
    empty = make_scan("b", 0.0, {})
    assert pearson(a, empty) == 0.0


def test_pearson_zero_variance_side_is_zero():
    a = make_scan("a", 0.0, {
        "00:00:00:00:00:01": -50.0,
        "00:00:00:00:00:02": -50.0,
        "00:00:00:00:00:03": -50.0,
    })
    b = make_scan("b", 0.0, {
        "00:00:00:00:00:01": -40.0,
        "00:00:00:00:00:02": -60.0,
        "00:00:00:00:00:03": -55.0,
    })
    assert pearson(a, b) == 0.0


def test_pearson_clamped_to_unit_interval():
    rng = random.Random(1004)
    for _ in range(2_000):
        a, b = random_scan_pair(rng)
        assert -1.0 <= pearson(a, b) <= 1.0


def test_das_known_value():
    a = make_scan("a", 0.0, {
        "00:00:00:00:00:01": -50.0,
        "00:00:00:00:00:02": -60.0,
        "00:00:00:00:00:03": -70.0,
    })
    b = make_scan("b", 0.0, {
        "00:00:00:00:00:01": -50.0,   # delta 0  -> 1
        "00:00:00:00:00:02": -64.0,   # delta 4  -> 1/5
        "00:00:00:00:00:04": -80.0,
    })
    # union has 4 APs, shared contribute 1 + 1/5
    assert das_proximity(a, b) == pytest.approx((1.0 + 0.2) / 4.0)


def test_das_equals_jaccard_when_all_shared_rssi_match():
    readings = {"00:00:00:00:00:01": -50.0, "00:00:00:00:00:02": -60.0}
    a = make_scan("a", 0.0, readings)
    b = make_scan("b", 0.0, dict(readings))
    assert das_proximity(a, b) == pytest.approx(jaccard(a, b))


def test_empty_scans_give_zero_features():
    a = make_scan("a", 0.0, {})
    b = make_scan("b", 0.0, {})
    assert jaccard(a, b) == 0.0
    assert pearson(a, b) == 0.0
    assert das_proximity(a, b) == 0.0


def test_feature_vector_bundles_all_three_features():
    rng = random.Random(1005)
    for _ in range(200):
        a, b = random_scan_pair(rng)
        vec = feature_vector(a, b)
        assert isinstance(vec, FeatureVector)
        assert vec.jaccard == pytest.approx(jaccard(a, b))
        assert vec.pearson == pytest.approx(pearson(a, b))
        assert vec.das == pytest.approx(das_proximity(a, b))


def test_features_are_symmetric():
    rng = random.Random(1006)
    for _ in range(2_000):
        a, b = random_scan_pair(rng)
        assert jaccard(a, b) == pytest.approx(jaccard(b, a), abs=1e-12)
        assert pearson(a, b) == pytest.approx(pearson(b, a), abs=1e-9)
        assert das_proximity(a, b) == pytest.approx(das_proximity(b, a), abs=1e-12)
