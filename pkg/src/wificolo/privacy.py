"""Entropy bounds for colocation records built from AP MAC addresses.

A record of n BSSIDs is nominally 48*n bits, but an attacker with a
wardriving database (wigle-style) does much better: the first AP is one
dictionary lookup, and each further AP only ranges over the APs adjacent
to ones already placed. These functions quantify that argument with the
attack parameters kept explicit, so every number in a report can be
traced to its assumptions.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from wificolo.scanlog import Scan

MAC_BITS = 48

# illustrative defaults: a global wardriving database is on the order of
# 2^33 APs, and a dense urban block puts tens of APs within earshot
DEFAULT_DICTIONARY_SIZE = 2**33
DEFAULT_AVG_NEIGHBORS = 64
DEFAULT_GUESS_RATE = 1e9


@dataclass(frozen=True)
class PrivacyReport:
    num_aps: int
    naive_entropy_bits: float
    effective_entropy_bits: float
    dictionary_size: int
    brute_force_seconds: float
    assumptions: str

    def __post_init__(self):
        if self.num_aps < 0:
            raise ValueError(f"num_aps must be >= 0, got {self.num_aps}")
        if not 0.0 <= self.effective_entropy_bits <= self.naive_entropy_bits:
            raise ValueError(
                f"effective entropy {self.effective_entropy_bits} outside "
                f"[0, {self.naive_entropy_bits}]"
            )


def naive_entropy(num_aps: int) -> float:
    """Upper bound: every BSSID contributes its full 48 bits."""
    if num_aps < 0:
        raise ValueError(f"num_aps must be >= 0, got {num_aps}")
    return float(MAC_BITS * num_aps)


def effective_entropy(num_aps: int, dictionary_size: int, avg_neighbors: int) -> float:
    """Bits left under the clustering attack, clamped at the naive bound.

    First AP costs log2(dictionary_size); each additional AP is a choice
    among avg_neighbors nearby candidates, log2(avg_neighbors) bits.
    """
    if num_aps < 1:
        raise ValueError(f"num_aps must be >= 1, got {num_aps}")
    if dictionary_size < 1:
        raise ValueError(f"dictionary_size must be >= 1, got {dictionary_size}")
    if avg_neighbors < 1:
        raise ValueError(f"avg_neighbors must be >= 1, got {avg_neighbors}")
    attacked = math.log2(dictionary_size) + (num_aps - 1) * math.log2(avg_neighbors)
    return min(naive_entropy(num_aps), attacked)


def brute_force_time(bits: float, guesses_per_second: float) -> float:
    """Worst-case seconds to enumerate a 2^bits space at a fixed guess rate."""
    if bits < 0:
        raise ValueError(f"bits must be >= 0, got {bits}")
    if guesses_per_second <= 0:
        raise ValueError(f"guesses_per_second must be > 0, got {guesses_per_second}")
    return 2.0**bits / guesses_per_second


def analyze_scan(
    scan: Scan,
    dictionary_size: int = DEFAULT_DICTIONARY_SIZE,
    avg_neighbors: int = DEFAULT_AVG_NEIGHBORS,
    guess_rate: float = DEFAULT_GUESS_RATE,
) -> PrivacyReport:
    """Entropy report for one scan's AP set; an empty scan is a 0-bit record."""
    num_aps = len(scan.observations)
    naive = naive_entropy(num_aps)
    if num_aps == 0:
        effective = 0.0
    else:
        effective = effective_entropy(num_aps, dictionary_size, avg_neighbors)
    assumptions = (
        f"dictionary_size={dictionary_size}, avg_neighbors={avg_neighbors}, "
        f"guess_rate={guess_rate:g}/s; effective model: first AP is one dictionary "
        f"lookup, each further AP ranges over the neighborhood map"
    )
    return PrivacyReport(
        num_aps=num_aps,
        naive_entropy_bits=naive,
        effective_entropy_bits=effective,
        dictionary_size=dictionary_size,
        brute_force_seconds=brute_force_time(effective, guess_rate),
        assumptions=assumptions,
    )


def report_to_json(report: PrivacyReport) -> str:
    return (
        json.dumps(
            {
                "num_aps": report.num_aps,
                "naive_entropy_bits": report.naive_entropy_bits,
                "effective_entropy_bits": report.effective_entropy_bits,
                "dictionary_size": report.dictionary_size,
                "brute_force_seconds": report.brute_force_seconds,
                "assumptions": report.assumptions,
            },
            indent=2,
        )
        + "\n"
    )


def report_from_json(text: str) -> PrivacyReport:
    obj = json.loads(text)
    return PrivacyReport(
        num_aps=int(obj["num_aps"]),
        naive_entropy_bits=float(obj["naive_entropy_bits"]),
        effective_entropy_bits=float(obj["effective_entropy_bits"]),
        dictionary_size=int(obj["dictionary_size"]),
        brute_force_seconds=float(obj["brute_force_seconds"]),
        assumptions=str(obj["assumptions"]),
    )


def format_report(report: PrivacyReport) -> str:
    """Human-readable table for terminal output."""
    rows = [
        ("APs in scan", str(report.num_aps)),
        ("naive entropy", f"{report.naive_entropy_bits:.1f} bits"),
        ("effective entropy", f"{report.effective_entropy_bits:.1f} bits"),
        ("dictionary size", str(report.dictionary_size)),
        ("brute-force time", f"{report.brute_force_seconds:.3e} s"),
        ("assumptions", report.assumptions),
    ]
    width = max(len(name) for name, _ in rows)
    return "".join(f"{name:<{width}}  {value}\n" for name, value in rows)
