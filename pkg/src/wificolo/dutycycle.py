"""Discrete-event simulation of the hotspot duty cycle.

Each device cycles between broadcasting as a WiFi hotspot and scanning as
a receiver, so two phones can detect each other with no infrastructure AP
in between. A cycle of length P spends the first hotspot_fraction of the
cycle (from the phase offset, wrapped mod P) broadcasting, then opens the
scan window, then idles. A detection happens when one device's scan
window overlaps another's broadcast interval while the radio link clears
the sensitivity floor.

Time is handled with exact interval arithmetic over cycle boundaries
rather than fixed time-stepping, so overlap detection has no step-size
artifacts and runs are bit-reproducible.
"""

from __future__ import annotations

import enum
import json
import math
from bisect import bisect_right
from dataclasses import dataclass

from wificolo.seeding import derive_seed, unit_uniform
from wificolo.synth import PathLossModel, Point

PHASE_FIXED = "fixed"
PHASE_RANDOMIZED = "randomized"


class Mode(enum.Enum):
    HOTSPOT = "hotspot"
    SCANNER = "scanner"
    IDLE = "idle"


@dataclass(frozen=True)
class DutyCycleConfig:
    """One device's rotation schedule.

    scan_duration_s = None selects the whole scanner portion of the cycle,
    period_s * (1 - hotspot_fraction); the resolved value is stored. With
    the randomized policy the phase is drawn uniformly in [0, P) once per
    cycle from the device's seeded stream; the fixed policy uses
    phase_offset_s for every cycle.
    """

    period_s: float = 60.0
    hotspot_fraction: float = 0.25
    scan_duration_s: float | None = None
    phase_policy: str = PHASE_RANDOMIZED
    phase_offset_s: float = 0.0

    def __post_init__(self):
        if not self.period_s > 0:
            raise ValueError(f"period_s must be > 0, got {self.period_s}")
        if not 0.0 < self.hotspot_fraction < 1.0:
            raise ValueError(
                f"hotspot_fraction must be in (0, 1), got {self.hotspot_fraction}"
            )
        remainder = self.period_s * (1.0 - self.hotspot_fraction)
        if self.scan_duration_s is None:
            object.__setattr__(self, "scan_duration_s", remainder)
        elif not 0.0 < self.scan_duration_s <= remainder:
            raise ValueError(
                f"scan_duration_s must be in (0, {remainder}], got {self.scan_duration_s}"
            )
        if self.phase_policy not in (PHASE_FIXED, PHASE_RANDOMIZED):
            raise ValueError(f"unknown phase_policy: {self.phase_policy!r}")
        if not math.isfinite(self.phase_offset_s):
            raise ValueError(f"phase_offset_s must be finite, got {self.phase_offset_s}")

    @property
    def hotspot_len_s(self) -> float:
        return self.period_s * self.hotspot_fraction


@dataclass(frozen=True)
class SimDevice:
    device_id: str
    position: Point
    config: DutyCycleConfig = DutyCycleConfig()
    rng_seed: int = 0

    def __post_init__(self):
        if not self.device_id:
            raise ValueError("device_id must be non-empty")


@dataclass(frozen=True)
class Encounter:
    """One scan window of scanner_id that heard hotspot_id's broadcast."""

    scanner_id: str
    hotspot_id: str
    time_s: float
    rssi_dbm: float

    def __post_init__(self):
        if self.scanner_id == self.hotspot_id:
            raise ValueError(f"self-encounter for {self.scanner_id!r}")


def _phase_s(config: DutyCycleConfig, seed: int, cycle: int) -> float:
    if config.phase_policy == PHASE_FIXED:
        return config.phase_offset_s % config.period_s
    return config.period_s * unit_uniform(seed, cycle)


def mode_at(config: DutyCycleConfig, seed: int, t: float) -> Mode:
    """Role of a device at absolute time t under its own phase stream."""
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    period = config.period_s
    cycle = int(t // period)
    u = (t - cycle * period - _phase_s(config, seed, cycle)) % period
    if u < config.hotspot_len_s:
        return Mode.HOTSPOT
    if u < config.hotspot_len_s + config.scan_duration_s:
        return Mode.SCANNER
    return Mode.IDLE


def _wrapped_pieces(
    cycle_start: float,
    period: float,
    phase: float,
    start_offset: float,
    length: float,
    duration: float,
) -> list[tuple[float, float]]:
    """Absolute sub-intervals of one wrapped-mod-P interval, clipped to duration.

    The interval [phase + start_offset, phase + start_offset + length) is
    taken modulo the period within its own cycle span, so it comes out as
    one or two half-open pieces.
    """
    rel = (phase + start_offset) % period
    if rel + length <= period:
        pieces = [(rel, rel + length)]
    else:
        pieces = [(rel, period), (0.0, rel + length - period)]
    out = []
    for lo, hi in pieces:
        a = cycle_start + lo
        b = min(cycle_start + hi, duration)
        if b > a:
            out.append((a, b))
    return out


def _device_schedule(
    device: SimDevice, master_seed: int, duration: float
) -> tuple[list[tuple[float, float]], list[list[tuple[float, float]]]]:
    """(hotspot pieces sorted by start, scan windows as per-cycle piece lists)."""
    cfg = device.config
    seed = derive_seed(master_seed, device.rng_seed, device.device_id)
    hot: list[tuple[float, float]] = []
    windows: list[list[tuple[float, float]]] = []
    cycle = 0
    while cycle * cfg.period_s < duration:
        start = cycle * cfg.period_s
        phase = _phase_s(cfg, seed, cycle)
        hot.extend(
            _wrapped_pieces(start, cfg.period_s, phase, 0.0, cfg.hotspot_len_s, duration)
        )
        win = _wrapped_pieces(
            start, cfg.period_s, phase, cfg.hotspot_len_s, cfg.scan_duration_s, duration
        )
        if win:
            windows.append(win)
        cycle += 1
    hot.sort()
    return hot, windows


def _earliest_overlap(
    window: list[tuple[float, float]],
    hot: list[tuple[float, float]],
    hot_starts: list[float],
) -> tuple[float, float] | None:
    """Earliest positive-length intersection of the window with the broadcast pieces."""
    best: tuple[float, float] | None = None
    for ws, we in window:
        # hot pieces are disjoint and sorted; candidates start before we
        # and the piece just before ws may still reach into the window
        i = max(0, bisect_right(hot_starts, ws) - 1)
        while i < len(hot) and hot[i][0] < we:
            lo = max(ws, hot[i][0])
            hi = min(we, hot[i][1])
            if hi > lo and (best is None or lo < best[0]):
                best = (lo, hi)
            i += 1
    return best


def simulate(
    devices: list[SimDevice],
    radio: PathLossModel,
    duration_s: float,
    master_seed: int = 0,
) -> list[Encounter]:
    """All pairwise detections over [0, duration_s).

    One Encounter per (scanner, hotspot, scan window) triple whose window
    overlaps the hotspot's broadcast and whose link clears the radio
    sensitivity floor; RSSI is sampled noiselessly at the pair distance
    (clamped to d0) and time_s is the midpoint of the earliest overlap.
    Output is sorted by time, then scanner, then hotspot, and depends only
    on the arguments.
    """
    if len(devices) < 2:
        raise ValueError(f"need >= 2 devices, got {len(devices)}")
    if duration_s <= 0:
        raise ValueError(f"duration_s must be > 0, got {duration_s}")
    ids = [d.device_id for d in devices]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate device ids")

    schedules = {d.device_id: _device_schedule(d, master_seed, duration_s) for d in devices}
    rssi: dict[tuple[str, str], float] = {}
    for a in devices:
        for b in devices:
            if a.device_id >= b.device_id:
                continue
            d = math.hypot(a.position[0] - b.position[0], a.position[1] - b.position[1])
            level = radio.rssi_at(max(radio.d0_m, d))
            if level >= radio.sensitivity_dbm:
                rssi[(a.device_id, b.device_id)] = level

    encounters = []
    for scanner in devices:
        _, windows = schedules[scanner.device_id]
        for hotspot in devices:
            if hotspot.device_id == scanner.device_id:
                continue
            key = tuple(sorted((scanner.device_id, hotspot.device_id)))
            if key not in rssi:
                continue
            hot, _ = schedules[hotspot.device_id]
            hot_starts = [p[0] for p in hot]
            for window in windows:
                overlap = _earliest_overlap(window, hot, hot_starts)
                if overlap is None:
                    continue
                encounters.append(
                    Encounter(
                        scanner_id=scanner.device_id,
                        hotspot_id=hotspot.device_id,
                        time_s=(overlap[0] + overlap[1]) / 2.0,
                        rssi_dbm=rssi[key],
                    )
                )
    encounters.sort(key=lambda e: (e.time_s, e.scanner_id, e.hotspot_id))
    return encounters


def detection_probability(config_a: DutyCycleConfig, config_b: DutyCycleConfig) -> float:
    """Chance per cycle that a's scan window overlaps b's hotspot interval.

    Both devices must use randomized phases and share one period. With
    independent uniform phases the offset between the two intervals is
    uniform mod P, and two arcs of lengths L1 and L2 on a circle of
    circumference P intersect for offsets of total measure min(P, L1+L2),
    hence min(1, (L1+L2)/P). Exact integration, no simulation.
    """
    if config_a.phase_policy != PHASE_RANDOMIZED or config_b.phase_policy != PHASE_RANDOMIZED:
        raise ValueError("analytic form needs randomized phases on both devices")
    if config_a.period_s != config_b.period_s:
        raise ValueError(
            f"analytic form needs equal periods, got {config_a.period_s} and {config_b.period_s}"
        )
    period = config_a.period_s
    return min(1.0, (config_a.scan_duration_s + config_b.hotspot_len_s) / period)


def encounters_to_jsonl(encounters: list[Encounter]) -> str:
    """Line-delimited JSON, one encounter per line, fixed key order."""
    lines = []
    for e in encounters:
        lines.append(
            json.dumps(
                {
                    "scanner_id": e.scanner_id,
                    "hotspot_id": e.hotspot_id,
                    "time_s": e.time_s,
                    "rssi_dbm": e.rssi_dbm,
                },
                separators=(",", ":"),
            )
        )
    return "".join(line + "\n" for line in lines)


def parse_encounters(text: str) -> list[Encounter]:
    encounters = []
    for number, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            encounters.append(
                Encounter(
                    scanner_id=obj["scanner_id"],
                    hotspot_id=obj["hotspot_id"],
                    time_s=float(obj["time_s"]),
                    rssi_dbm=float(obj["rssi_dbm"]),
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"line {number}: bad encounter record: {exc}") from exc
    return encounters
