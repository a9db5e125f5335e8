"""Synthetic WiFi environments with known ground truth.

A scenario is a 2D field of access points plus a log-distance path-loss
model. Scans generated from it follow RSSI(d) = rssi0 - 10*n*log10(d/d0)
with optional lognormal shadowing, so feature-versus-distance behaviour is
controllable where real scan corpora are not available. The distance
experiment generator replays the calibration protocol: each subject takes
a reference scan at their own AP, then walks radially outward taking one
scan per step until the maximum distance.
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field

from wificolo.scanlog import (
    RSSI_MAX_DBM,
    RSSI_MIN_DBM,
    ApObservation,
    Scan,
    ScanLog,
    canonicalize_bssid,
)
from wificolo.seeding import derive_seed

FT_TO_M = 0.3048

Point = tuple[float, float]


@dataclass(frozen=True)
class PathLossModel:
    """Log-distance path loss with lognormal shadowing.

    noise_sigma_db = 0 gives the noiseless oracle; sensitivity_dbm is the
    receiver floor below which an AP does not appear in a scan.
    """

    rssi0_dbm: float = -40.0
    d0_m: float = 1.0
    exponent_n: float = 2.5
    noise_sigma_db: float = 4.0
    sensitivity_dbm: float = -90.0

    def __post_init__(self):
        if self.d0_m <= 0:
            raise ValueError(f"d0_m must be > 0, got {self.d0_m}")
        if self.exponent_n <= 0:
            raise ValueError(f"exponent_n must be > 0, got {self.exponent_n}")
        if self.noise_sigma_db < 0:
            raise ValueError(f"noise_sigma_db must be >= 0, got {self.noise_sigma_db}")
        if self.sensitivity_dbm >= self.rssi0_dbm:
            raise ValueError(
                f"sensitivity_dbm {self.sensitivity_dbm} must be below rssi0_dbm {self.rssi0_dbm}"
            )

    def rssi_at(self, distance_m: float, noise_draw: float = 0.0) -> float:
        """RSSI in dBm at a distance; noise_draw is a standard-normal deviate.

        Distances at or below zero are an error; callers model co-location
        with the antenna by clamping to d0_m first.
        """
        if distance_m <= 0:
            raise ValueError(f"distance must be > 0, got {distance_m}")
        return (
            self.rssi0_dbm
            - 10.0 * self.exponent_n * math.log10(distance_m / self.d0_m)
            + self.noise_sigma_db * noise_draw
        )


@dataclass(frozen=True)
class SynthScenario:
    """AP layout plus propagation model plus the seed for every derived stream.

    ap_power_offset_db shifts individual APs' effective transmit level in
    dB (default 0): real scans are full of APs heard through walls and
    floors near the detection limit, and those weak entries are what makes
    scan contents drift over short walks.
    """

    ap_positions: dict[str, Point]
    path_loss: PathLossModel = PathLossModel()
    seed: int = 0
    ap_power_offset_db: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        canon_positions: dict[str, Point] = {}
        for bssid, (x, y) in self.ap_positions.items():
            key = canonicalize_bssid(bssid)
            if key in canon_positions:
                raise ValueError(f"duplicate AP bssid: {key}")
            canon_positions[key] = (float(x), float(y))
        if not canon_positions:
            raise ValueError("scenario needs at least one AP")
        canon_offsets = {}
        for bssid, off in self.ap_power_offset_db.items():
            key = canonicalize_bssid(bssid)
            if key not in canon_positions:
                raise ValueError(f"power offset for unknown AP: {key}")
            canon_offsets[key] = float(off)
        object.__setattr__(self, "ap_positions", canon_positions)
        object.__setattr__(self, "ap_power_offset_db", canon_offsets)


def scan_at(
    scenario: SynthScenario,
    position: Point,
    device_id: str,
    timestamp_s: float,
    rng: random.Random,
    ground_truth_distance_ft: float | None = None,
) -> Scan:
    """One synthetic scan: every AP whose noisy RSSI clears the sensitivity floor.

    Distances below d0 are clamped to d0. APs are visited in sorted bssid
    order with one noise draw each, so a given rng state always yields the
    same scan.
    """
    model = scenario.path_loss
    observations = []
    for bssid in sorted(scenario.ap_positions):
        ap_x, ap_y = scenario.ap_positions[bssid]
        d = max(model.d0_m, math.hypot(position[0] - ap_x, position[1] - ap_y))
        draw = rng.gauss(0.0, 1.0)
        rssi = model.rssi_at(d, draw) + scenario.ap_power_offset_db.get(bssid, 0.0)
        if rssi < model.sensitivity_dbm:
            continue
        rssi = min(RSSI_MAX_DBM, max(RSSI_MIN_DBM, rssi))
        observations.append(ApObservation(bssid=bssid, rssi_dbm=rssi))
    return Scan.from_observations(
        device_id, timestamp_s, observations, ground_truth_distance_ft
    )


def gen_distance_experiment(
    scenario: SynthScenario,
    subjects: int,
    max_distance_ft: int,
    step_ft: int = 1,
) -> ScanLog:
    """Replay the distance-proxy protocol against a synthetic scenario.

    Subject i's home AP is the i-th bssid in sorted order (wrapping if the
    scenario has fewer APs than subjects). Each subject records a reference
    scan at the home AP (distance 0), then one scan per step_ft out to
    max_distance_ft along a per-subject radial direction. Walk directions
    and scan noise come from per-subject streams, so generation order does
    not matter.
    """
    if subjects < 1:
        raise ValueError(f"subjects must be >= 1, got {subjects}")
    if step_ft < 1 or max_distance_ft < step_ft:
        raise ValueError(
            f"need max_distance_ft >= step_ft >= 1, got max={max_distance_ft} step={step_ft}"
        )
    bssids = sorted(scenario.ap_positions)
    scans = []
    for i in range(subjects):
        home = scenario.ap_positions[bssids[i % len(bssids)]]
        device_id = f"s{i:03d}"
        walk_rng = random.Random(derive_seed(scenario.seed, "walk", i))
        theta = walk_rng.uniform(0.0, 2.0 * math.pi)
        noise_rng = random.Random(derive_seed(scenario.seed, "scan-noise", i))
        scans.append(
            scan_at(scenario, home, device_id, 0.0, noise_rng, ground_truth_distance_ft=0.0)
        )
        for d_ft in range(step_ft, max_distance_ft + 1, step_ft):
            pos = (
                home[0] + math.cos(theta) * d_ft * FT_TO_M,
                home[1] + math.sin(theta) * d_ft * FT_TO_M,
            )
            scans.append(
                scan_at(
                    scenario,
                    pos,
                    device_id,
                    float(d_ft),
                    noise_rng,
                    ground_truth_distance_ft=float(d_ft),
                )
            )
    return ScanLog.from_scans(
        scans, source=f"synthetic distance experiment (seed={scenario.seed})"
    )


def _bssid(prefix: int, index: int) -> str:
    return f"{prefix:02x}:00:00:00:{(index >> 8) & 0xFF:02x}:{index & 0xFF:02x}"


def default_experiment_scenario(
    subjects: int,
    seed: int = 0,
    path_loss: PathLossModel | None = None,
    ambient_aps: int = 64,
    faint_ambient_aps: int = 8,
    cluster_min: int = 10,
    cluster_max: int = 30,
    home_spacing_m: float = 25.0,
) -> SynthScenario:
    """Standard AP field for the synthetic distance experiment.

    Models a residential street. Subject homes sit on a jittered grid
    `home_spacing_m` apart; each home's own AP is heard through the
    exterior wall at about 10 dB over the sensitivity floor at the
    doorstep, so it censors out a few meters into the walk. Around every
    doorstep sits a cluster of weak neighborhood emitters (other homes'
    devices bleeding through walls), 2 to 8 dB over the floor at the
    doorstep and gone within the first few steps; cluster sizes vary per
    home between `cluster_min` and `cluster_max`, so reference scans
    differ in richness from subject to subject. Far away, `ambient_aps`
    high-power transmitters on a 200 to 400 m ring land in a narrow
    -78..-72 dBm band that a 25 ft walk cannot measurably change, plus
    `faint_ambient_aps` more in the -87..-84 dBm band that straddle the
    floor and churn in and out of scans under noise.

    Near APs dominate scan pairs at small separations and are gone from
    both scans by mid-walk, while the ambient backbone holds the far tail
    flat, which is the decay-then-plateau shape real dense environments
    produce.

    Home bssids sort before all others, so gen_distance_experiment assigns
    subject i its own home AP.
    """
    if subjects < 1:
        raise ValueError(f"subjects must be >= 1, got {subjects}")
    if ambient_aps < 0 or faint_ambient_aps < 0:
        raise ValueError("ambient AP counts must be >= 0")
    if not 0 <= cluster_min <= cluster_max:
        raise ValueError(
            f"need 0 <= cluster_min <= cluster_max, got {cluster_min}..{cluster_max}"
        )
    if home_spacing_m <= 0:
        raise ValueError(f"home_spacing_m must be > 0, got {home_spacing_m}")
    model = path_loss if path_loss is not None else PathLossModel()
    rng = random.Random(derive_seed(seed, "scenario"))
    floor = model.sensitivity_dbm

    positions: dict[str, Point] = {}
    offsets: dict[str, float] = {}

    side = math.ceil(math.sqrt(subjects))
    homes = []
    for i in range(subjects):
        gx, gy = i % side, i // side
        pos = (
            gx * home_spacing_m + rng.uniform(-3.0, 3.0),
            gy * home_spacing_m + rng.uniform(-3.0, 3.0),
        )
        homes.append(pos)
        key = _bssid(0x02, i)
        positions[key] = pos
        offsets[key] = (floor + 10.0) - model.rssi_at(model.d0_m)

    cx = sum(h[0] for h in homes) / len(homes)
    cy = sum(h[1] for h in homes) / len(homes)
    for j in range(ambient_aps + faint_ambient_aps):
        ring = rng.uniform(200.0, 400.0)
        ang = rng.uniform(0.0, 2.0 * math.pi)
        key = _bssid(0x0A, j)
        positions[key] = (cx + ring * math.cos(ang), cy + ring * math.sin(ang))
        if j < ambient_aps:
            target = rng.uniform(-78.0, -72.0)
        else:
            target = rng.uniform(-87.0, -84.0)
        offsets[key] = target - model.rssi_at(ring)

    idx = 0
    for home in homes:
        for _ in range(rng.randint(cluster_min, cluster_max)):
            r = rng.uniform(0.5, 1.0)
            ang = rng.uniform(0.0, 2.0 * math.pi)
            key = _bssid(0x0E, idx)
            idx += 1
            positions[key] = (home[0] + r * math.cos(ang), home[1] + r * math.sin(ang))
            target = floor + rng.uniform(2.0, 8.0)
            offsets[key] = target - model.rssi_at(max(model.d0_m, r))
    return SynthScenario(
        ap_positions=positions, path_loss=model, seed=seed, ap_power_offset_db=offsets
    )


def scenario_to_json(scenario: SynthScenario) -> str:
    obj = {
        "seed": scenario.seed,
        "path_loss": {
            "rssi0_dbm": scenario.path_loss.rssi0_dbm,
            "d0_m": scenario.path_loss.d0_m,
            "exponent_n": scenario.path_loss.exponent_n,
            "noise_sigma_db": scenario.path_loss.noise_sigma_db,
            "sensitivity_dbm": scenario.path_loss.sensitivity_dbm,
        },
        "ap_positions": {b: list(scenario.ap_positions[b]) for b in sorted(scenario.ap_positions)},
    }
    if scenario.ap_power_offset_db:
        obj["ap_power_offset_db"] = {
            b: scenario.ap_power_offset_db[b] for b in sorted(scenario.ap_power_offset_db)
        }
    return json.dumps(obj, indent=2) + "\n"


def scenario_from_json(text: str) -> SynthScenario:
    obj = json.loads(text)
    model = PathLossModel(**obj.get("path_loss", {}))
    return SynthScenario(
        ap_positions={b: tuple(xy) for b, xy in obj["ap_positions"].items()},
        path_loss=model,
        seed=obj.get("seed", 0),
        ap_power_offset_db=obj.get("ap_power_offset_db", {}),
    )


def load_scenario(path) -> SynthScenario:
    with open(path, "r", encoding="utf-8") as fh:
        return scenario_from_json(fh.read())


def save_scenario(scenario: SynthScenario, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(scenario_to_json(scenario))
