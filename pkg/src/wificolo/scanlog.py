"""WiFi scan data model and the line-delimited JSON scan-log format.

A scan log is UTF-8 text with one JSON object per line:

    {"device_id": "s1", "timestamp_s": 0, "ground_truth_distance_ft": 3,
     "observations": [{"bssid": "aa:bb:cc:dd:ee:ff", "rssi_dbm": -40, "ssid": "home"}]}

`ground_truth_distance_ft` and `ssid` are optional; unknown fields are
ignored but counted. After ingestion scans are sorted by
(device_id, timestamp_s); equal keys keep their input order. All types are
immutable values once constructed.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

RSSI_MIN_DBM = -120.0
RSSI_MAX_DBM = 0.0

_HEX12_RE = re.compile(r"[0-9a-f]{12}")


class ScanLogError(ValueError):
    """Malformed scan-log content. `line` is 1-based; 0 means no line context."""

    def __init__(self, message: str, line: int = 0):
        self.line = line
        super().__init__(f"line {line}: {message}" if line else message)


def canonicalize_bssid(bssid: str) -> str:
    """Normalize a MAC-48 identifier to lowercase colon-separated hex.

    Accepts colon-, dash- or dot-separated and bare 12-digit forms;
    idempotent on its own output. Raises ValueError for anything that does
    not spell exactly 6 octets.
    """
    digits = re.sub(r"[:\-\.]", "", bssid.strip().lower())
    if not _HEX12_RE.fullmatch(digits):
        raise ValueError(f"invalid bssid {bssid!r}: expected 6 hex octets")
    return ":".join(digits[i : i + 2] for i in range(0, 12, 2))


@dataclass(frozen=True)
class ApObservation:
    """One access point seen in one scan: identifier plus signal strength."""

    bssid: str
    rssi_dbm: float
    ssid: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "bssid", canonicalize_bssid(self.bssid))
        if not (RSSI_MIN_DBM <= self.rssi_dbm <= RSSI_MAX_DBM):
            raise ValueError(
                f"rssi out of range: {self.rssi_dbm} dBm not in "
                f"[{RSSI_MIN_DBM:g}, {RSSI_MAX_DBM:g}]"
            )


@dataclass(frozen=True)
class Scan:
    """One device's snapshot of visible access points.

    `observations` maps canonical bssid to its ApObservation; an empty map
    is valid (device out of range of every AP). `ground_truth_distance_ft`
    is set on calibration/experiment scans only.
    """

    device_id: str
    timestamp_s: float
    observations: dict[str, ApObservation]
    ground_truth_distance_ft: float | None = None

    def __post_init__(self):
        if self.timestamp_s < 0:
            raise ValueError(f"negative timestamp_s: {self.timestamp_s}")
        gt = self.ground_truth_distance_ft
        if gt is not None and gt < 0:
            raise ValueError(f"negative ground_truth_distance_ft: {gt}")
        for key, obs in self.observations.items():
            if key != obs.bssid:
                raise ValueError(f"observation key {key!r} != bssid {obs.bssid!r}")

    @classmethod
    def from_observations(
        cls,
        device_id: str,
        timestamp_s: float,
        observations: Iterable[ApObservation],
        ground_truth_distance_ft: float | None = None,
    ) -> "Scan":
        """Build a Scan, rejecting duplicate bssids."""
        keyed: dict[str, ApObservation] = {}
        for obs in observations:
            if obs.bssid in keyed:
                raise ValueError(f"duplicate bssid in scan: {obs.bssid}")
            keyed[obs.bssid] = obs
        return cls(device_id, timestamp_s, keyed, ground_truth_distance_ft)

    @property
    def bssids(self) -> set[str]:
        return set(self.observations)


@dataclass(frozen=True)
class ScanLog:
    """Ordered collection of scans plus a label for where they came from.

    `source` and `unknown_field_count` are diagnostics and do not take part
    in equality, so a parse/write round trip compares equal.
    """

    scans: tuple[Scan, ...]
    source: str = field(default="", compare=False)
    unknown_field_count: int = field(default=0, compare=False)

    @classmethod
    def from_scans(cls, scans: Iterable[Scan], source: str = "") -> "ScanLog":
        ordered = sorted(scans, key=lambda s: (s.device_id, s.timestamp_s))
        return cls(tuple(ordered), source=source)

    def __len__(self) -> int:
        return len(self.scans)


def _require(obj: dict, key: str, line: int):
    if key not in obj:
        raise ScanLogError(f"missing required field {key!r}", line)
    return obj[key]


_SCAN_FIELDS = {"device_id", "timestamp_s", "ground_truth_distance_ft", "observations"}
_OBS_FIELDS = {"bssid", "rssi_dbm", "ssid"}


def _parse_scan_line(obj: dict, line: int) -> tuple[Scan, int]:
    unknown = sum(1 for k in obj if k not in _SCAN_FIELDS)
    device_id = _require(obj, "device_id", line)
    if not isinstance(device_id, str):
        raise ScanLogError("device_id must be a string", line)
    timestamp_s = _require(obj, "timestamp_s", line)
    if not isinstance(timestamp_s, (int, float)) or isinstance(timestamp_s, bool):
        raise ScanLogError("timestamp_s must be a number", line)
    gt = obj.get("ground_truth_distance_ft")
    if gt is not None and (not isinstance(gt, (int, float)) or isinstance(gt, bool)):
        raise ScanLogError("ground_truth_distance_ft must be a number", line)
    raw_obs = _require(obj, "observations", line)
    if not isinstance(raw_obs, list):
        raise ScanLogError("observations must be an array", line)

    observations = []
    for entry in raw_obs:
        if not isinstance(entry, dict):
            raise ScanLogError("observation must be an object", line)
        unknown += sum(1 for k in entry if k not in _OBS_FIELDS)
        bssid = _require(entry, "bssid", line)
        rssi = _require(entry, "rssi_dbm", line)
        if not isinstance(rssi, (int, float)) or isinstance(rssi, bool):
            raise ScanLogError("rssi_dbm must be a number", line)
        ssid = entry.get("ssid")
        try:
            observations.append(ApObservation(bssid=bssid, rssi_dbm=rssi, ssid=ssid))
        except ValueError as exc:
            raise ScanLogError(str(exc), line) from exc
    try:
        scan = Scan.from_observations(device_id, timestamp_s, observations, gt)
    except ValueError as exc:
        raise ScanLogError(str(exc), line) from exc
    return scan, unknown


def parse_scan_log(data: str | bytes | IO, source: str = "<stream>") -> ScanLog:
    """Parse line-delimited JSON scans; errors carry the offending line number."""
    if hasattr(data, "read"):
        data = data.read()
    if isinstance(data, bytes):
        data = data.decode("utf-8")

    scans = []
    unknown_total = 0
    for line_no, line in enumerate(data.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScanLogError(f"malformed JSON: {exc.msg}", line_no) from exc
        if not isinstance(obj, dict):
            raise ScanLogError("scan line must be a JSON object", line_no)
        scan, unknown = _parse_scan_line(obj, line_no)
        scans.append(scan)
        unknown_total += unknown

    scans.sort(key=lambda s: (s.device_id, s.timestamp_s))
    return ScanLog(tuple(scans), source=source, unknown_field_count=unknown_total)


def _scan_to_json(scan: Scan) -> str:
    obj: dict = {"device_id": scan.device_id, "timestamp_s": scan.timestamp_s}
    if scan.ground_truth_distance_ft is not None:
        obj["ground_truth_distance_ft"] = scan.ground_truth_distance_ft
    obs_list = []
    for obs in scan.observations.values():
        entry: dict = {"bssid": obs.bssid, "rssi_dbm": obs.rssi_dbm}
        if obs.ssid is not None:
            entry["ssid"] = obs.ssid
        obs_list.append(entry)
    obj["observations"] = obs_list
    return json.dumps(obj, separators=(",", ":"))


def write_scan_log(log: ScanLog) -> str:
    """Serialize to line-delimited JSON; parse_scan_log(write_scan_log(L)) == L."""
    return "".join(_scan_to_json(s) + "\n" for s in log.scans)


def load_scan_log(path) -> ScanLog:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_scan_log(fh, source=str(path))


def save_scan_log(log: ScanLog, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(write_scan_log(log))
