"""Command-line front end.

Wires together log ingestion, calibration, classification, evaluation
sweeps, duty-cycle simulation, scenario synthesis, and privacy analysis.
Machine-readable results go only to files (written atomically, so a
failed run leaves no partial artifact); diagnostics go only to stderr.
Every subcommand is deterministic given its flags, seeds included:
repeated runs produce byte-identical output files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from wificolo import classifier, dutycycle, privacy, scanlog, synth
from wificolo.features import feature_vector

CLASSIFY_CSV_HEADER = "timestamp_s,device_a,device_b,jaccard,pearson,das,colocated"


class CliError(Exception):
    """User-facing failure; message is printed as the one-line diagnostic."""


def _parse_ks(spec: str) -> list[float]:
    """Threshold list: comma-separated numbers and integer ranges like 1..25."""
    ks: list[float] = []
    for token in spec.split(","):
        token = token.strip()
        if not token:
            raise CliError(f"empty threshold in {spec!r}")
        if ".." in token:
            lo_s, _, hi_s = token.partition("..")
            try:
                lo, hi = int(lo_s), int(hi_s)
            except ValueError:
                raise CliError(f"bad threshold range {token!r} (want a..b)") from None
            if hi < lo:
                raise CliError(f"bad threshold range {token!r} (b < a)")
            ks.extend(float(k) for k in range(lo, hi + 1))
        else:
            try:
                ks.append(float(token))
            except ValueError:
                raise CliError(f"bad threshold {token!r}") from None
    return ks


def _read_log(path: str) -> scanlog.ScanLog:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return scanlog.parse_scan_log(fh, source=path)
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None
    except scanlog.ScanLogError as exc:
        raise CliError(f"{path}: {exc}") from exc


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except FileNotFoundError:
        raise CliError(f"{path}: no such file") from None


def _out_path(args, name: str) -> Path:
    p = Path(name)
    return p if p.is_absolute() else Path(args.out_dir) / p


def _write_outputs(outputs: list[tuple[Path, str]]) -> None:
    """Write every (path, text) pair atomically; clean up temp files on failure."""
    tmps: list[tuple[Path, Path]] = []
    try:
        for path, text in outputs:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_name(path.name + ".tmp")
            tmp.write_text(text, encoding="utf-8")
            tmps.append((tmp, path))
        for tmp, path in tmps:
            os.replace(tmp, path)
    except OSError as exc:
        for tmp, _ in tmps:
            tmp.unlink(missing_ok=True)
        raise CliError(f"cannot write output: {exc}") from exc


def _path_loss_from_flags(args) -> synth.PathLossModel:
    return synth.PathLossModel(
        rssi0_dbm=args.rssi0,
        d0_m=args.d0,
        exponent_n=args.exponent,
        noise_sigma_db=args.sigma,
        sensitivity_dbm=args.sensitivity,
    )


def _add_path_loss_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--rssi0", type=float, default=-40.0, help="RSSI at d0, dBm")
    sub.add_argument("--d0", type=float, default=1.0, help="reference distance, m")
    sub.add_argument("--exponent", type=float, default=2.5, help="path-loss exponent")
    sub.add_argument("--sigma", type=float, default=4.0, help="shadowing stddev, dB")
    sub.add_argument(
        "--sensitivity", type=float, default=-90.0, help="detection floor, dBm"
    )


def cmd_calibrate(args) -> int:
    log = _read_log(args.log)
    try:
        curve = classifier.calibrate(log)
    except ValueError as exc:
        raise CliError(f"{args.log}: {exc}") from exc
    _write_outputs([(_out_path(args, args.out), classifier.curve_to_csv(curve))])
    return 0


def cmd_sweep(args) -> int:
    log = _read_log(args.log)
    try:
        curve = classifier.curve_from_csv(_read_text(args.curve))
    except ValueError as exc:
        raise CliError(f"{args.curve}: {exc}") from exc
    ks = _parse_ks(args.ks)
    try:
        reports = classifier.sweep_thresholds(log, curve, ks, workers=args.workers)
    except ValueError as exc:
        raise CliError(f"{args.log}: {exc}") from exc
    _write_outputs([(_out_path(args, args.out), classifier.reports_to_csv(reports))])
    return 0


def cmd_classify(args) -> int:
    """Pair two devices' scans by timestamp and decide colocation for each pair."""
    log = _read_log(args.log)
    try:
        curve = classifier.curve_from_csv(_read_text(args.curve))
        profile = classifier.threshold_profile(curve, args.k)
    except ValueError as exc:
        raise CliError(f"{args.curve}: {exc}") from exc
    devices = sorted({s.device_id for s in log.scans})
    if len(devices) != 2:
        raise CliError(f"{args.log}: classify needs scans from exactly 2 devices, got {len(devices)}")
    dev_a, dev_b = devices
    by_time: dict[float, dict[str, scanlog.Scan]] = {}
    for scan in log.scans:
        by_time.setdefault(scan.timestamp_s, {})[scan.device_id] = scan
    lines = [CLASSIFY_CSV_HEADER]
    paired = 0
    for t in sorted(by_time):
        pair = by_time[t]
        if len(pair) != 2:
            continue
        fv = feature_vector(pair[dev_a], pair[dev_b])
        verdict = classifier.classify(fv, profile)
        lines.append(
            f"{t},{dev_a},{dev_b},{fv.jaccard},{fv.pearson},{fv.das},{str(verdict).lower()}"
        )
        paired += 1
    if not paired:
        raise CliError(f"{args.log}: no timestamps shared by both devices")
    _write_outputs([(_out_path(args, args.out), "\n".join(lines) + "\n")])
    return 0


def cmd_simulate(args) -> int:
    if args.devices < 2:
        raise CliError(f"need >= 2 devices, got {args.devices}")
    offsets = None
    if args.phase_offsets is not None:
        try:
            offsets = [float(x) for x in args.phase_offsets.split(",")]
        except ValueError:
            raise CliError(f"bad --phase-offsets {args.phase_offsets!r}") from None
        if len(offsets) != args.devices:
            raise CliError(
                f"--phase-offsets lists {len(offsets)} values for {args.devices} devices"
            )
    devices = []
    for i in range(args.devices):
        try:
            config = dutycycle.DutyCycleConfig(
                period_s=args.period,
                hotspot_fraction=args.fraction,
                scan_duration_s=args.scan_duration,
                phase_policy=args.phase_policy,
                phase_offset_s=offsets[i] if offsets is not None else 0.0,
            )
        except ValueError as exc:
            raise CliError(str(exc)) from exc
        devices.append(
            dutycycle.SimDevice(
                device_id=f"d{i:03d}",
                position=(i * args.spacing, 0.0),
                config=config,
                rng_seed=i,
            )
        )
    try:
        encounters = dutycycle.simulate(
            devices, _path_loss_from_flags(args), args.duration, args.seed
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    _write_outputs([(_out_path(args, args.out), dutycycle.encounters_to_jsonl(encounters))])
    return 0


def cmd_synth(args) -> int:
    try:
        if args.scenario is not None:
            scenario = synth.scenario_from_json(_read_text(args.scenario))
        else:
            scenario = synth.default_experiment_scenario(
                subjects=args.subjects,
                seed=args.seed,
                path_loss=_path_loss_from_flags(args),
                ambient_aps=args.ambient_aps,
                faint_ambient_aps=args.faint_aps,
                cluster_min=args.cluster_min,
                cluster_max=args.cluster_max,
                home_spacing_m=args.home_spacing_m,
            )
        log = synth.gen_distance_experiment(
            scenario, args.subjects, args.max_ft, args.step_ft
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    outputs = [(_out_path(args, args.out), scanlog.write_scan_log(log))]
    if args.scenario_out is not None:
        outputs.append((_out_path(args, args.scenario_out), synth.scenario_to_json(scenario)))
    _write_outputs(outputs)
    return 0


def cmd_privacy(args) -> int:
    log = _read_log(args.log)
    if not log.scans:
        raise CliError(f"{args.log}: empty scan log")
    if not 0 <= args.index < len(log.scans):
        raise CliError(
            f"{args.log}: scan index {args.index} out of range 0..{len(log.scans) - 1}"
        )
    try:
        report = privacy.analyze_scan(
            log.scans[args.index],
            dictionary_size=args.dictionary_size,
            avg_neighbors=args.avg_neighbors,
            guess_rate=args.guess_rate,
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    sys.stdout.write(privacy.format_report(report))
    if args.out is not None:
        _write_outputs([(_out_path(args, args.out), privacy.report_to_json(report))])
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from wificolo.service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port, log_level="info")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wificolo",
        description="WiFi-scan colocation toolkit: calibration, classification, "
        "duty-cycle simulation, synthetic scenarios, privacy analysis.",
    )
    parser.add_argument("--seed", type=int, default=0, help="master seed for seeded commands")
    parser.add_argument("--out-dir", default=".", help="directory for relative output paths")
    commands = parser.add_subparsers(dest="command", required=True)

    cal = commands.add_parser("calibrate", help="average feature curves from a distance log")
    cal.add_argument("--log", required=True, help="scan log (JSONL)")
    cal.add_argument("--out", default="curve.csv", help="calibration curve CSV")
    cal.set_defaults(func=cmd_calibrate)

    sw = commands.add_parser("sweep", help="evaluate thresholds against a calibration curve")
    sw.add_argument("--log", required=True, help="scan log (JSONL)")
    sw.add_argument("--curve", required=True, help="calibration curve CSV")
    sw.add_argument("--ks", default="1..25", help="thresholds: e.g. 10 or 1,5,10 or 1..25")
    sw.add_argument("--workers", type=int, default=1, help="evaluation threads")
    sw.add_argument("--out", default="sweep.csv", help="per-threshold report CSV")
    sw.set_defaults(func=cmd_sweep)

    cl = commands.add_parser("classify", help="colocation decisions for two devices' scans")
    cl.add_argument("--log", required=True, help="scan log with exactly 2 devices")
    cl.add_argument("--curve", required=True, help="calibration curve CSV")
    cl.add_argument("--k", type=float, required=True, help="distance threshold, ft")
    cl.add_argument("--out", default="decisions.csv", help="per-pair decision CSV")
    cl.set_defaults(func=cmd_classify)

    sim = commands.add_parser("simulate", help="duty-cycle encounter simulation")
    sim.add_argument("--devices", type=int, default=2, help="device count, placed on a line")
    sim.add_argument("--spacing", type=float, default=5.0, help="device spacing, m")
    sim.add_argument("--duration", type=float, default=3600.0, help="simulated seconds")
    sim.add_argument("--period", type=float, default=60.0, help="cycle period, s")
    sim.add_argument("--fraction", type=float, default=0.25, help="hotspot fraction of cycle")
    sim.add_argument(
        "--scan-duration",
        type=float,
        default=None,
        help="scan window length, s (default: whole scanner portion)",
    )
    sim.add_argument(
        "--phase-policy",
        choices=[dutycycle.PHASE_FIXED, dutycycle.PHASE_RANDOMIZED],
        default=dutycycle.PHASE_RANDOMIZED,
    )
    sim.add_argument(
        "--phase-offsets",
        default=None,
        help="comma list of fixed phase offsets, one per device",
    )
    _add_path_loss_flags(sim)
    sim.add_argument("--out", default="encounters.jsonl", help="encounter JSONL")
    sim.set_defaults(func=cmd_simulate)

    sy = commands.add_parser("synth", help="generate a synthetic distance-experiment log")
    sy.add_argument("--subjects", type=int, default=6, help="synthetic subjects")
    sy.add_argument("--max-ft", type=int, default=25, help="walk length, ft")
    sy.add_argument("--step-ft", type=int, default=1, help="scan spacing, ft")
    sy.add_argument("--ambient-aps", type=int, default=64, help="distant solid-band APs")
    sy.add_argument("--faint-aps", type=int, default=8, help="distant floor-straddling APs")
    sy.add_argument("--cluster-min", type=int, default=10, help="min weak APs per doorstep")
    sy.add_argument("--cluster-max", type=int, default=30, help="max weak APs per doorstep")
    sy.add_argument("--home-spacing-m", type=float, default=25.0, help="home grid spacing, m")
    sy.add_argument("--scenario", default=None, help="load scenario JSON instead of generating")
    sy.add_argument("--scenario-out", default=None, help="also save the scenario JSON")
    _add_path_loss_flags(sy)
    sy.add_argument("--out", default="scans.jsonl", help="scan log JSONL")
    sy.set_defaults(func=cmd_synth)

    pr = commands.add_parser("privacy", help="entropy analysis of one scan")
    pr.add_argument("--log", required=True, help="scan log (JSONL)")
    pr.add_argument("--index", type=int, default=0, help="scan index within the sorted log")
    pr.add_argument(
        "--dictionary-size", type=int, default=privacy.DEFAULT_DICTIONARY_SIZE
    )
    pr.add_argument("--avg-neighbors", type=int, default=privacy.DEFAULT_AVG_NEIGHBORS)
    pr.add_argument("--guess-rate", type=float, default=privacy.DEFAULT_GUESS_RATE)
    pr.add_argument("--out", default=None, help="also write the report as JSON")
    pr.set_defaults(func=cmd_privacy)

    srv = commands.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
