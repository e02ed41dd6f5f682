"""Command-line entry point: run, replay, evaluate, profile, coverage.

Exit codes: 0 success, 2 configuration error, 1 runtime error. All
commands overwrite their output directories atomically; a manifest is
recorded in every run directory before exit.
"""

from __future__ import annotations

import argparse
import datetime
import glob
import hashlib
import json
import os
import sys

from . import __version__
from .detection_metrics import EvaluationError, agent_metrics
from .engine import run_scenario
from .infrastructure import PlacementLayout, load_sensor_config, placement_coverage
from .pipeline import StreamOrderError, ingest_stream
from .profiling import profile_scalability
from .reports import (
    atomic_write_text,
    write_coverage_outputs,
    write_json,
    write_metrics_reports,
    write_scalability_outputs,
)
from .scenario import ConfigError, ScenarioConfig, load_scenario
from .traffic_metrics import traffic_metrics
from .wire import frame_to_line, write_conflicts_csv
from .world import MapFormatError, MapValidationError, load_map

EXIT_OK = 0
EXIT_RUNTIME = 1
EXIT_CONFIG = 2


def _utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _config_hash(path: str) -> str:
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def _write_manifest(out_dir: str, doc: dict) -> None:
    write_json(os.path.join(out_dir, "manifest.json"), doc)


def _frames_text(frames) -> str:
    return "".join(frame_to_line(f) + "\n" for f in frames)


def _conflicts_text(events) -> str:
    import io
    buf = io.StringIO()
    write_conflicts_csv(buf, events)
    return buf.getvalue()


def _write_run_outputs(out_dir: str, result) -> dict[str, str]:
    outputs: dict[str, str] = {}

    def emit(name: str, text: str) -> None:
        path = os.path.join(out_dir, name)
        atomic_write_text(path, text)
        outputs[name] = path

    emit("frames.jsonl", _frames_text(result.frames))
    emit("conflicts.csv", _conflicts_text(result.conflicts))
    emit("journal.txt", "".join(f"{t:.3f} {msg}\n"
                                for t, msg in result.journal))
    for source, frames in sorted(result.detection_logs.items()):
        emit(f"detections_{source}.jsonl", _frames_text(frames))
    for strategy, frames in sorted(result.fused_logs.items()):
        emit(f"fused_{strategy}.jsonl", _frames_text(frames))
    return outputs


def _run_with_manifest(args, cfg: ScenarioConfig, config_path: str | None) -> int:
    os.makedirs(args.out, exist_ok=True)
    manifest = {
        "tool_version": __version__,
        "seed": cfg.seed,
        "config_hash": _config_hash(config_path) if config_path else None,
        "started_at": _utc_now(),
        "status": "running",
        "outputs": {},
    }
    try:
        result = run_scenario(cfg)
        outputs = _write_run_outputs(args.out, result)
        manifest["outputs"] = {k: os.path.basename(v)
                               for k, v in outputs.items()}
        manifest["frames"] = len(result.frames)
        manifest["conflict_events"] = len(result.conflicts)
        manifest["peak_objects"] = result.peak_objects
        manifest["status"] = "ok"
        return EXIT_OK
    except Exception as exc:  # runtime failure: report, mark manifest
        manifest["status"] = "error"
        manifest["error"] = str(exc)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    finally:
        manifest["ended_at"] = _utc_now()
        _write_manifest(args.out, manifest)


def cmd_run(args) -> int:
    try:
        cfg = load_scenario(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        if not os.path.exists(cfg.map_path):
            raise ConfigError(f"map file not found: {cfg.map_path}")
    except (ConfigError, MapFormatError, MapValidationError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _run_with_manifest(args, cfg, args.config)


def cmd_replay(args) -> int:
    try:
        if not os.path.exists(args.log):
            raise ConfigError(f"replay log not found: {args.log}")
        if not os.path.exists(args.map):
            raise ConfigError(f"map file not found: {args.map}")
        cfg = ScenarioConfig(
            map_path=args.map, duration=args.duration, dt=args.dt,
            seed=args.seed if args.seed is not None else 0,
            replay_path=args.log)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return _run_with_manifest(args, cfg, None)


def _resolve_eval_inputs(args) -> tuple[str, list[tuple[str, str]]]:
    """(gt path, [(label, det path), ...])"""
    if args.run:
        gt = os.path.join(args.run, "frames.jsonl")
        pairs = []
        for strategy in args.strategy or ["late_fusion"]:
            matches = sorted(glob.glob(
                os.path.join(args.run, f"fused_{strategy}.jsonl")))
            if not matches:
                raise ConfigError(
                    f"no fused_{strategy}.jsonl in run dir {args.run}")
            pairs.append((strategy, matches[0]))
        return gt, pairs
    if not args.gt or not args.det:
        raise ConfigError("evaluate needs --run, or --gt and --det")
    labels = args.label or []
    pairs = []
    for i, det in enumerate(args.det):
        label = labels[i] if i < len(labels) else f"det{i}"
        pairs.append((label, det))
    return args.gt, pairs


def cmd_evaluate(args) -> int:
    try:
        gt_path, det_pairs = _resolve_eval_inputs(args)
        for path in [gt_path] + [p for _, p in det_pairs]:
            if not os.path.exists(path):
                raise ConfigError(f"log not found: {path}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        os.makedirs(args.out, exist_ok=True)
        gt = ingest_stream(gt_path).frames
        per_strategy = {}
        metric_set = set((args.metrics or "agent").split(","))
        if "agent" in metric_set or "both" in metric_set:
            for label, det_path in det_pairs:
                det = ingest_stream(det_path).frames
                if not det:  # an empty log counts as zero detections
                    from .states import DetectionFrame
                    det = [DetectionFrame(f.timestamp, "empty", [])
                           for f in gt]
                per_strategy[label] = agent_metrics(gt, det)
        traffic = None
        if "traffic" in metric_set or "both" in metric_set:
            if not args.map:
                raise ConfigError("traffic metrics need --map")
            m = load_map(args.map)
            regions = {r.id: r for r in m.intersections}
            if args.region:
                if args.region not in regions:
                    raise ConfigError(f"unknown region '{args.region}'")
                region = regions[args.region]
            elif regions:
                region = m.intersections[0]
            else:
                raise ConfigError("map has no intersection regions")
            window = args.window or max(
                1.0, gt[-1].timestamp - gt[0].timestamp if gt else 1.0)
            traffic = traffic_metrics(gt, region, window)
        paths = write_metrics_reports(args.out, per_strategy, traffic)
        for path in paths:
            print(path)
        return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EvaluationError, StreamOrderError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def cmd_profile(args) -> int:
    try:
        cfg = load_scenario(args.config)
        if args.seed is not None:
            cfg.seed = args.seed
        counts = [int(c) for c in args.counts.split(",")]
        if counts != sorted(counts):
            raise ConfigError("--counts must be ascending")
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        os.makedirs(args.out, exist_ok=True)
        records = profile_scalability(cfg, counts)
        for path in write_scalability_outputs(args.out, records):
            print(path)
        return EXIT_OK
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def cmd_coverage(args) -> int:
    try:
        m = load_map(args.map)
        sensors = load_sensor_config(args.sensors)
    except (MapFormatError, MapValidationError, ValueError, OSError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        os.makedirs(args.out, exist_ok=True)
        name = args.name or os.path.splitext(os.path.basename(args.sensors))[0]
        layout = PlacementLayout(name=name, sensors=tuple(sensors))
        cov = placement_coverage(layout, m, grid=args.grid)
        for path in write_coverage_outputs(args.out, name, cov):
            print(path)
        return EXIT_OK
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="infrasim",
        description="infrastructure-centric cooperative driving simulation")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="execute a scenario config")
    p.add_argument("--config", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("replay", help="re-run a recorded frame log")
    p.add_argument("--log", required=True)
    p.add_argument("--map", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--duration", type=float, default=60.0)
    p.add_argument("--dt", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("evaluate", help="score detection logs against truth")
    p.add_argument("--gt")
    p.add_argument("--det", action="append")
    p.add_argument("--label", action="append")
    p.add_argument("--run", help="run directory (uses frames.jsonl as truth)")
    p.add_argument("--strategy", action="append",
                   choices=["no_fusion", "late_fusion"])
    p.add_argument("--metrics", default="agent",
                   help="comma list: agent, traffic, both")
    p.add_argument("--map")
    p.add_argument("--region")
    p.add_argument("--window", type=float, default=None)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("profile", help="scalability profile over intersection counts")
    p.add_argument("--config", required=True)
    p.add_argument("--counts", default="1,2,3,4")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(func=cmd_profile)

    p = sub.add_parser("coverage", help="sensor placement coverage report")
    p.add_argument("--map", required=True)
    p.add_argument("--sensors", required=True)
    p.add_argument("--grid", type=float, default=5.0)
    p.add_argument("--name")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_coverage)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
