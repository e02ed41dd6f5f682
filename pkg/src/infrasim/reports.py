"""Report emission: metrics CSV/JSON, comparison tables, SVG charts.

All writers go through an atomic temp-file + rename so reruns overwrite
cleanly and failures never leave partial outputs behind.
"""

from __future__ import annotations

import csv
import io
import json
import os

from .detection_metrics import AgentMetrics
from .infrastructure import CoverageMap
from .profiling import ScalabilityRecord, scalability_csv_rows
from .traffic_metrics import TrafficMetrics


def atomic_write_text(path: str, text: str) -> None:
    tmp = f"{path}.tmp-{os.getpid()}"
    try:
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_json(path: str, doc: dict) -> None:
    atomic_write_text(path, json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _csv_text(rows: list[list[str]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def metrics_csv_rows(per_strategy: dict[str, AgentMetrics],
                     traffic: TrafficMetrics | None = None) -> list[list[str]]:
    rows = [["strategy", "metric", "class", "value"]]
    for strategy in sorted(per_strategy):
        m = per_strategy[strategy]
        rows.append([strategy, "ate", "all", _fmt(m.ate)])
        rows.append([strategy, "ase", "all", _fmt(m.ase)])
        rows.append([strategy, "aoe", "all", _fmt(m.aoe)])
        for tau in sorted(m.ap_at_iou):
            rows.append([strategy, f"ap@iou{tau}", "all",
                         _fmt(m.ap_at_iou[tau])])
        rows.append([strategy, "ap@dist", "macro", _fmt(m.ap_at_dist)])
        for cls in sorted(m.per_class_ap_dist):
            rows.append([strategy, "ap@dist", cls,
                         _fmt(m.per_class_ap_dist[cls])])
    if traffic is not None:
        rows.append(["-", "throughput_per_min", "all", _fmt(traffic.throughput)])
        rows.append(["-", "delay_avg_s", "all", _fmt(traffic.delay_avg)])
        rows.append(["-", "delay_max_s", "all", _fmt(traffic.delay_max)])
        rows.append(["-", "avg_speed_mps", "all", _fmt(traffic.avg_speed)])
    return rows


def comparison_table_rows(per_strategy: dict[str, AgentMetrics]
                          ) -> list[list[str]]:
    """Side-by-side strategy table: one row per strategy."""
    rows = [["method", "ATE", "ASE", "AOE", "AP@0.5", "AP@Dist"]]
    for strategy in sorted(per_strategy):
        m = per_strategy[strategy]
        rows.append([strategy, _fmt(m.ate), _fmt(m.ase), _fmt(m.aoe),
                     _fmt(m.ap_at_iou.get(0.5)), _fmt(m.ap_at_dist)])
    return rows


def write_metrics_reports(out_dir: str, per_strategy: dict[str, AgentMetrics],
                          traffic: TrafficMetrics | None = None) -> list[str]:
    report = {
        "agent": {name: m.as_dict() for name, m in per_strategy.items()},
    }
    if traffic is not None:
        report["traffic"] = traffic.as_dict()
    paths = []
    path = os.path.join(out_dir, "metrics.json")
    write_json(path, report)
    paths.append(path)
    path = os.path.join(out_dir, "metrics.csv")
    atomic_write_text(path, _csv_text(metrics_csv_rows(per_strategy, traffic)))
    paths.append(path)
    if per_strategy:
        path = os.path.join(out_dir, "comparison.csv")
        atomic_write_text(path, _csv_text(comparison_table_rows(per_strategy)))
        paths.append(path)
    return paths


def write_scalability_outputs(out_dir: str,
                              records: list[ScalabilityRecord]) -> list[str]:
    csv_path = os.path.join(out_dir, "scalability.csv")
    atomic_write_text(csv_path, _csv_text(scalability_csv_rows(records)))
    svg_path = os.path.join(out_dir, "scalability.svg")
    _line_chart_svg(
        svg_path,
        [r.intersections for r in records],
        [r.steps_per_second for r in records],
        xlabel="intersections", ylabel="steps per second",
        title="kernel stepping rate vs intersection count")
    return [csv_path, svg_path]


def write_coverage_outputs(out_dir: str, name: str,
                           cov: CoverageMap) -> list[str]:
    rows = [["x", "y", "sensor_count"]]
    rows.extend([[f"{x:.2f}", f"{y:.2f}", str(n)] for x, y, n in cov.cells])
    csv_path = os.path.join(out_dir, f"coverage_{name}.csv")
    atomic_write_text(csv_path, _csv_text(rows))
    summary_path = os.path.join(out_dir, f"coverage_{name}_summary.json")
    write_json(summary_path, {
        "layout": name,
        "grid_m": cov.grid,
        "cells": len(cov.cells),
        "covered_fraction": cov.covered_fraction,
        "redundancy_fraction": cov.redundancy_fraction,
    })
    svg_path = os.path.join(out_dir, f"coverage_{name}.svg")
    _coverage_svg(svg_path, cov, name)
    return [csv_path, summary_path, svg_path]


def _line_chart_svg(path: str, xs, ys, xlabel: str, ylabel: str,
                    title: str) -> None:
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(5, 3.2))
    ax.plot(xs, ys, marker="o")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)


def _coverage_svg(path: str, cov: CoverageMap, name: str) -> None:
    import matplotlib
    matplotlib.use("svg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(4.5, 4.2))
    if cov.cells:
        xs = [c[0] for c in cov.cells]
        ys = [c[1] for c in cov.cells]
        ns = [c[2] for c in cov.cells]
        sc = ax.scatter(xs, ys, c=ns, s=12, marker="s", cmap="viridis")
        fig.colorbar(sc, ax=ax, label="sensors covering cell")
    ax.set_aspect("equal")
    ax.set_title(f"coverage: {name}")
    ax.set_xlabel("x (m)")
    ax.set_ylabel("y (m)")
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
