"""Agent-level detection metrics: AP over IoU or center-distance matching,
distance-averaged AP, and pose errors (translation / scale / orientation)
over matched pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .geometry import angle_diff, oriented_iou
from .states import DetectionFrame, ObjectState

DIST_AP_THRESHOLDS = (0.5, 1.0, 2.0, 4.0)  # meters, BEV centers
POSE_MATCH_DIST = 2.0                      # meters, for ATE/ASE/AOE pairing


class EvaluationError(ValueError):
    pass


def bev_iou(a: ObjectState, b: ObjectState) -> float:
    """Intersection-over-union of the two BEV footprint rectangles."""
    return oriented_iou(a.footprint(), b.footprint())


@dataclass
class MatchResult:
    pairs: list[tuple[ObjectState, ObjectState]] = field(default_factory=list)
    unmatched_gt: list[ObjectState] = field(default_factory=list)
    unmatched_det: list[ObjectState] = field(default_factory=list)


def _qualifies(gt: ObjectState, det: ObjectState, criterion: str,
               threshold: float) -> tuple[bool, float]:
    """(qualifies, score); higher score is a better match either way."""
    if criterion == "iou":
        iou = bev_iou(gt, det)
        return iou >= threshold, iou
    if criterion == "dist":
        d = math.dist(gt.xy, det.xy)
        return d <= threshold, -d
    raise ValueError(f"unknown criterion '{criterion}'")


def match_detections(gt: list[ObjectState], det: list[ObjectState],
                     criterion: str = "iou",
                     threshold: float = 0.5) -> MatchResult:
    """Greedy same-class matching in descending detection confidence.

    Each detection takes the best still-unmatched ground truth under the
    criterion; score ties break toward the smaller ground-truth id.
    """
    result = MatchResult()
    taken: set[int] = set()
    order = sorted(range(len(det)), key=lambda i: (-det[i].conf, det[i].track_id or ""))
    matched_det: set[int] = set()
    for di in order:
        d = det[di]
        best: tuple[float, str, int] | None = None
        for gi, g in enumerate(gt):
            if gi in taken or g.cls != d.cls:
                continue
            ok, score = _qualifies(g, d, criterion, threshold)
            if not ok:
                continue
            key = (-score, g.track_id or "")
            if best is None or key < (best[0], best[1]):
                best = (-score, g.track_id or "", gi)
        if best is not None:
            taken.add(best[2])
            matched_det.add(di)
            result.pairs.append((gt[best[2]], d))
    result.unmatched_gt = [g for i, g in enumerate(gt) if i not in taken]
    result.unmatched_det = [d for i, d in enumerate(det)
                            if i not in matched_det]
    return result


def average_precision(records: list[tuple[float, bool]],
                      n_gt: int) -> float | None:
    """Area under the precision envelope (all-point interpolation).

    `records` are (confidence, is_true_positive) over a whole run. With no
    ground truth the metric is undefined and None is returned, never 0.
    """
    if n_gt <= 0:
        return None
    if not records:
        return 0.0
    ordered = sorted(records, key=lambda r: -r[0])
    tp = 0
    points: list[tuple[float, float]] = []
    for k, (_, is_tp) in enumerate(ordered, start=1):
        if is_tp:
            tp += 1
        points.append((tp / n_gt, tp / k))
    # precision envelope: best precision at recall >= r
    env = [0.0] * len(points)
    best = 0.0
    for i in range(len(points) - 1, -1, -1):
        best = max(best, points[i][1])
        env[i] = best
    ap = 0.0
    prev_recall = 0.0
    for (recall, _), prec in zip(points, env):
        ap += (recall - prev_recall) * prec
        prev_recall = recall
    return ap


def _frame_records(gt: list[ObjectState], det: list[ObjectState],
                   criterion: str, threshold: float,
                   cls: str | None = None) -> list[tuple[float, bool]]:
    if cls is not None:
        gt = [g for g in gt if g.cls == cls]
        det = [d for d in det if d.cls == cls]
    match = match_detections(gt, det, criterion, threshold)
    matched = {id(d) for _, d in match.pairs}
    return [(d.conf, id(d) in matched) for d in det]


def pair_frames(gt_frames: list[DetectionFrame],
                det_frames: list[DetectionFrame],
                tol: float = 1e-6) -> list[tuple[DetectionFrame, DetectionFrame]]:
    """Zip two logs by timestamp; raises naming the first divergence."""
    if len(gt_frames) != len(det_frames):
        raise EvaluationError(
            f"log length mismatch: {len(gt_frames)} ground-truth frames vs "
            f"{len(det_frames)} detection frames")
    for k, (g, d) in enumerate(zip(gt_frames, det_frames)):
        if abs(g.timestamp - d.timestamp) > tol:
            raise EvaluationError(
                f"timestamp mismatch at frame {k}: "
                f"{g.timestamp} vs {d.timestamp}")
    return list(zip(gt_frames, det_frames))


def run_average_precision(gt_frames: list[DetectionFrame],
                          det_frames: list[DetectionFrame],
                          criterion: str = "iou", threshold: float = 0.5,
                          cls: str | None = None) -> float | None:
    pairs = pair_frames(gt_frames, det_frames)
    records: list[tuple[float, bool]] = []
    n_gt = 0
    for g, d in pairs:
        records.extend(_frame_records(g.objects, d.objects, criterion,
                                      threshold, cls))
        n_gt += sum(1 for o in g.objects if cls is None or o.cls == cls)
    return average_precision(records, n_gt)


def ap_at_distance(gt_frames: list[DetectionFrame],
                   det_frames: list[DetectionFrame]) -> tuple[float | None,
                                                              dict[str, float]]:
    """Distance-matched AP averaged over {0.5, 1, 2, 4} m, then over classes.

    Returns (macro average over classes with ground truth, per-class map).
    """
    classes = sorted({o.cls for f in gt_frames for o in f.objects})
    per_class: dict[str, float] = {}
    for cls in classes:
        aps = [run_average_precision(gt_frames, det_frames, "dist", thr, cls)
               for thr in DIST_AP_THRESHOLDS]
        vals = [a for a in aps if a is not None]
        if vals:
            per_class[cls] = sum(vals) / len(vals)
    if not per_class:
        return None, {}
    return sum(per_class.values()) / len(per_class), per_class


def pose_errors(pairs: list[tuple[ObjectState, ObjectState]]
                ) -> tuple[float, float, float] | None:
    """(ATE, ASE, AOE) over matched pairs; None when there are no matches.

    ASE is one minus the aligned axis-ratio volume product; AOE is the
    absolute yaw difference wrapped to [0, pi].
    """
    if not pairs:
        return None
    ate = ase = aoe = 0.0
    for gt, det in pairs:
        ate += math.dist(gt.xy, det.xy)
        ratio = 1.0
        for g_dim, d_dim in zip(gt.size, det.size):
            ratio *= min(g_dim, d_dim) / max(g_dim, d_dim)
        ase += 1.0 - ratio
        aoe += angle_diff(gt.yaw, det.yaw)
    n = len(pairs)
    return (ate / n, ase / n, aoe / n)


def run_pose_errors(gt_frames: list[DetectionFrame],
                    det_frames: list[DetectionFrame],
                    match_dist: float = POSE_MATCH_DIST
                    ) -> tuple[float, float, float] | None:
    pairs: list[tuple[ObjectState, ObjectState]] = []
    for g, d in pair_frames(gt_frames, det_frames):
        match = match_detections(g.objects, d.objects, "dist", match_dist)
        pairs.extend(match.pairs)
    return pose_errors(pairs)


@dataclass
class AgentMetrics:
    """All agent-level figures for one detection log against ground truth."""

    ate: float | None
    ase: float | None
    aoe: float | None
    ap_at_iou: dict[float, float | None]
    ap_at_dist: float | None
    per_class_ap_dist: dict[str, float]

    def as_dict(self) -> dict:
        return {
            "ate": self.ate, "ase": self.ase, "aoe": self.aoe,
            "ap_at_iou": {repr(k): v for k, v in self.ap_at_iou.items()},
            "ap_at_dist": self.ap_at_dist,
            "per_class_ap_dist": self.per_class_ap_dist,
        }


def agent_metrics(gt_frames: list[DetectionFrame],
                  det_frames: list[DetectionFrame],
                  iou_thresholds: tuple[float, ...] = (0.5,)) -> AgentMetrics:
    pose = run_pose_errors(gt_frames, det_frames)
    ap_iou = {tau: run_average_precision(gt_frames, det_frames, "iou", tau)
              for tau in iou_thresholds}
    macro, per_class = ap_at_distance(gt_frames, det_frames)
    return AgentMetrics(
        ate=None if pose is None else pose[0],
        ase=None if pose is None else pose[1],
        aoe=None if pose is None else pose[2],
        ap_at_iou=ap_iou,
        ap_at_dist=macro,
        per_class_ap_dist=per_class,
    )
