import math
import random

import pytest

from infrasim.detection_metrics import (
    EvaluationError,
    agent_metrics,
    ap_at_distance,
    average_precision,
    bev_iou,
    match_detections,
    pair_frames,
    pose_errors,
    run_average_precision,
)
from infrasim.states import DetectionFrame, ObjectState


def box(oid, x, y, cls="car", yaw=0.0, size=(4.5, 1.8, 1.5), conf=1.0, t=0.0):
    return ObjectState(track_id=oid, cls=cls, position=(x, y, 0.0), yaw=yaw,
                       size=size, speed=0.0, timestamp=t, conf=conf)


def oracle_ap(records, n_gt):
    """Threshold-enumeration PR-envelope oracle (independent of the sweep)."""
    if n_gt <= 0:
        return None
    if not records:
        return 0.0
    points = []
    for theta in sorted({conf for conf, _ in records}, reverse=True):
        included = [(c, tp) for c, tp in records if c >= theta]
        tp = sum(1 for _, is_tp in included if is_tp)
        points.append((tp / n_gt, tp / len(included)))
    recalls = sorted({r for r, _ in points})
    ap = 0.0
    prev = 0.0
    for r in recalls:
        best = max(p for rr, p in points if rr >= r)
        ap += (r - prev) * best
        prev = r
    return ap


class TestBevIou:
    def test_identical(self):
        a = box("g", 3, 4, yaw=0.4)
        assert abs(bev_iou(a, a) - 1.0) < 1e-12

    def test_offset_unit_squares(self):
        a = box("g", 0, 0, size=(1, 1, 1))
        b = box("d", 0.5, 0, size=(1, 1, 1))
        assert abs(bev_iou(a, b) - 1.0 / 3.0) < 1e-9

    def test_rotated_square(self):
        a = box("g", 0, 0, size=(1, 1, 1))
        b = box("d", 0, 0, size=(1, 1, 1), yaw=math.pi / 4)
        inter = 2.0 * (math.sqrt(2.0) - 1.0)
        assert abs(bev_iou(a, b) - inter / (2.0 - inter)) < 1e-9


class TestMatchDetections:
    def test_single_qualifying_pair(self):
        gt = [box("g", 0, 0)]
        det = [box("d", 0.5, 0, conf=0.9)]
        result = match_detections(gt, det, "iou", 0.5)
        assert len(result.pairs) == 1

    def test_higher_confidence_wins(self):
        gt = [box("g", 0, 0)]
        det = [box("d1", 0.2, 0, conf=0.9), box("d2", -0.2, 0, conf=0.8)]
        result = match_detections(gt, det, "iou", 0.5)
        assert len(result.pairs) == 1
        assert result.pairs[0][1].track_id == "d1"
        assert [d.track_id for d in result.unmatched_det] == ["d2"]

    def test_class_mismatch_never_matches(self):
        gt = [box("g", 0, 0)]
        det = [box("d", 0, 0, cls="truck", size=(4.5, 1.8, 1.5), conf=0.9)]
        result = match_detections(gt, det, "iou", 0.1)
        assert result.pairs == []

    def test_each_side_used_at_most_once(self):
        gt = [box("g1", 0, 0), box("g2", 1.0, 0)]
        det = [box("d1", 0.1, 0, conf=0.9), box("d2", 0.9, 0, conf=0.8)]
        result = match_detections(gt, det, "dist", 2.0)
        assert len(result.pairs) == 2
        assert len({g.track_id for g, _ in result.pairs}) == 2

    def test_score_tie_breaks_to_smaller_gt_id(self):
        gt = [box("gb", 0, 2), box("ga", 0, -2)]
        det = [box("d", 0, 0, conf=0.9)]
        result = match_detections(gt, det, "dist", 5.0)
        assert result.pairs[0][0].track_id == "ga"


class TestAveragePrecision:
    def test_perfect(self):
        records = [(0.9, True), (0.8, True)]
        assert average_precision(records, 2) == 1.0

    def test_no_detections(self):
        assert average_precision([], 2) == 0.0

    def test_zero_gt_not_applicable(self):
        assert average_precision([(0.9, True)], 0) is None

    def test_hand_swept_example(self):
        # 2 gt; dets: TP@0.9, FP@0.8, TP@0.7 -> AP = 5/6
        records = [(0.9, True), (0.8, False), (0.7, True)]
        assert abs(average_precision(records, 2) - 5.0 / 6.0) < 1e-12

    def test_matches_threshold_enumeration_oracle(self):
        rng = random.Random(42)
        for _ in range(200):
            n_gt = rng.randint(1, 10)
            n_det = rng.randint(0, 10)
            confs = rng.sample(range(1000), n_det)
            max_tp = min(n_gt, n_det)
            n_tp = rng.randint(0, max_tp)
            flags = [True] * n_tp + [False] * (n_det - n_tp)
            rng.shuffle(flags)
            records = [(c / 1000.0, f) for c, f in zip(confs, flags)]
            got = average_precision(records, n_gt)
            want = oracle_ap(records, n_gt)
            assert abs(got - want) <= 1e-9

    def test_false_positive_never_increases_ap(self):
        rng = random.Random(43)
        for _ in range(50):
            n_gt = rng.randint(1, 6)
            records = [(rng.random(), rng.random() < 0.6) for _ in range(6)]
            base = average_precision(records, n_gt)
            worse = average_precision(records + [(rng.random(), False)], n_gt)
            assert worse <= base + 1e-12

    def test_top_confidence_tp_never_decreases_ap(self):
        rng = random.Random(44)
        for _ in range(50):
            n_gt = rng.randint(2, 6)
            records = [(rng.uniform(0, 0.9), rng.random() < 0.6)
                       for _ in range(6)]
            base = average_precision(records, n_gt)
            better = average_precision(records + [(0.95, True)], n_gt)
            assert better >= base - 1e-12


class TestApAtDistance:
    def test_perfect_detections(self):
        gt = [DetectionFrame(0.0, "gt", [box("g", 0, 0)])]
        det = [DetectionFrame(0.0, "d", [box("d", 0, 0, conf=0.9)])]
        macro, per_class = ap_at_distance(gt, det)
        assert macro == 1.0
        assert per_class == {"car": 1.0}

    def test_offset_one_and_a_half_meters(self):
        gt = [DetectionFrame(0.0, "gt", [box("g", 0, 0)])]
        det = [DetectionFrame(0.0, "d", [box("d", 1.5, 0, conf=0.9)])]
        macro, _ = ap_at_distance(gt, det)
        assert macro == 0.5  # hits thresholds 2 and 4, misses 0.5 and 1

    def test_offset_beyond_all_thresholds(self):
        gt = [DetectionFrame(0.0, "gt", [box("g", 0, 0)])]
        det = [DetectionFrame(0.0, "d", [box("d", 5.0, 0, conf=0.9)])]
        macro, _ = ap_at_distance(gt, det)
        assert macro == 0.0


class TestPoseErrors:
    def test_identical_boxes(self):
        a = box("g", 1, 2, yaw=0.3)
        assert pose_errors([(a, a)]) == (0.0, 0.0, 0.0)

    def test_translation_only(self):
        g = box("g", 0, 0)
        d = box("d", 0.5, 0)
        ate, ase, aoe = pose_errors([(g, d)])
        assert abs(ate - 0.5) < 1e-12
        assert ase == 0.0
        assert aoe == 0.0

    def test_halved_dimensions_and_yaw(self):
        g = box("g", 0, 0, size=(4.0, 2.0, 2.0))
        d = box("d", 0, 0, size=(2.0, 1.0, 1.0), yaw=math.pi / 4)
        ate, ase, aoe = pose_errors([(g, d)])
        assert ate == 0.0
        assert abs(ase - 0.875) < 1e-12
        assert abs(aoe - math.pi / 4) < 1e-12

    def test_no_matches_not_applicable(self):
        assert pose_errors([]) is None

    def test_invariant_under_rigid_transform(self):
        rng = random.Random(45)
        for _ in range(20):
            g = box("g", rng.uniform(-10, 10), rng.uniform(-10, 10),
                    yaw=rng.uniform(-3, 3))
            d = box("d", g.position[0] + rng.uniform(-1, 1),
                    g.position[1] + rng.uniform(-1, 1),
                    yaw=g.yaw + rng.uniform(-0.5, 0.5),
                    size=(4.0, 2.0, 1.4))
            base = pose_errors([(g, d)])
            dx, dy, dth = rng.uniform(-50, 50), rng.uniform(-50, 50), \
                rng.uniform(-3, 3)

            def rigid(o):
                c, s = math.cos(dth), math.sin(dth)
                x, y, z = o.position
                return ObjectState(
                    track_id=o.track_id, cls=o.cls,
                    position=(c * x - s * y + dx, s * x + c * y + dy, z),
                    yaw=o.yaw + dth, size=o.size, speed=o.speed,
                    timestamp=o.timestamp, conf=o.conf)

            moved = pose_errors([(rigid(g), rigid(d))])
            for a, b in zip(base, moved):
                assert abs(a - b) < 1e-9


class TestRunEvaluation:
    def test_self_evaluation_is_perfect(self):
        frames = [DetectionFrame(0.1 * k, "s",
                                 [box("a", 1.0 * k, 0, conf=0.9, t=0.1 * k)])
                  for k in range(5)]
        assert run_average_precision(frames, frames) == 1.0
        metrics = agent_metrics(frames, frames)
        assert metrics.ate == 0.0
        assert metrics.ap_at_iou[0.5] == 1.0

    def test_timestamp_mismatch_names_divergence(self):
        gt = [DetectionFrame(0.0, "g", []), DetectionFrame(0.1, "g", [])]
        det = [DetectionFrame(0.0, "d", []), DetectionFrame(0.2, "d", [])]
        with pytest.raises(EvaluationError) as err:
            pair_frames(gt, det)
        assert "frame 1" in str(err.value)
        assert "0.1" in str(err.value) and "0.2" in str(err.value)
