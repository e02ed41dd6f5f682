import math
import random
import statistics

from infrasim.infrastructure import SensorSpec
from infrasim.perception import (
    ChannelModel,
    NoiseModel,
    V2XMessage,
    late_fuse,
    no_fusion,
    simulate_detections,
    transmit,
)
from infrasim.states import DetectionFrame, ObjectState


def gt(oid, x, y, cls="car", size=(4.5, 1.8, 1.5), yaw=0.0, speed=0.0, t=0.0):
    return ObjectState(track_id=oid, cls=cls, position=(x, y, 0.0), yaw=yaw,
                       size=size, speed=speed, timestamp=t)


def det(oid, x, y, conf, cls="car", t=0.0, speed=0.0, yaw=0.0):
    return ObjectState(track_id=oid, cls=cls, position=(x, y, 0.0), yaw=yaw,
                       size=(4.5, 1.8, 1.5), speed=speed, timestamp=t,
                       conf=conf)


LIDAR = [SensorSpec(id="l0", kind="lidar", position=(0.0, 0.0, 3.0),
                    range_m=100.0)]


class TestSimulateDetections:
    def test_noiseless_identity(self):
        truth = DetectionFrame(0.0, "gt", [gt("a", 10, 0), gt("b", -20, 5)])
        out = simulate_detections(LIDAR, truth, NoiseModel(),
                                  random.Random(1), "iu")
        assert [o.track_id for o in out.objects] == ["a", "b"]
        for got, want in zip(out.objects, truth.objects):
            assert got.position == want.position
            assert got.size == want.size

    def test_miss_rate_one_only_false_positives(self):
        truth = DetectionFrame(0.0, "gt", [gt("a", 10, 0)])
        noise = NoiseModel(miss_rate=1.0, false_positive_rate=2.0)
        out = simulate_detections(LIDAR, truth, noise, random.Random(2), "iu")
        assert all(o.track_id.startswith("iu/fp") for o in out.objects)

    def test_position_noise_matches_sigma(self):
        truth = DetectionFrame(0.0, "gt", [gt("a", 10, 0)])
        noise = NoiseModel(pos_sigma=0.2)
        rng = random.Random(3)
        xs = [simulate_detections(LIDAR, truth, noise, rng, "iu")
              .objects[0].position[0] for _ in range(1000)]
        assert 0.18 <= statistics.stdev(xs) <= 0.22

    def test_confidence_decreases_with_distance(self):
        truth = DetectionFrame(0.0, "gt", [gt("near", 5, 0), gt("far", 0, 80)])
        out = simulate_detections(LIDAR, truth, NoiseModel(),
                                  random.Random(4), "iu")
        by_id = {o.track_id: o.conf for o in out.objects}
        assert by_id["near"] > by_id["far"]


class TestTransmit:
    def msg(self, t=0.0):
        return V2XMessage(sender="iu_a", send_time=t,
                          payload=DetectionFrame(t, "iu_a", []))

    def test_latency_only(self):
        ch = ChannelModel(base_latency=0.1)
        assert transmit(self.msg(0.0), ch, random.Random(1)) == 0.1

    def test_drop_rate_one(self):
        ch = ChannelModel(drop_rate=1.0)
        assert transmit(self.msg(), ch, random.Random(1)) is None

    def test_range_limit_drops_regardless(self):
        ch = ChannelModel(drop_rate=0.0, range_limit=100.0)
        assert transmit(self.msg(), ch, random.Random(1), distance=150.0) is None

    def test_delivery_never_before_send(self):
        rng = random.Random(5)
        ch = ChannelModel(base_latency=0.05, jitter=0.1, drop_rate=0.2)
        for k in range(200):
            out = transmit(self.msg(0.1 * k), ch, rng)
            if out is not None:
                assert out >= 0.1 * k

    def test_zero_jitter_preserves_send_order(self):
        rng = random.Random(6)
        ch = ChannelModel(base_latency=0.08, jitter=0.0)
        deliveries = [transmit(self.msg(0.1 * k), ch, rng) for k in range(10)]
        assert deliveries == sorted(deliveries)


class TestLateFuse:
    def test_empty_received_is_identity(self):
        local = DetectionFrame(1.0, "iu_a", [det("x", 3, 4, 0.8)])
        fused = late_fuse(local, [])
        assert [o.track_id for o in fused.objects] == ["x"]
        assert fused.objects[0].position == (3.0, 4.0, 0.0)

    def test_symmetric_offsets_average_to_truth(self):
        local = DetectionFrame(0.0, "iu_a", [det("x", 10.2, 0.0, 0.6)])
        remote = DetectionFrame(0.0, "iu_b", [det("y", 9.8, 0.0, 0.6)])
        fused = late_fuse(local, [remote])
        assert len(fused.objects) == 1
        assert abs(fused.objects[0].position[0] - 10.0) < 1e-9

    def test_remote_only_object_appears(self):
        local = DetectionFrame(0.0, "iu_a", [])
        remote = DetectionFrame(0.0, "iu_b", [det("y", 5, 5, 0.7)])
        fused = late_fuse(local, [remote])
        assert len(fused.objects) == 1
        assert fused.objects[0].track_id.startswith("iu_a/fused")
        assert fused.provenance[fused.objects[0].track_id] == [("iu_b", "y")]

    def test_stale_payload_discarded(self):
        local = DetectionFrame(2.0, "iu_a", [])
        remote = DetectionFrame(1.0, "iu_b", [det("y", 5, 5, 0.7, t=1.0)])
        fused = late_fuse(local, [remote], staleness=0.5)
        assert fused.objects == []

    def test_alignment_extrapolates_motion(self):
        local = DetectionFrame(1.0, "iu_a", [])
        moving = det("y", 0.0, 0.0, 0.9, t=0.8, speed=10.0)
        remote = DetectionFrame(0.8, "iu_b", [moving])
        fused = late_fuse(local, [remote])
        assert abs(fused.objects[0].position[0] - 2.0) < 1e-9

    def test_fused_confidence_dominates_members(self):
        local = DetectionFrame(0.0, "iu_a", [det("x", 0, 0, 0.5)])
        remote = DetectionFrame(0.0, "iu_b", [det("y", 0.3, 0, 0.6)])
        fused = late_fuse(local, [remote])
        conf = fused.objects[0].conf
        assert abs(conf - (1 - 0.5 * 0.4)) < 1e-12
        assert conf >= 0.6

    def test_different_classes_never_merge(self):
        local = DetectionFrame(0.0, "iu_a", [det("x", 0, 0, 0.5)])
        remote = DetectionFrame(0.0, "iu_b",
                                [det("y", 0.2, 0, 0.6, cls="pedestrian")])
        fused = late_fuse(local, [remote])
        assert len(fused.objects) == 2

    def test_no_same_class_pair_within_gate(self):
        rng = random.Random(9)
        for _ in range(30):
            local_objs = [det(f"l{i}", rng.uniform(-10, 10),
                              rng.uniform(-10, 10), rng.uniform(0.3, 0.9))
                          for i in range(rng.randint(0, 4))]
            frames = []
            for s in range(2):
                objs = [det(f"r{s}{i}", rng.uniform(-10, 10),
                            rng.uniform(-10, 10), rng.uniform(0.3, 0.9))
                        for i in range(rng.randint(0, 4))]
                frames.append(DetectionFrame(0.0, f"iu_{s}", objs))
            fused = late_fuse(DetectionFrame(0.0, "iu_a", local_objs), frames,
                              fuse_gate=2.0)
            for i, a in enumerate(fused.objects):
                for b in fused.objects[i + 1:]:
                    if a.cls == b.cls:
                        assert math.dist(a.xy, b.xy) >= 2.0

    def test_disjoint_coverage_union(self):
        # clean sources with disjoint coverage fuse to the union of truth
        local = DetectionFrame(0.0, "iu_a", [det("a", -20, 0, 1.0)])
        remote = DetectionFrame(0.0, "iu_b", [det("b", 20, 0, 1.0)])
        fused = late_fuse(local, [remote])
        assert len(fused.objects) == 2


class TestNoFusion:
    def test_identity(self):
        frame = DetectionFrame(0.0, "iu_a", [det("x", 1, 2, 0.5)])
        assert no_fusion(frame) is frame

    def test_empty(self):
        frame = DetectionFrame(0.0, "iu_a", [])
        assert no_fusion(frame).objects == []
