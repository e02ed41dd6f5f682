import math
import random

from infrasim.conflicts import ConflictLogger, detect_conflicts
from infrasim.states import ConflictEvent, ObjectState


def car(oid, x, y, yaw=0.0, speed=0.0, size=(4.5, 1.8, 1.5)):
    return ObjectState(track_id=oid, cls="car", position=(x, y, 0.0), yaw=yaw,
                       size=size, speed=speed, timestamp=0.0)


class TestDetectConflicts:
    def test_head_on_ttc(self):
        a = car("a", 0.0, 0.0, yaw=0.0, speed=10.0)
        b = car("b", 100.0, 0.0, yaw=math.pi, speed=10.0)
        events = detect_conflicts([a, b], horizon=6.0, dt=0.05)
        assert len(events) == 1
        ev = events[0]
        assert ev.kind == "ttc_breach"
        # footprints touch when the 100 m gap closes to one car length
        contact = (100.0 - 4.5) / 20.0
        assert contact <= ev.ttc <= contact + 0.05 + 1e-9

    def test_parallel_same_speed_no_event(self):
        a = car("a", 0.0, 0.0, speed=10.0)
        b = car("b", 0.0, 5.0, speed=10.0)
        assert detect_conflicts([a, b], horizon=6.0) == []

    def test_overlap_collision(self):
        a = car("a", 0.0, 0.0)
        b = car("b", 1.0, 0.5)
        events = detect_conflicts([a, b], horizon=6.0)
        assert len(events) == 1
        assert events[0].kind == "overlap_collision"
        assert events[0].ttc is None

    def test_touching_edges_is_not_overlap(self):
        a = car("a", 0.0, 0.0, size=(4.0, 2.0, 1.5))
        b = car("b", 4.0, 0.0, size=(4.0, 2.0, 1.5))
        events = detect_conflicts([a, b], horizon=1.0)
        assert all(ev.kind != "overlap_collision" for ev in events)

    def test_symmetric_in_ordering(self):
        rng = random.Random(8)
        objs = [car(f"o{i}", rng.uniform(-30, 30), rng.uniform(-30, 30),
                    yaw=rng.uniform(0, 2 * math.pi), speed=rng.uniform(0, 15))
                for i in range(8)]
        baseline = set(detect_conflicts(objs, horizon=5.0))
        for _ in range(5):
            rng.shuffle(objs)
            assert set(detect_conflicts(objs, horizon=5.0)) == baseline

    def test_crossing_paths_breach(self):
        a = car("a", -40.0, 0.0, yaw=0.0, speed=10.0)
        b = car("b", 0.0, -40.0, yaw=math.pi / 2, speed=10.0)
        events = detect_conflicts([a, b], horizon=6.0)
        assert len(events) == 1
        assert events[0].kind == "ttc_breach"
        assert abs(events[0].ttc - 4.0) < 0.3

    def test_receding_no_event(self):
        a = car("a", 0.0, 0.0, yaw=math.pi, speed=10.0)
        b = car("b", 20.0, 0.0, yaw=0.0, speed=10.0)
        assert detect_conflicts([a, b], horizon=10.0) == []


class TestConflictLogger:
    def ev(self, t, kind="ttc_breach"):
        return ConflictEvent(time=t, pair=("a", "b"), kind=kind,
                             ttc=1.0, min_distance=0.5)

    def test_episode_logged_once(self):
        log = ConflictLogger()
        for t in (0.0, 0.05, 0.1):
            log.record_step([self.ev(t)])
        assert len(log.events) == 1

    def test_rearms_after_gap(self):
        log = ConflictLogger()
        log.record_step([self.ev(0.0)])
        log.record_step([])
        log.record_step([self.ev(0.1)])
        assert len(log.events) == 2

    def test_kind_change_is_new_event(self):
        log = ConflictLogger()
        log.record_step([self.ev(0.0, "ttc_breach")])
        log.record_step([self.ev(0.05, "overlap_collision")])
        assert [e.kind for e in log.events] == ["ttc_breach", "overlap_collision"]
