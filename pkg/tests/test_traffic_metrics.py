import pytest

from hand_log import (
    EXPECTED_AVG_SPEED,
    EXPECTED_CROSSINGS,
    EXPECTED_DELAY_AVG,
    EXPECTED_DELAY_MAX,
    EXPECTED_ENTERED,
    EXPECTED_THROUGHPUT,
    REGION,
    hand_authored_log,
)
from infrasim.states import DetectionFrame, ObjectState
from infrasim.traffic_metrics import traffic_metrics
from infrasim.world import IntersectionRegion


def vehicle(tid, x, speed, t):
    return ObjectState(track_id=tid, cls="car", position=(x, 0.0, 0.0),
                       yaw=0.0, size=(4.5, 1.8, 1.5), speed=speed,
                       timestamp=float(t))


class TestHandAuthoredLog:
    def test_exact_hand_computed_values(self):
        m = traffic_metrics(hand_authored_log(), REGION, window=20.0)
        assert m.throughput == EXPECTED_THROUGHPUT
        assert m.delay_avg == EXPECTED_DELAY_AVG
        assert m.delay_max == EXPECTED_DELAY_MAX
        assert m.avg_speed == EXPECTED_AVG_SPEED
        assert m.crossings == EXPECTED_CROSSINGS
        assert m.entered == EXPECTED_ENTERED

    def test_delay_max_at_least_avg(self):
        m = traffic_metrics(hand_authored_log(), REGION, window=20.0)
        assert m.delay_max >= m.delay_avg >= 0.0

    def test_windowed_throughput_weighted_mean(self):
        frames = hand_authored_log()
        m = traffic_metrics(frames, REGION, window=10.0)
        # both crossings exit in [10, 20): series (0, 12) per minute
        assert m.throughput_series == [(0.0, 0.0), (10.0, 12.0)]
        weighted = sum(v for _, v in m.throughput_series) / 2.0
        assert weighted == m.throughput


class TestSyntheticCases:
    region = IntersectionRegion(id="r", center=(0.0, 0.0), d_f=10.0)

    def test_stationary_vehicle_accrues_waiting(self):
        frames = []
        for t in range(60):
            x = -15.0 + t if t < 20 else (5.0 if t < 30 else 5.0 + (t - 30))
            speed = 1.0 if (t < 20 or t >= 30) else 0.0
            frames.append(DetectionFrame(float(t), "s",
                                         [vehicle("v", x, speed, t)]))
        m = traffic_metrics(frames, self.region, window=60.0)
        assert m.delay_max == 10.0

    def test_window_positive_required(self):
        with pytest.raises(ValueError):
            traffic_metrics([], self.region, window=0.0)

    def test_pedestrians_ignored(self):
        frames = [DetectionFrame(float(t), "s", [
            ObjectState(track_id="p", cls="pedestrian",
                        position=(0.0, 0.0, 0.0), yaw=0.0,
                        size=(0.5, 0.5, 1.7), speed=1.0, timestamp=float(t))
        ]) for t in range(5)]
        m = traffic_metrics(frames, self.region, window=5.0)
        assert m.entered == 0
        assert m.avg_speed == 0.0
