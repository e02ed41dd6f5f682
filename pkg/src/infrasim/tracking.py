"""Multi-object tracking: constant-velocity Kalman filter + gated assignment.

Association per frame: predict every live track to the frame timestamp,
build a center-distance cost matrix (entries beyond the gate are
infeasible), solve the assignment, update matches, open tracks for the
leftover detections, and age out tracks that keep missing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linear_sum_assignment

from .states import DetectionFrame, ObjectState

INFEASIBLE = 1e9

# default process/measurement noise (meters, seconds)
PROCESS_ACCEL_STD = 2.0
MEASUREMENT_STD = 0.5


class CovarianceError(ValueError):
    """Input covariance is not positive semi-definite."""


@dataclass
class KalmanState:
    """Planar constant-velocity filter state: mean (x, y, vx, vy) + covariance."""

    mean: np.ndarray
    cov: np.ndarray

    @classmethod
    def from_position(cls, x: float, y: float,
                      pos_var: float = 1.0, vel_var: float = 25.0) -> "KalmanState":
        return cls(mean=np.array([x, y, 0.0, 0.0]),
                   cov=np.diag([pos_var, pos_var, vel_var, vel_var]).astype(float))


def _check_psd(cov: np.ndarray) -> None:
    sym = 0.5 * (cov + cov.T)
    if np.min(np.linalg.eigvalsh(sym)) < -1e-9:
        raise CovarianceError("covariance is not positive semi-definite")


def kalman_predict_update(state: KalmanState, dt: float,
                          measurement: tuple[float, float] | None = None,
                          process_std: float = PROCESS_ACCEL_STD,
                          measurement_std: float = MEASUREMENT_STD) -> KalmanState:
    """One predict step, plus a position update when a measurement is given.

    Joseph-form update keeps the covariance symmetric PSD.
    """
    if dt <= 0.0:
        raise ValueError("dt must be > 0")
    _check_psd(state.cov)

    f = np.array([[1.0, 0.0, dt, 0.0],
                  [0.0, 1.0, 0.0, dt],
                  [0.0, 0.0, 1.0, 0.0],
                  [0.0, 0.0, 0.0, 1.0]])
    # white-acceleration process noise
    q_pos = 0.25 * dt ** 4
    q_cross = 0.5 * dt ** 3
    q_vel = dt ** 2
    q = (process_std ** 2) * np.array([[q_pos, 0.0, q_cross, 0.0],
                                       [0.0, q_pos, 0.0, q_cross],
                                       [q_cross, 0.0, q_vel, 0.0],
                                       [0.0, q_cross, 0.0, q_vel]])
    mean = f @ state.mean
    cov = f @ state.cov @ f.T + q

    if measurement is not None:
        h = np.array([[1.0, 0.0, 0.0, 0.0],
                      [0.0, 1.0, 0.0, 0.0]])
        r = (measurement_std ** 2) * np.eye(2)
        z = np.asarray(measurement, dtype=float)
        innovation = z - h @ mean
        s = h @ cov @ h.T + r
        k = cov @ h.T @ np.linalg.inv(s)
        mean = mean + k @ innovation
        ikh = np.eye(4) - k @ h
        cov = ikh @ cov @ ikh.T + k @ r @ k.T

    cov = 0.5 * (cov + cov.T)
    return KalmanState(mean=mean, cov=cov)


@dataclass
class TrackRecord:
    track_id: str
    cls: str
    kf: KalmanState
    states: list[ObjectState] = field(default_factory=list)
    hits: int = 1
    misses: int = 0
    last_timestamp: float = 0.0

    @property
    def confirmed(self) -> bool:
        return self.hits >= 2

    def predicted_position(self) -> tuple[float, float]:
        return (float(self.kf.mean[0]), float(self.kf.mean[1]))


def solve_assignment(cost: np.ndarray, gate: float) -> list[tuple[int, int]]:
    """Minimum-cost row/column pairs with all entries beyond the gate dropped."""
    if cost.size == 0:
        return []
    feasible = cost.copy()
    feasible[feasible > gate] = INFEASIBLE
    rows, cols = linear_sum_assignment(feasible)
    return [(r, c) for r, c in zip(rows, cols) if cost[r, c] <= gate]


def associate(tracks: list[TrackRecord], frame: DetectionFrame, gate: float,
              max_misses: int = 3,
              measurement_std: float = MEASUREMENT_STD,
              id_start: int = 0) -> tuple[list[TrackRecord], int]:
    """One association cycle; returns (surviving tracks, next free track number).

    New tracks get ids "t<6 digits>" counting from id_start.
    """
    if gate <= 0.0:
        raise ValueError("gate must be > 0")

    predicted: list[KalmanState] = []
    for track in tracks:
        dt = frame.timestamp - track.last_timestamp
        if dt <= 0.0:
            dt = 1e-3
        predicted.append(kalman_predict_update(track.kf, dt))

    detections = frame.objects
    cost = np.zeros((len(tracks), len(detections)))
    for i, (track, pred) in enumerate(zip(tracks, predicted)):
        px, py = float(pred.mean[0]), float(pred.mean[1])
        for j, det in enumerate(detections):
            if det.cls != track.cls:
                cost[i, j] = INFEASIBLE
            else:
                cost[i, j] = math.hypot(det.xy[0] - px, det.xy[1] - py)

    matches = solve_assignment(cost, gate)
    matched_tracks = {r for r, _ in matches}
    matched_dets = {c for _, c in matches}

    out: list[TrackRecord] = []
    for (r, c) in sorted(matches):
        track, det = tracks[r], detections[c]
        dt = frame.timestamp - track.last_timestamp
        if dt <= 0.0:
            dt = 1e-3
        kf = kalman_predict_update(track.kf, dt, measurement=det.xy,
                                   measurement_std=measurement_std)
        state = replace(det, track_id=track.track_id)
        out.append(TrackRecord(
            track_id=track.track_id, cls=track.cls, kf=kf,
            states=track.states + [state], hits=track.hits + 1, misses=0,
            last_timestamp=frame.timestamp))

    for r, track in enumerate(tracks):
        if r in matched_tracks:
            continue
        misses = track.misses + 1
        if misses >= max_misses:
            continue
        out.append(TrackRecord(
            track_id=track.track_id, cls=track.cls, kf=predicted[r],
            states=track.states, hits=track.hits, misses=misses,
            last_timestamp=frame.timestamp))

    next_id = id_start
    for c, det in enumerate(detections):
        if c in matched_dets:
            continue
        track_id = f"t{next_id:06d}"
        next_id += 1
        kf = KalmanState.from_position(det.xy[0], det.xy[1])
        state = replace(det, track_id=track_id)
        out.append(TrackRecord(
            track_id=track_id, cls=det.cls, kf=kf, states=[state],
            hits=1, misses=0, last_timestamp=frame.timestamp))

    return out, next_id


class Tracker:
    """Streaming wrapper: feed frames, read back associated frames."""

    def __init__(self, gate: float = 2.0, max_misses: int = 3):
        self.gate = gate
        self.max_misses = max_misses
        self.tracks: list[TrackRecord] = []
        self._next_id = 0

    def update(self, frame: DetectionFrame) -> DetectionFrame:
        self.tracks, self._next_id = associate(
            self.tracks, frame, self.gate, max_misses=self.max_misses,
            id_start=self._next_id)
        objects = [t.states[-1] for t in self.tracks
                   if t.last_timestamp == frame.timestamp and t.misses == 0]
        objects.sort(key=lambda o: o.track_id)
        return DetectionFrame(timestamp=frame.timestamp,
                              source_id=frame.source_id, objects=objects)
