"""Deterministic fixed-timestep scenario engine.

One step: merge the replay stream, spawn arrivals, fire injections, log
the frame (agents + replayed traffic), run conflict detection and the
perception/fusion stack, then integrate motion. Agents are processed in
track-id order and every random draw comes from a labeled substream of
the root seed, so equal (config, seed) runs are bitwise identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .conflicts import ConflictLogger, detect_conflicts
from .geometry import polyline_length, polyline_point_at, project_to_polyline, rect_intersection_area
from .infrastructure import InfrastructureUnit, SensorSpec, cluster_sensors_into_ius, load_sensor_config
from .perception import V2XMessage, late_fuse, simulate_detections, transmit
from .planning import SpeedController, plan_route, smooth_path
from .rng import substream
from .scenario import ConfigError, ScenarioConfig
from .states import DEFAULT_SIZES, DetectionFrame, ObjectState, SimClock
from .templates import EgoSnapshot, ScriptedActor, build_template_actor
from .world import (
    VectorMap,
    build_waypoint_graph,
    load_map,
    traffic_light_phase,
)
from .wire import read_frames

REPLAY_PREFIX = "replay:"
STOP_MARGIN = 2.0        # meters short of the stop line
COMFORT_DECEL = 3.0      # m/s^2 used for stop-envelope speeds
ACCEL = 2.5              # m/s^2 background-traffic ramp up
DECEL = 4.0              # m/s^2 background-traffic ramp down
BG_HEADWAY = 1.5         # seconds
BG_STANDSTILL = 5.0      # meters
LEADER_LOOKAHEAD = 50.0  # meters
LEADER_LATERAL = 2.0     # meters off the path that still counts as ahead
INJECT_MAX_RETRIES = 20
EGO_ID = "ego"


class HybridFrameError(ValueError):
    pass


def synthesize_hybrid_frame(replay: DetectionFrame,
                            synthetic: list[ObjectState],
                            dt: float,
                            timestamp: float | None = None) -> DetectionFrame:
    """Union of replayed and synthetic objects in one frame.

    Replay ids get a disjoint namespace prefix; the two sides must agree
    on the timestamp within dt/2.
    """
    t = replay.timestamp if timestamp is None else timestamp
    if abs(replay.timestamp - t) > 0.5 * dt + 1e-12:
        raise HybridFrameError(
            f"replay frame at {replay.timestamp} does not align with "
            f"step time {t} (dt = {dt})")
    synth_ids = {o.track_id for o in synthetic}
    objects = list(synthetic)
    for obj in replay.objects:
        new_id = REPLAY_PREFIX + str(obj.track_id)
        if new_id in synth_ids:
            raise HybridFrameError(f"id collision after prefixing: '{new_id}'")
        objects.append(replace(obj, track_id=new_id, timestamp=t))
    objects.sort(key=lambda o: o.track_id)
    return DetectionFrame(timestamp=t, source_id="hybrid", objects=objects)


@dataclass
class _Route:
    path: list[tuple[float, float]]
    length: float
    lane_spans: list[tuple[str, float, float]] = field(default_factory=list)
    stop_points: list[tuple[float, str]] = field(default_factory=list)  # arc, signal id

    def lane_at(self, arc: float) -> str | None:
        for lane_id, a0, a1 in self.lane_spans:
            if a0 <= arc <= a1:
                return lane_id
        return None


@dataclass
class Agent:
    track_id: str
    cls: str
    size: tuple[float, float, float]
    route: _Route
    arc: float
    speed: float
    behavior: str               # "traffic" | "ego" | "script" | "constant"
    cruise_speed: float
    spawn_time: float
    script: ScriptedActor | None = None
    controller: SpeedController | None = None
    headway: float = BG_HEADWAY
    standstill: float = BG_STANDSTILL

    def state(self, t: float) -> ObjectState:
        (x, y), yaw = polyline_point_at(self.route.path, self.arc)
        return ObjectState(track_id=self.track_id, cls=self.cls,
                           position=(x, y, 0.0), yaw=yaw, size=self.size,
                           speed=self.speed, timestamp=t)


@dataclass
class RunResult:
    frames: list[DetectionFrame] = field(default_factory=list)
    conflicts: list = field(default_factory=list)
    journal: list[tuple[float, str]] = field(default_factory=list)
    detection_logs: dict[str, list[DetectionFrame]] = field(default_factory=dict)
    fused_logs: dict[str, list[DetectionFrame]] = field(default_factory=dict)
    peak_objects: int = 0
    steps: int = 0


@dataclass
class _PendingInjection:
    spec: object
    fired: bool = False
    done: bool = False
    retries: int = 0
    actor: ScriptedActor | None = None


class Engine:
    def __init__(self, cfg: ScenarioConfig, vector_map: VectorMap | None = None):
        self.cfg = cfg
        self.map = vector_map if vector_map is not None else load_map(cfg.map_path)
        self.clock = SimClock(dt=cfg.dt)
        self.n_steps = round(cfg.duration / cfg.dt)
        self.agents: dict[str, Agent] = {}
        self.result = RunResult()
        self._conflict_log = ConflictLogger()
        self._bg_counter = 0
        self._inj_counter = 0
        self._deferred: list[tuple[str, str]] = []  # (lane_id, cls)
        self._pending = [_PendingInjection(spec=s) for s in cfg.injections]
        self._lane_rngs = {
            lane.id: substream(cfg.seed, f"traffic:{lane.id}")
            for lane in self.map.lanes
        }
        self._channel_rng = substream(cfg.seed, "channel")
        self._noise_rngs: dict[str, object] = {}
        self._mailbox: list[tuple[float, int, str, DetectionFrame]] = []
        self._msg_seq = 0
        self._received: dict[str, DetectionFrame] = {}

        self._spawn_lanes = self._resolve_spawn_lanes()
        self._replay_frames: list[DetectionFrame] = []
        self._replay_idx = 0
        self._replay_current: DetectionFrame | None = None
        self._replay_hold = cfg.dt  # ghosts persist one inter-frame gap
        if cfg.replay_path:
            with open(cfg.replay_path, "r", encoding="utf-8") as fh:
                self._replay_frames = read_frames(fh)
            gaps = sorted(b.timestamp - a.timestamp for a, b in
                          zip(self._replay_frames, self._replay_frames[1:]))
            if gaps:
                self._replay_hold = gaps[len(gaps) // 2] + 0.5 * cfg.dt

        self.ius: list[InfrastructureUnit] = []
        if cfg.sensors_path:
            sensors = load_sensor_config(cfg.sensors_path)
            self.ius = cluster_sensors_into_ius(sensors)
        if cfg.perception:
            known = {iu.id for iu in self.ius} | {EGO_ID}
            if cfg.perception.subject not in known:
                raise ConfigError(
                    f"perception.subject '{cfg.perception.subject}' is not "
                    f"an infrastructure unit or '{EGO_ID}'")
            for strategy in cfg.perception.strategies:
                self.result.fused_logs[strategy] = []

        if cfg.ego is not None:
            self._init_ego()

    # -- construction helpers ------------------------------------------------

    def _resolve_spawn_lanes(self) -> list[str]:
        cfg_lanes = self.cfg.background.lanes
        if cfg_lanes is not None:
            for lane_id in cfg_lanes:
                if lane_id not in {l.id for l in self.map.lanes}:
                    raise ConfigError(
                        f"background_traffic.lanes: unknown lane '{lane_id}'")
            return list(cfg_lanes)
        return sorted(lane.id for lane in self.map.entry_lanes())

    def _build_lane_route(self, lane_ids: list[str]) -> _Route:
        points: list[tuple[float, float]] = []
        spans: list[tuple[str, float, float]] = []
        stop_points: list[tuple[float, str]] = []
        for lane_id in lane_ids:
            lane = self.map.lane(lane_id)
            line = list(lane.centerline)
            # the bridge from the previous lane end belongs to this span
            span_start = polyline_length(points)
            if points and math.dist(points[-1], line[0]) < 1e-9:
                line = line[1:]
            points.extend(line)
            span_end = polyline_length(points)
            spans.append((lane_id, span_start, span_end))
            signal = self.map.signal_for_lane(lane_id)
            if signal is not None:
                stop_points.append((span_end - STOP_MARGIN, signal.id))
        return _Route(path=points, length=polyline_length(points),
                      lane_spans=spans, stop_points=stop_points)

    def _init_ego(self) -> None:
        ego_cfg = self.cfg.ego
        graph = build_waypoint_graph(self.map, spacing=5.0)
        start = graph.nearest_node(ego_cfg.start)
        goal = graph.nearest_node(ego_cfg.goal)
        node_path, _ = plan_route(graph, start, goal)
        points = [graph.nodes[n] for n in node_path]
        if len(points) >= 3:
            spline = smooth_path(points)
            n = max(2, int(spline.length))
            points = [spline.point(spline.length * i / n) for i in range(n + 1)]
        route = _Route(path=points, length=polyline_length(points))
        # stop lines from the lanes the planned nodes run through
        lane_ids: list[str] = []
        for node in node_path:
            lane_id = node.rsplit(":", 1)[0]
            if lane_id not in lane_ids:
                lane_ids.append(lane_id)
        for lane_id in lane_ids:
            signal = self.map.signal_for_lane(lane_id)
            if signal is not None:
                stop_xy = self.map.lane(lane_id).centerline[-1]
                arc, lateral = project_to_polyline(route.path, stop_xy)
                if lateral < 3.0:
                    route.stop_points.append((arc - STOP_MARGIN, signal.id))
        controller = SpeedController(gains=ego_cfg.gains) \
            if ego_cfg.controller_enabled else None
        self.agents[EGO_ID] = Agent(
            track_id=EGO_ID, cls="car", size=DEFAULT_SIZES["car"],
            route=route, arc=0.0, speed=ego_cfg.speed,
            behavior="ego" if controller else "constant",
            cruise_speed=ego_cfg.speed, spawn_time=0.0,
            controller=controller, headway=ego_cfg.headway,
            standstill=ego_cfg.standstill)

    # -- per-step phases -----------------------------------------------------

    def _advance_replay(self, t: float) -> None:
        half = 0.5 * self.cfg.dt
        while (self._replay_idx < len(self._replay_frames)
               and self._replay_frames[self._replay_idx].timestamp <= t + half):
            self._replay_current = self._replay_frames[self._replay_idx]
            self._replay_idx += 1
        if (self._replay_current is not None
                and t - self._replay_current.timestamp > self._replay_hold):
            self._replay_current = None

    def _replay_frame_at(self, t: float) -> DetectionFrame | None:
        """The live replay frame aligned to t by constant-velocity motion."""
        if self._replay_current is None:
            return None
        age = t - self._replay_current.timestamp
        objects = [o.moved(age) if age > 0 else o
                   for o in self._replay_current.objects]
        return replace(self._replay_current, timestamp=t, objects=objects)

    def _replay_objects(self, t: float) -> list[ObjectState]:
        aligned = self._replay_frame_at(t)
        if aligned is None:
            return []
        return [replace(o, track_id=REPLAY_PREFIX + str(o.track_id))
                for o in aligned.objects]

    def _overlaps_existing(self, candidate: ObjectState,
                           others: list[ObjectState]) -> bool:
        foot = candidate.footprint()
        for other in others:
            if rect_intersection_area(foot, other.footprint()) > 1e-9:
                return True
        return False

    def _spawn_background(self, t: float, current: list[ObjectState]) -> None:
        rate = self.cfg.background.rate_per_min
        if rate <= 0.0 and not self._deferred:
            return
        arrivals: list[tuple[str, str]] = []
        still_deferred: list[tuple[str, str]] = []
        for lane_id, cls in self._deferred:
            arrivals.append((lane_id, cls))
        self._deferred = []
        if rate > 0.0:
            per_step = rate / 60.0 * self.cfg.dt
            mix = self.cfg.background.class_mix
            classes = sorted(mix)
            weights = [mix[c] for c in classes]
            for lane_id in self._spawn_lanes:
                rng = self._lane_rngs[lane_id]
                n = _poisson_draw(per_step, rng)
                for _ in range(n):
                    cls = rng.choices(classes, weights=weights)[0]
                    arrivals.append((lane_id, cls))
        for lane_id, cls in arrivals:
            agent = self._make_background_agent(lane_id, cls, t)
            candidate = agent.state(t)
            if self._overlaps_existing(candidate, current):
                still_deferred.append((lane_id, cls))
                continue
            self.agents[agent.track_id] = agent
            current.append(candidate)
            self.result.journal.append((t, f"spawn {agent.track_id} ({cls}) "
                                           f"on {lane_id}"))
        self._deferred = still_deferred

    def _make_background_agent(self, lane_id: str, cls: str, t: float) -> Agent:
        rng = self._lane_rngs[lane_id]
        lane_ids = [lane_id]
        lane = self.map.lane(lane_id)
        while lane.successors:
            nxt = sorted(lane.successors)[rng.randrange(len(lane.successors))]
            lane_ids.append(nxt)
            lane = self.map.lane(nxt)
        route = self._build_lane_route(lane_ids)
        self._bg_counter += 1
        return Agent(
            track_id=f"bg_{self._bg_counter:06d}", cls=cls,
            size=DEFAULT_SIZES[cls], route=route, arc=0.0,
            speed=self.map.lane(lane_id).speed_limit, behavior="traffic",
            cruise_speed=self.map.lane(lane_id).speed_limit, spawn_time=t)

    def _fire_injections(self, t: float, current: list[ObjectState]) -> None:
        ego = self.agents.get(EGO_ID)
        ego_xy = ego.state(t).xy if ego else None
        for pending in self._pending:
            if pending.done:
                continue
            if not pending.fired:
                if not pending.spec.trigger.fired(t, ego_xy):
                    continue
                pending.fired = True
                if ego is None:
                    pending.done = True
                    continue
                snap = EgoSnapshot(position=ego.state(t).xy,
                                   yaw=ego.state(t).yaw, speed=ego.speed)
                pending.actor = build_template_actor(
                    pending.spec.kind, snap, pending.spec.params)
            actor = pending.actor
            self._inj_counter += 1
            track_id = f"inj_{self._inj_counter:03d}_{pending.spec.kind}"
            route = _Route(path=actor.path,
                           length=polyline_length(actor.path))
            agent = Agent(track_id=track_id, cls=actor.cls, size=actor.size,
                          route=route, arc=0.0,
                          speed=actor.speed_at(0.0), behavior="script",
                          cruise_speed=actor.speed_at(0.0), spawn_time=t,
                          script=actor)
            candidate = agent.state(t)
            if self._overlaps_existing(candidate, current):
                self._inj_counter -= 1
                pending.retries += 1
                if pending.retries > INJECT_MAX_RETRIES:
                    pending.done = True
                    self.result.journal.append(
                        (t, f"injection {pending.spec.kind} abandoned after "
                            f"{pending.retries} blocked placements"))
                continue
            self.agents[track_id] = agent
            current.append(candidate)
            pending.done = True
            self.result.journal.append(
                (t, f"inject {pending.spec.kind} as {track_id}"))

    # -- driving rules -------------------------------------------------------

    def _stop_envelope_speed(self, dist_to_line: float) -> float:
        d = dist_to_line - 0.5
        if d <= 0.0:
            return 0.0
        return math.sqrt(2.0 * COMFORT_DECEL * d)

    def _signal_target(self, agent: Agent, t: float) -> float | None:
        lane_now = agent.route.lane_at(agent.arc)
        for stop_arc, signal_id in agent.route.stop_points:
            if agent.arc > stop_arc + 0.5:
                continue
            signal = next(s for s in self.map.signals if s.id == signal_id)
            if lane_now is not None and lane_now not in signal.controlled_lane_ids:
                continue
            phase = traffic_light_phase(signal, t)
            if phase.upper().startswith("G"):
                continue
            return self._stop_envelope_speed(stop_arc - agent.arc)
        return None

    def _lane_leader_gaps(self, t: float) -> dict[str, float]:
        """Front gap (meters) per traffic agent, from same-lane ordering."""
        by_lane: dict[str, list[Agent]] = {}
        for agent in self.agents.values():
            if agent.behavior != "traffic":
                continue
            lane = agent.route.lane_at(agent.arc)
            if lane is not None:
                by_lane.setdefault(lane, []).append(agent)
        gaps: dict[str, float] = {}
        lane_arc: dict[str, list[tuple[float, Agent]]] = {}
        for lane, members in by_lane.items():
            ordered = []
            for agent in members:
                span = next(s for s in agent.route.lane_spans if s[0] == lane)
                ordered.append((agent.arc - span[1], agent))
            ordered.sort(key=lambda pair: (pair[0], pair[1].track_id))
            lane_arc[lane] = ordered
            for (arc_a, a), (arc_b, b) in zip(ordered, ordered[1:]):
                gaps[a.track_id] = (arc_b - arc_a
                                    - 0.5 * a.size[0] - 0.5 * b.size[0])
        # rearmost vehicle of the successor lane constrains the lane's head
        for lane, ordered in lane_arc.items():
            head_arc, head = ordered[-1]
            span = next(s for s in head.route.lane_spans if s[0] == lane)
            remaining = span[2] - head.arc
            if remaining > LEADER_LOOKAHEAD:
                continue
            idx = [s[0] for s in head.route.lane_spans].index(lane)
            if idx + 1 >= len(head.route.lane_spans):
                continue
            nxt = head.route.lane_spans[idx + 1][0]
            if nxt in lane_arc and lane_arc[nxt]:
                tail_arc, tail = lane_arc[nxt][0]
                gap = (remaining + tail_arc
                       - 0.5 * head.size[0] - 0.5 * tail.size[0])
                gaps[head.track_id] = min(
                    gaps.get(head.track_id, math.inf), gap)
        return gaps

    def _ego_leader_gap(self, ego: Agent, t: float,
                        frame_objects: list[ObjectState]) -> float | None:
        best: float | None = None
        for obj in frame_objects:
            if obj.track_id == ego.track_id:
                continue
            arc, lateral = project_to_polyline(ego.route.path, obj.xy)
            if lateral > LEADER_LATERAL:
                continue
            ahead = arc - ego.arc
            if 0.0 < ahead <= LEADER_LOOKAHEAD:
                gap = ahead - 0.5 * ego.size[0] - 0.5 * obj.size[0]
                if best is None or gap < best:
                    best = gap
        return best

    def _follow_target(self, gap: float | None, agent: Agent) -> float | None:
        if gap is None:
            return None
        return max(0.0, (gap - agent.standstill) / agent.headway)

    # -- stepping ------------------------------------------------------------

    def step(self) -> DetectionFrame:
        t = self.clock.t
        self._advance_replay(t)

        current = [a.state(t) for _, a in sorted(self.agents.items())]
        current.extend(self._replay_objects(t))
        self._spawn_background(t, current)
        self._fire_injections(t, current)

        sim_objects = [a.state(t) for _, a in sorted(self.agents.items())]
        aligned = self._replay_frame_at(t)
        if aligned is not None:
            frame = synthesize_hybrid_frame(aligned, sim_objects, self.cfg.dt)
            frame = replace(frame, source_id="sim")
        else:
            frame = DetectionFrame(timestamp=t, source_id="sim",
                                   objects=sorted(sim_objects,
                                                  key=lambda o: o.track_id))

        events = detect_conflicts(frame.objects, self.cfg.ttc_horizon,
                                  dt=self.cfg.dt)
        self._conflict_log.record_step(events)

        if self.cfg.perception:
            self._run_perception(t, frame)

        self.result.frames.append(frame)
        self.result.peak_objects = max(self.result.peak_objects,
                                       len(frame.objects))
        self.result.steps += 1

        self._integrate(t, frame)
        self.clock.advance()
        return frame

    def _integrate(self, t: float, frame: DetectionFrame) -> None:
        dt = self.cfg.dt
        gaps = self._lane_leader_gaps(t)
        targets: dict[str, float] = {}
        for tid, agent in sorted(self.agents.items()):
            if agent.behavior == "script":
                targets[tid] = agent.script.speed_at(t - agent.spawn_time)
                continue
            if agent.behavior == "constant":
                targets[tid] = agent.speed
                continue
            target = agent.cruise_speed
            stop = self._signal_target(agent, t)
            if stop is not None:
                target = min(target, stop)
            if agent.behavior == "traffic":
                follow = self._follow_target(gaps.get(tid), agent)
            else:
                follow = self._follow_target(
                    self._ego_leader_gap(agent, t, frame.objects), agent)
            if follow is not None:
                target = min(target, follow)
            targets[tid] = target

        finished: list[str] = []
        for tid, agent in sorted(self.agents.items()):
            target = targets[tid]
            if agent.behavior == "script":
                agent.speed = target
            elif agent.behavior == "constant":
                pass
            elif agent.behavior == "ego" and agent.controller is not None:
                accel = agent.controller.step(target, agent.speed, dt)
                agent.speed = max(0.0, agent.speed + accel * dt)
            else:
                delta = target - agent.speed
                step_up = ACCEL * dt
                step_down = DECEL * dt
                agent.speed += min(step_up, max(-step_down, delta))
                agent.speed = max(0.0, agent.speed)
            agent.arc += agent.speed * dt
            if agent.arc >= agent.route.length - 1e-9:
                finished.append(tid)
        for tid in finished:
            del self.agents[tid]
            self.result.journal.append((t + dt, f"despawn {tid} at route end"))

    # -- perception ----------------------------------------------------------

    def _perception_agents(self, t: float) -> list[tuple[str, list[SensorSpec], str,
                                                          tuple[float, float]]]:
        out = []
        for iu in self.ius:
            cx = sum(s.position[0] for s in iu.sensors) / len(iu.sensors)
            cy = sum(s.position[1] for s in iu.sensors) / len(iu.sensors)
            out.append((iu.id, list(iu.sensors), "iu", (cx, cy)))
        ego = self.agents.get(EGO_ID)
        if ego is not None and self.cfg.ego and self.cfg.ego.mount_sensors:
            state = ego.state(t)
            mount = SensorSpec(id="ego_lidar", kind="lidar",
                               position=(state.position[0], state.position[1],
                                         1.8),
                               yaw=state.yaw, range_m=80.0)
            out.append((EGO_ID, [mount], "ego", state.xy))
        return out

    def _run_perception(self, t: float, frame: DetectionFrame) -> None:
        cfg = self.cfg.perception
        agents = self._perception_agents(t)
        subject_pos = None
        for name, _, _, pos in agents:
            if name == cfg.subject:
                subject_pos = pos
        locals_: dict[str, DetectionFrame] = {}
        for name, sensors, kind, pos in agents:
            rng = self._noise_rngs.get(name)
            if rng is None:
                rng = substream(self.cfg.seed, f"noise:{name}")
                self._noise_rngs[name] = rng
            truth = [o for o in frame.objects if o.track_id != name]
            det = simulate_detections(
                sensors, DetectionFrame(t, "truth", truth), cfg.noise, rng,
                name)
            locals_[name] = det
            self.result.detection_logs.setdefault(name, []).append(det)
        for name, sensors, kind, pos in agents:
            if name == cfg.subject or subject_pos is None:
                continue
            subject_kind = "ego" if cfg.subject == EGO_ID else "iu"
            mode = {("iu", "iu"): "I2I", ("iu", "ego"): "I2V",
                    ("ego", "iu"): "V2I", ("ego", "ego"): "V2V"}[
                        (kind, subject_kind)]
            msg = V2XMessage(sender=name, send_time=t, payload=locals_[name],
                             mode=mode)
            dist = math.dist(pos, subject_pos)
            delivery = transmit(msg, self.cfg.channel_for_mode(mode),
                                self._channel_rng, distance=dist)
            if delivery is not None:
                self._msg_seq += 1
                self._mailbox.append((delivery, self._msg_seq, name,
                                      locals_[name]))
        self._mailbox.sort(key=lambda m: (m[0], m[1]))
        while self._mailbox and self._mailbox[0][0] <= t + 1e-12:
            _, _, sender, payload = self._mailbox.pop(0)
            self._received[sender] = payload
        if cfg.subject not in locals_:
            return
        local = locals_[cfg.subject]
        for strategy in cfg.strategies:
            if strategy == "no_fusion":
                fused = local
            else:
                received = [self._received[k] for k in sorted(self._received)]
                fused = late_fuse(local, received, fuse_gate=cfg.fuse_gate,
                                  staleness=cfg.staleness)
            self.result.fused_logs[strategy].append(fused)

    # -- entry point ---------------------------------------------------------

    def run(self) -> RunResult:
        while self.clock.step_index < self.n_steps:
            self.step()
        self.result.conflicts = list(self._conflict_log.events)
        return self.result


def _poisson_draw(lam: float, rng) -> int:
    if lam <= 0.0:
        return 0
    limit = math.exp(-lam)
    k = 0
    p = 1.0
    while True:
        p *= rng.random()
        if p <= limit:
            return k
        k += 1


def run_scenario(cfg: ScenarioConfig,
                 vector_map: VectorMap | None = None) -> RunResult:
    return Engine(cfg, vector_map=vector_map).run()
