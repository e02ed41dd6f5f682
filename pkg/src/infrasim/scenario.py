"""Scenario configuration: the run-defining JSON document.

Top-level keys mirror the config split used throughout: ``scenario``
(traffic, ego, injections, replay, perception), ``sensors`` (path to a
sensor config), ``environment`` (weather tag, duration, dt, seed) and
``channel``. Weather is metadata only.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

from .perception import ChannelModel, NoiseModel
from .planning import PIDGains


class ConfigError(ValueError):
    pass


@dataclass
class TriggerSpec:
    """Fires at a time, or when the ego gets within reach of a point."""

    time: float | None = None
    ego_point: tuple[float, float] | None = None
    ego_within: float = 30.0

    def fired(self, t: float, ego_xy: tuple[float, float] | None) -> bool:
        if self.time is not None and t >= self.time:
            return True
        if self.ego_point is not None and ego_xy is not None:
            dx = ego_xy[0] - self.ego_point[0]
            dy = ego_xy[1] - self.ego_point[1]
            if (dx * dx + dy * dy) ** 0.5 <= self.ego_within:
                return True
        return False


@dataclass
class InjectionSpec:
    kind: str
    trigger: TriggerSpec
    params: dict = field(default_factory=dict)


@dataclass
class EgoSpec:
    start: tuple[float, float]
    goal: tuple[float, float]
    speed: float = 8.0
    controller_enabled: bool = True
    gains: PIDGains = field(default_factory=lambda: PIDGains(
        kp=0.8, ki=0.05, kd=0.0, integral_limit=3.0, output_limit=3.0))
    headway: float = 1.8       # seconds kept behind a leader
    standstill: float = 6.0    # meters kept at rest
    mount_sensors: bool = False


@dataclass
class BackgroundTraffic:
    rate_per_min: float = 0.0      # arrivals per approach lane
    class_mix: dict[str, float] = field(default_factory=lambda: {"car": 1.0})
    lanes: list[str] | None = None  # default: all entry lanes


@dataclass
class PerceptionSpec:
    subject: str = ""
    strategies: list[str] = field(default_factory=lambda: ["late_fusion"])
    noise: NoiseModel = field(default_factory=NoiseModel)
    fuse_gate: float = 2.0
    staleness: float = 0.5


@dataclass
class ScenarioConfig:
    map_path: str
    duration: float
    dt: float
    seed: int
    weather: str = "clear"
    background: BackgroundTraffic = field(default_factory=BackgroundTraffic)
    ego: EgoSpec | None = None
    injections: list[InjectionSpec] = field(default_factory=list)
    replay_path: str | None = None
    sensors_path: str | None = None
    perception: PerceptionSpec | None = None
    channel: ChannelModel = field(default_factory=ChannelModel)
    channel_modes: dict[str, ChannelModel] = field(default_factory=dict)
    ttc_horizon: float = 5.0

    def channel_for_mode(self, mode: str) -> ChannelModel:
        return self.channel_modes.get(mode, self.channel)


VALID_TEMPLATE_KINDS = (
    "red_light_runner", "left_turn_across_path", "pedestrian_crossing",
    "rear_end_decel", "lateral_cut_in", "opposite_direction_drift",
)

MAX_TEMPLATE_SPEED = 40.0  # m/s physical bound on template parameters


def _require(doc: dict, key: str, where: str):
    if key not in doc:
        raise ConfigError(f"{where}: missing '{key}'")
    return doc[key]


def _number(doc: dict, key: str, where: str, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError(f"{where}: missing '{key}'")
        return default
    value = doc[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{where}.{key}: expected a number, got {value!r}")
    return float(value)


def _parse_trigger(doc: dict, where: str) -> TriggerSpec:
    trig = TriggerSpec()
    if "time" in doc:
        trig.time = _number(doc, "time", where)
    if "ego_point" in doc:
        pt = doc["ego_point"]
        if not isinstance(pt, (list, tuple)) or len(pt) != 2:
            raise ConfigError(f"{where}.ego_point: expected [x, y]")
        trig.ego_point = (float(pt[0]), float(pt[1]))
        trig.ego_within = _number(doc, "within", where, default=30.0)
    if trig.time is None and trig.ego_point is None:
        raise ConfigError(f"{where}: trigger needs 'time' or 'ego_point'")
    return trig


def _parse_injection(doc: dict, where: str) -> InjectionSpec:
    kind = _require(doc, "kind", where)
    if kind not in VALID_TEMPLATE_KINDS:
        raise ConfigError(f"{where}.kind: unknown template '{kind}'")
    params = doc.get("params", {})
    for key, value in params.items():
        if key.endswith("speed") and isinstance(value, (int, float)):
            if not 0.0 <= float(value) <= MAX_TEMPLATE_SPEED:
                raise ConfigError(
                    f"{where}.params.{key}: speed {value} outside "
                    f"[0, {MAX_TEMPLATE_SPEED}] m/s")
    return InjectionSpec(kind=kind,
                         trigger=_parse_trigger(_require(doc, "trigger", where),
                                                f"{where}.trigger"),
                         params=dict(params))


def _parse_channel(doc: dict, where: str) -> ChannelModel:
    return ChannelModel(
        base_latency=_number(doc, "base_latency", where, default=0.0),
        jitter=_number(doc, "jitter", where, default=0.0),
        drop_rate=_number(doc, "drop_rate", where, default=0.0),
        range_limit=(float(doc["range_limit"])
                     if doc.get("range_limit") is not None else None),
    )


def _parse_noise(doc: dict, where: str) -> NoiseModel:
    return NoiseModel(
        pos_sigma=_number(doc, "pos_sigma", where, default=0.0),
        yaw_sigma=_number(doc, "yaw_sigma", where, default=0.0),
        size_sigma=_number(doc, "size_sigma", where, default=0.0),
        miss_rate=_number(doc, "miss_rate", where, default=0.0),
        false_positive_rate=_number(doc, "false_positive_rate", where,
                                    default=0.0),
        conf_floor=_number(doc, "conf_floor", where, default=0.05),
    )


def scenario_from_dict(doc: dict, base_dir: str = ".") -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: top level must be a JSON object")
    scen = doc.get("scenario", {})
    env = doc.get("environment", {})

    def resolve(path: str | None) -> str | None:
        if path is None:
            return None
        return path if os.path.isabs(path) else os.path.join(base_dir, path)

    map_path = resolve(_require(scen, "map", "scenario"))
    duration = _number(env, "duration", "environment")
    dt = _number(env, "dt", "environment", default=0.05)
    if dt <= 0.0:
        raise ConfigError("environment.dt: must be > 0")
    if duration <= 0.0:
        raise ConfigError("environment.duration: must be > 0")
    seed = env.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        raise ConfigError("environment.seed: expected an integer")

    background = BackgroundTraffic()
    if "background_traffic" in scen:
        bg = scen["background_traffic"]
        background = BackgroundTraffic(
            rate_per_min=_number(bg, "rate_per_min", "background_traffic",
                                 default=0.0),
            class_mix=dict(bg.get("class_mix", {"car": 1.0})),
            lanes=list(bg["lanes"]) if bg.get("lanes") else None,
        )
        if background.rate_per_min < 0.0:
            raise ConfigError("background_traffic.rate_per_min: must be >= 0")
        for cls, weight in background.class_mix.items():
            if weight < 0.0:
                raise ConfigError(
                    f"background_traffic.class_mix.{cls}: must be >= 0")

    ego = None
    if "ego" in scen and scen["ego"] is not None:
        edoc = scen["ego"]
        where = "scenario.ego"
        start = _require(edoc, "start", where)
        goal = _require(edoc, "goal", where)
        ctrl = edoc.get("controller", {})
        gains = PIDGains(
            kp=_number(ctrl, "kp", where, default=0.8),
            ki=_number(ctrl, "ki", where, default=0.05),
            kd=_number(ctrl, "kd", where, default=0.0),
            integral_limit=_number(ctrl, "integral_limit", where, default=3.0),
            output_limit=_number(ctrl, "a_max", where, default=3.0),
        )
        ego = EgoSpec(
            start=(float(start[0]), float(start[1])),
            goal=(float(goal[0]), float(goal[1])),
            speed=_number(edoc, "speed", where, default=8.0),
            controller_enabled=bool(ctrl.get("enabled", True)),
            gains=gains,
            headway=_number(ctrl, "headway", where, default=1.8),
            standstill=_number(ctrl, "standstill", where, default=6.0),
            mount_sensors=bool(edoc.get("mount_sensors", False)),
        )

    injections = [
        _parse_injection(d, f"scenario.injections[{i}]")
        for i, d in enumerate(scen.get("injections", []))
    ]
    if injections and ego is None:
        raise ConfigError("scenario.injections: templates require an ego")

    perception = None
    if "perception" in scen and scen["perception"] is not None:
        pdoc = scen["perception"]
        strategies = list(pdoc.get("strategies", ["late_fusion"]))
        for strat in strategies:
            if strat not in ("no_fusion", "late_fusion"):
                raise ConfigError(
                    f"scenario.perception.strategies: unknown '{strat}'")
        perception = PerceptionSpec(
            subject=str(_require(pdoc, "subject", "scenario.perception")),
            strategies=strategies,
            noise=_parse_noise(pdoc.get("noise", {}),
                               "scenario.perception.noise"),
            fuse_gate=_number(pdoc, "fuse_gate", "scenario.perception",
                              default=2.0),
            staleness=_number(pdoc, "staleness", "scenario.perception",
                              default=0.5),
        )

    channel_doc = doc.get("channel", {})
    channel = _parse_channel(channel_doc, "channel")
    channel_modes = {
        mode: _parse_channel(sub, f"channel.modes.{mode}")
        for mode, sub in channel_doc.get("modes", {}).items()
    }

    return ScenarioConfig(
        map_path=map_path,
        duration=duration,
        dt=dt,
        seed=seed,
        weather=str(env.get("weather", "clear")),
        background=background,
        ego=ego,
        injections=injections,
        replay_path=resolve(scen.get("replay")),
        sensors_path=resolve(doc.get("sensors")),
        perception=perception,
        channel=channel,
        channel_modes=channel_modes,
        ttc_horizon=_number(scen, "ttc_horizon", "scenario", default=5.0),
    )


def load_scenario(path) -> ScenarioConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path}: invalid JSON at line {exc.lineno}")
    return scenario_from_dict(doc, base_dir=os.path.dirname(os.path.abspath(path)))
