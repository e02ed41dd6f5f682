#!/usr/bin/env python3
"""Regenerate the shipped data files (sensor presets, asset catalog,
scenario configs, occlusion replay log).

The occlusion replay is checked while being written: the crossing
pedestrian must be hidden from the northeast unit by the parked truck in
every frame, and visible to the southwest unit.
"""

import json
import math
import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from infrasim.infrastructure import SensorSpec, sensor_visibility  # noqa: E402
from infrasim.states import DetectionFrame, ObjectState  # noqa: E402
from infrasim.wire import write_frames  # noqa: E402

DATA = os.path.join(os.path.dirname(__file__), "..", "src", "infrasim", "data")


def dump(path, doc):
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    print(f"wrote {path}")


def sensor(sid, kind, x, y, z, yaw=0.0, fov=None, rng=None, pu="p0"):
    return {"id": sid, "kind": kind, "position": [x, y, z], "yaw": yaw,
            "fov": fov, "range": rng, "processing_unit": pu, "noise": None}


def make_sensor_presets():
    pi = math.pi
    # one pole close to the junction center, everything on one processor
    centralized = [
        sensor("cam_e", "camera", 2.0, 2.0, 4.0, yaw=0.0, fov=pi / 3, pu="pc"),
        sensor("cam_n", "camera", 2.0, 2.0, 4.0, yaw=pi / 2, fov=pi / 3, pu="pc"),
        sensor("cam_w", "camera", 1.5, 2.0, 4.0, yaw=pi, fov=pi / 3, pu="pc"),
        sensor("cam_s", "camera", 2.0, 1.5, 4.0, yaw=-pi / 2, fov=pi / 3, pu="pc"),
        sensor("lidar_c", "lidar", 2.0, 2.0, 4.5, pu="pc"),
    ]
    # two corner units on their own processors
    partially = [
        sensor("lidar_ne", "lidar", 12.0, 12.0, 4.0, pu="p_ne"),
        sensor("cam_ne", "camera", 12.0, 11.0, 4.0,
               yaw=math.atan2(-11.0, -12.0), fov=pi / 3, pu="p_ne"),
        sensor("lidar_sw", "lidar", -12.0, -12.0, 4.0, pu="p_sw"),
        sensor("cam_sw", "camera", -12.0, -11.0, 4.0,
               yaw=math.atan2(11.0, 12.0), fov=pi / 3, pu="p_sw"),
    ]
    # four corner units, camera + radar each
    fully = []
    for i, (sx, sy) in enumerate(((12.0, 12.0), (-12.0, 12.0),
                                  (-12.0, -12.0), (12.0, -12.0))):
        yaw = math.atan2(-sy, -sx)
        fully.append(sensor(f"cam_{i}", "camera", sx, sy, 4.0, yaw=yaw,
                            fov=pi / 3, pu=f"p{i}"))
        fully.append(sensor(f"radar_{i}", "radar", sx, sy, 3.0, yaw=yaw,
                            fov=pi / 2, pu=f"p{i}"))
    dump(os.path.join(DATA, "sensors", "centralized.json"), centralized)
    dump(os.path.join(DATA, "sensors", "partially_distributed.json"), partially)
    dump(os.path.join(DATA, "sensors", "fully_distributed.json"), fully)
    # the two-lidar setup used by the occlusion scenario
    dump(os.path.join(DATA, "sensors", "occlusion_two_iu.json"), [
        sensor("lidar_ne", "lidar", 12.0, 12.0, 3.5, pu="p_ne"),
        sensor("lidar_sw", "lidar", -12.0, -12.0, 3.5, pu="p_sw"),
    ])


def make_assets():
    dump(os.path.join(DATA, "assets.json"), {
        "car": {"sedan": [4.5, 1.8, 1.5], "hatchback": [4.1, 1.75, 1.5],
                "suv": [4.8, 1.9, 1.75]},
        "truck": {"boxtruck": [8.0, 2.5, 3.0], "semitrailer": [14.0, 2.6, 3.8]},
        "bus": {"citybus": [11.0, 2.5, 3.2]},
        "pedestrian": {"adult": [0.5, 0.5, 1.7], "child": [0.4, 0.4, 1.2]},
        "cyclist": {"bicycle": [1.8, 0.6, 1.7]},
    })


def make_occlusion_replay():
    """Parked truck shields a crossing pedestrian from the NE unit only."""
    ne = SensorSpec(id="lidar_ne", kind="lidar", position=(12.0, 12.0, 3.5),
                    processing_unit="p_ne")
    sw = SensorSpec(id="lidar_sw", kind="lidar", position=(-12.0, -12.0, 3.5),
                    processing_unit="p_sw")
    dt = 0.05
    frames = []
    for k in range(120):
        t = k * dt
        truck = ObjectState(track_id="truck", cls="truck",
                            position=(-6.0, 3.0, 0.0), yaw=math.pi / 2,
                            size=(8.0, 2.5, 3.0), speed=0.0, timestamp=t)
        ped = ObjectState(track_id="ped", cls="pedestrian",
                          position=(-12.0, -4.0 + 1.4 * t, 0.0),
                          yaw=math.pi / 2, size=(0.5, 0.5, 1.7), speed=1.4,
                          timestamp=t)
        car = ObjectState(track_id="car", cls="car",
                          position=(2.0 + 8.0 * t, -1.75, 0.0), yaw=0.0,
                          size=(4.5, 1.8, 1.5), speed=8.0, timestamp=t)
        objs = [truck, ped, car]
        seen_ne = sensor_visibility(ne, objs)
        seen_sw = sensor_visibility(sw, objs)
        assert "ped" not in seen_ne, f"t={t}: pedestrian not occluded from NE"
        assert "ped" in seen_sw, f"t={t}: pedestrian not visible to SW"
        assert "truck" in seen_ne and "car" in seen_ne, f"t={t}: NE lost anchors"
        frames.append(DetectionFrame(timestamp=t, source_id="recorded",
                                     objects=objs))
    path = os.path.join(DATA, "replays", "occlusion_crossing.jsonl")
    os.makedirs(os.path.dirname(path), exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        write_frames(fh, frames)
    print(f"wrote {path} ({len(frames)} frames)")


def make_scenarios():
    dump(os.path.join(DATA, "scenarios", "crossing_traffic.json"), {
        "scenario": {
            "map": "../maps/four_approach.json",
            "background_traffic": {
                "rate_per_min": 10.0,
                "class_mix": {"car": 0.8, "truck": 0.15, "bus": 0.05},
            },
            "ego": {"start": [1.75, -80.0], "goal": [1.75, 80.0],
                    "speed": 8.0, "controller": {"enabled": True}},
        },
        "environment": {"weather": "clear", "duration": 30.0, "dt": 0.05,
                        "seed": 7},
    })
    dump(os.path.join(DATA, "scenarios", "occlusion_two_iu.json"), {
        "scenario": {
            "map": "../maps/four_approach.json",
            "replay": "../replays/occlusion_crossing.jsonl",
            "perception": {
                "subject": "iu_0",
                "strategies": ["no_fusion", "late_fusion"],
                "noise": {"pos_sigma": 0.08, "yaw_sigma": 0.02,
                          "size_sigma": 0.03, "miss_rate": 0.05,
                          "false_positive_rate": 0.02},
                "fuse_gate": 2.0,
                "staleness": 0.5,
            },
        },
        "sensors": "../sensors/occlusion_two_iu.json",
        "environment": {"weather": "clear", "duration": 6.0, "dt": 0.05,
                        "seed": 1},
        "channel": {"base_latency": 0.1, "jitter": 0.0, "drop_rate": 0.05},
    })
    dump(os.path.join(DATA, "scenarios", "precrash_red_light_runner.json"), {
        "scenario": {
            "map": "../maps/four_approach.json",
            "ego": {"start": [1.75, -80.0], "goal": [1.75, 80.0],
                    "speed": 8.0, "controller": {"enabled": True}},
            "injections": [
                {"kind": "red_light_runner",
                 "trigger": {"time": 2.0},
                 "params": {"speed": 12.0, "distance": 40.0}},
            ],
        },
        "environment": {"weather": "clear", "duration": 15.0, "dt": 0.05,
                        "seed": 3},
    })


if __name__ == "__main__":
    make_sensor_presets()
    make_assets()
    make_occlusion_replay()
    make_scenarios()
