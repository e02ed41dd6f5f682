"""Frame-log wire format and conflict CSV.

One JSON object per line:
    {"t": ..., "source": ..., "objects": [
        {"id": ..., "class": ..., "x": ..., "y": ..., "z": ..., "yaw": ...,
         "l": ..., "w": ..., "h": ..., "speed": ..., "conf": ...}]}

All numeric fields are meters / seconds / radians. Python's repr-based
float serialization makes round trips exact and logs byte-stable.
"""

from __future__ import annotations

import csv
import json
from typing import Iterable, TextIO

from .states import ConflictEvent, DetectionFrame, ObjectState

CONFLICT_CSV_HEADER = ["time", "pair_a", "pair_b", "kind", "ttc", "min_distance"]


class WireFormatError(ValueError):
    """A frame-log line that does not match the wire format."""


def object_to_json(obj: ObjectState) -> dict:
    rec = {
        "class": obj.cls,
        "x": obj.position[0],
        "y": obj.position[1],
        "z": obj.position[2],
        "yaw": obj.yaw,
        "l": obj.size[0],
        "w": obj.size[1],
        "h": obj.size[2],
        "speed": obj.speed,
        "conf": obj.conf,
    }
    if obj.track_id is not None:
        rec["id"] = obj.track_id
    return rec


def object_from_json(rec: dict, timestamp: float) -> ObjectState:
    try:
        cls = rec["class"]
        size = (float(rec["l"]), float(rec["w"]), float(rec["h"]))
        obj = ObjectState(
            track_id=rec.get("id"),
            cls=cls,
            position=(float(rec["x"]), float(rec["y"]), float(rec["z"])),
            yaw=float(rec["yaw"]),
            size=size,
            speed=float(rec["speed"]),
            timestamp=timestamp,
            conf=float(rec.get("conf", 1.0)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise WireFormatError(f"bad object record: {exc}") from exc
    if min(size) <= 0.0:
        raise WireFormatError(f"non-positive size {size}")
    if obj.speed < 0.0:
        raise WireFormatError(f"negative speed {obj.speed}")
    if not 0.0 <= obj.conf <= 1.0:
        raise WireFormatError(f"confidence {obj.conf} outside [0, 1]")
    return obj


def frame_to_line(frame: DetectionFrame) -> str:
    doc = {
        "t": frame.timestamp,
        "source": frame.source_id,
        "objects": [object_to_json(o) for o in frame.objects],
    }
    return json.dumps(doc, separators=(",", ":"))


def frame_from_line(line: str) -> DetectionFrame:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise WireFormatError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict) or "t" not in doc or "source" not in doc:
        raise WireFormatError("frame must be an object with 't' and 'source'")
    t = float(doc["t"])
    objects = [object_from_json(rec, t) for rec in doc.get("objects", [])]
    return DetectionFrame(timestamp=t, source_id=str(doc["source"]), objects=objects)


def write_frames(fh: TextIO, frames: Iterable[DetectionFrame]) -> int:
    n = 0
    for frame in frames:
        fh.write(frame_to_line(frame))
        fh.write("\n")
        n += 1
    return n


def read_frames(fh: TextIO) -> list[DetectionFrame]:
    """Strict reader: raises on the first malformed line."""
    return [frame_from_line(line) for line in fh if line.strip()]


def write_conflicts_csv(fh: TextIO, events: Iterable[ConflictEvent]) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CONFLICT_CSV_HEADER)
    for ev in events:
        writer.writerow([
            repr(ev.time),
            ev.pair[0],
            ev.pair[1],
            ev.kind,
            "" if ev.ttc is None else repr(ev.ttc),
            repr(ev.min_distance),
        ])


def read_conflicts_csv(fh: TextIO) -> list[ConflictEvent]:
    reader = csv.reader(fh)
    header = next(reader, None)
    if header != CONFLICT_CSV_HEADER:
        raise WireFormatError(f"unexpected conflict CSV header: {header}")
    out = []
    for row in reader:
        out.append(ConflictEvent(
            time=float(row[0]),
            pair=(row[1], row[2]),
            kind=row[3],
            ttc=None if row[4] == "" else float(row[4]),
            min_distance=float(row[5]),
        ))
    return out
