"""Demonstration domain types, the JSON log format and voxel-grid arithmetic."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

from .exceptions import SchemaError, ValidationError

Position = Tuple[float, ...]
VoxelIndex = Tuple[int, ...]
HistogramBin = Tuple[float, float, float, int]


class Color(str, Enum):
    # declaration order is the tie-break order for dominant-color voting
    RED = "red"
    YELLOW = "yellow"
    GREEN = "green"
    CYAN = "cyan"
    BLUE = "blue"
    MAGENTA = "magenta"
    BLACK = "black"
    WHITE = "white"


class Hand(str, Enum):
    LEFT = "left"
    RIGHT = "right"


class Kind(str, Enum):
    GRASP = "grasp"
    RELEASE = "release"


@dataclass(frozen=True)
class Detection:
    class_name: str
    position: Position
    color: Optional[Color] = None
    color_histogram: Optional[Tuple[HistogramBin, ...]] = None


@dataclass(frozen=True)
class Frame:
    """One time step. ``detections is None`` means no snapshot was taken at ``t``;
    an empty tuple means a snapshot was taken and nothing was detected."""

    t: float
    detections: Optional[Tuple[Detection, ...]] = None
    left_hand: Optional[Position] = None
    right_hand: Optional[Position] = None

    def hand(self, hand: Hand) -> Optional[Position]:
        return self.left_hand if hand is Hand.LEFT else self.right_hand


@dataclass(frozen=True)
class GroundTruthEvent:
    t: float
    kind: Kind
    hand: Hand
    position: Position


@dataclass(frozen=True)
class Demonstration:
    dim: int
    cell_size: float
    transcript: str
    frames: Tuple[Frame, ...]
    ground_truth: Optional[Tuple[GroundTruthEvent, ...]] = None

    @cached_property
    def snapshot_times(self) -> Tuple[float, ...]:
        return tuple(f.t for f in self.frames if f.detections is not None)

    def snapshots(self):
        """Yield ``(t, detections)`` for every frame carrying a snapshot."""
        for f in self.frames:
            if f.detections is not None:
                yield f.t, f.detections

    def hand_samples(self, hand: Hand):
        """Time-ordered ``(t, position)`` samples of one hand."""
        return [(f.t, f.hand(hand)) for f in self.frames if f.hand(hand) is not None]

    @property
    def duration(self) -> float:
        return self.frames[-1].t - self.frames[0].t


# ---------------------------------------------------------------------------
# voxel grid

def voxel_index(p: Sequence[float], cell_size: float) -> VoxelIndex:
    """Index of the grid cell containing ``p``; the grid is anchored at the origin."""
    return tuple(math.floor(c / cell_size) for c in p)


def voxel_center(idx: Sequence[int], cell_size: float) -> Position:
    return tuple((i + 0.5) * cell_size for i in idx)


# ---------------------------------------------------------------------------
# loading

_TOP_KEYS = {"dim", "cell_size", "transcript", "frames", "ground_truth"}
_TOP_REQUIRED = {"dim", "cell_size", "transcript", "frames"}
_FRAME_KEYS = {"t", "detections", "left_hand", "right_hand"}
_DETECTION_KEYS = {"class", "position", "color", "color_histogram"}
_GT_KEYS = {"t", "kind", "hand", "position"}


def _is_number(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool)


def _check_keys(obj, allowed, required, path):
    if not isinstance(obj, dict):
        raise SchemaError(f"{path or 'document'}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise SchemaError(f"{path or 'document'}: unknown keys {unknown}")
    missing = sorted(required - set(obj))
    if missing:
        raise SchemaError(f"{path or 'document'}: missing keys {missing}")


def _number(x, path) -> float:
    if not _is_number(x):
        raise SchemaError(f"{path}: expected a number")
    return float(x)


def _position(x, dim, path) -> Position:
    if not isinstance(x, list) or not all(_is_number(c) for c in x):
        raise SchemaError(f"{path}: expected an array of numbers")
    if len(x) != dim:
        raise ValidationError(f"expected {dim} coordinates, got {len(x)}", path)
    p = tuple(float(c) for c in x)
    if not all(math.isfinite(c) for c in p):
        raise ValidationError("coordinates must be finite", path)
    return p


def _histogram(x, path) -> Tuple[HistogramBin, ...]:
    if not isinstance(x, list):
        raise SchemaError(f"{path}: expected an array")
    if not x:
        raise ValidationError("histogram must not be empty", path)
    bins = []
    for k, b in enumerate(x):
        bp = f"{path}[{k}]"
        if not isinstance(b, list) or len(b) != 4 or not all(_is_number(c) for c in b):
            raise SchemaError(f"{bp}: expected [hue, saturation, value, count]")
        h, s, v, n = b
        if not 0.0 <= h < 360.0:
            raise ValidationError("hue must be in [0, 360)", bp)
        if not (0.0 <= s <= 1.0 and 0.0 <= v <= 1.0):
            raise ValidationError("saturation and value must be in [0, 1]", bp)
        if n != int(n) or n < 1:
            raise ValidationError("count must be an integer >= 1", bp)
        bins.append((float(h), float(s), float(v), int(n)))
    return tuple(bins)


def _enum(cls, x, path):
    if not isinstance(x, str):
        raise SchemaError(f"{path}: expected a string")
    try:
        return cls(x)
    except ValueError:
        allowed = [m.value for m in cls]
        raise ValidationError(f"{x!r} is not one of {allowed}", path) from None


def _detection(d, dim, path) -> Detection:
    _check_keys(d, _DETECTION_KEYS, {"class", "position"}, path)
    name = d["class"]
    if not isinstance(name, str):
        raise SchemaError(f"{path}.class: expected a string")
    if not name.strip():
        raise ValidationError("class name must be non-empty", f"{path}.class")
    color = d.get("color")
    hist = d.get("color_histogram")
    return Detection(
        class_name=name,
        position=_position(d["position"], dim, f"{path}.position"),
        color=None if color is None else _enum(Color, color, f"{path}.color"),
        color_histogram=None if hist is None else _histogram(hist, f"{path}.color_histogram"),
    )


def _frame(f, dim, path) -> Frame:
    _check_keys(f, _FRAME_KEYS, {"t"}, path)
    t = _number(f["t"], f"{path}.t")
    if not math.isfinite(t) or t < 0:
        raise ValidationError("t must be finite and non-negative", f"{path}.t")
    dets = f.get("detections")
    if dets is not None:
        if not isinstance(dets, list):
            raise SchemaError(f"{path}.detections: expected an array")
        dets = tuple(_detection(d, dim, f"{path}.detections[{k}]") for k, d in enumerate(dets))
    left = f.get("left_hand")
    right = f.get("right_hand")
    frame = Frame(
        t=t,
        detections=dets,
        left_hand=None if left is None else _position(left, dim, f"{path}.left_hand"),
        right_hand=None if right is None else _position(right, dim, f"{path}.right_hand"),
    )
    if frame.detections is None and frame.left_hand is None and frame.right_hand is None:
        raise ValidationError("frame carries no channel", path)
    return frame


def _merge_frames(frames, path="frames"):
    merged = []
    for f in sorted(frames, key=lambda f: f.t):
        if merged and merged[-1].t == f.t:
            prev = merged[-1]
            fields = {}
            for name in ("detections", "left_hand", "right_hand"):
                a, b = getattr(prev, name), getattr(f, name)
                if a is not None and b is not None:
                    raise ValidationError(f"channel {name!r} appears twice at t={f.t}", path)
                fields[name] = a if a is not None else b
            merged[-1] = Frame(t=f.t, **fields)
        else:
            merged.append(f)
    return tuple(merged)


def demonstration_from_dict(doc) -> Demonstration:
    _check_keys(doc, _TOP_KEYS, _TOP_REQUIRED, "")
    dim = doc["dim"]
    if not isinstance(dim, int) or isinstance(dim, bool):
        raise SchemaError("dim: expected an integer")
    if dim not in (2, 3):
        raise ValidationError("dim must be 2 or 3", "dim")
    cell = _number(doc["cell_size"], "cell_size")
    if not (math.isfinite(cell) and cell > 0):
        raise ValidationError("cell_size must be positive", "cell_size")
    transcript = doc["transcript"]
    if not isinstance(transcript, str):
        raise SchemaError("transcript: expected a string")
    if not isinstance(doc["frames"], list):
        raise SchemaError("frames: expected an array")
    if not doc["frames"]:
        raise ValidationError("no frames", "frames")

    frames = _merge_frames(_frame(f, dim, f"frames[{k}]") for k, f in enumerate(doc["frames"]))
    if not any(f.detections is not None for f in frames):
        raise ValidationError("no frame carries a detection snapshot", "frames")
    if not any(f.left_hand is not None or f.right_hand is not None for f in frames):
        raise ValidationError("no frame carries a hand sample", "frames")

    gt = doc.get("ground_truth")
    if gt is not None:
        if not isinstance(gt, list):
            raise SchemaError("ground_truth: expected an array")
        events = []
        t0, t1 = frames[0].t, frames[-1].t
        for k, e in enumerate(gt):
            path = f"ground_truth[{k}]"
            _check_keys(e, _GT_KEYS, _GT_KEYS, path)
            t = _number(e["t"], f"{path}.t")
            if not t0 <= t <= t1:
                raise ValidationError(f"t={t} outside demonstration span [{t0}, {t1}]", f"{path}.t")
            events.append(GroundTruthEvent(
                t=t,
                kind=_enum(Kind, e["kind"], f"{path}.kind"),
                hand=_enum(Hand, e["hand"], f"{path}.hand"),
                position=_position(e["position"], dim, f"{path}.position"),
            ))
        gt = tuple(events)
    return Demonstration(dim=dim, cell_size=cell, transcript=transcript, frames=frames, ground_truth=gt)


def load_demonstration(document: Union[bytes, str]) -> Demonstration:
    """Parse and validate a demonstration log.

    Raises
    ------
    SchemaError
        The document is not JSON or does not follow the log schema.
    ValidationError
        A domain invariant is violated; ``err.path`` names the offending field.
    """
    try:
        doc = json.loads(document)
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise SchemaError(f"not a JSON document: {exc}") from None
    return demonstration_from_dict(doc)


def read_demonstration(path) -> Demonstration:
    with open(path, "rb") as fh:
        return load_demonstration(fh.read())


# ---------------------------------------------------------------------------
# serialization

def _detection_to_dict(d: Detection) -> dict:
    out = {"class": d.class_name, "position": list(d.position)}
    if d.color is not None:
        out["color"] = d.color.value
    if d.color_histogram is not None:
        out["color_histogram"] = [list(b) for b in d.color_histogram]
    return out


def demonstration_to_dict(demo: Demonstration) -> dict:
    frames = []
    for f in demo.frames:
        fd = {"t": f.t}
        if f.detections is not None:
            fd["detections"] = [_detection_to_dict(d) for d in f.detections]
        if f.left_hand is not None:
            fd["left_hand"] = list(f.left_hand)
        if f.right_hand is not None:
            fd["right_hand"] = list(f.right_hand)
        frames.append(fd)
    doc = {
        "dim": demo.dim,
        "cell_size": demo.cell_size,
        "transcript": demo.transcript,
        "frames": frames,
    }
    if demo.ground_truth is not None:
        doc["ground_truth"] = [
            {"t": e.t, "kind": e.kind.value, "hand": e.hand.value, "position": list(e.position)}
            for e in demo.ground_truth
        ]
    return doc


def dump_demonstration(demo: Demonstration) -> str:
    return json.dumps(demonstration_to_dict(demo), indent=1) + "\n"
