"""Object selector: name/color filtering and voxel aggregation of the target."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Sequence, Tuple

import numpy as np

from .demo import Color, Demonstration, Position, VoxelIndex, voxel_index
from .exceptions import EmptyHistogram, MissingColorData, NoTargetObserved, UnknownVoxel
from .language import InstructionFoa

LOW_VALUE = 0.2
LOW_SATURATION = 0.2
HIGH_VALUE = 0.8
GRAY_SPLIT = 0.5

# (lower hue bound, label); red wraps around 0
_HUE_BANDS = (
    (30.0, Color.RED),
    (90.0, Color.YELLOW),
    (150.0, Color.GREEN),
    (210.0, Color.CYAN),
    (270.0, Color.BLUE),
    (330.0, Color.MAGENTA),
    (360.0, Color.RED),
)


def classify_hsv(h: float, s: float, v: float) -> Color:
    """Color name of a single HSV pixel (hue in degrees, s and v in [0, 1])."""
    if v < LOW_VALUE:
        return Color.BLACK
    if s < LOW_SATURATION:
        if v >= HIGH_VALUE:
            return Color.WHITE
        return Color.BLACK if v < GRAY_SPLIT else Color.WHITE
    h = h % 360.0
    for upper, label in _HUE_BANDS:
        if h < upper:
            return label
    return Color.RED  # unreachable after the modulo


def classify_dominant_color(hist) -> Color:
    """Label with the largest pixel count over a ``(h, s, v, count)`` histogram.

    Ties go to the label listed first in ``Color``.
    """
    if not hist:
        raise EmptyHistogram("color histogram is empty")
    votes = dict.fromkeys(Color, 0)
    for h, s, v, n in hist:
        votes[classify_hsv(h, s, v)] += n
    return max(Color, key=lambda c: votes[c])  # max keeps the first maximal item


def detection_color(det):
    if det.color is not None:
        return det.color
    if det.color_histogram:
        return classify_dominant_color(det.color_histogram)
    return None


def select_targets(demo: Demonstration, foa: InstructionFoa):
    """Observations ``(snapshot time, position)`` passing the name and attribute filters."""
    out = []
    for t, detections in demo.snapshots():
        for det in detections:
            if det.class_name != foa.target_name:
                continue
            if foa.attribute is not None:
                color = detection_color(det)
                if color is None:
                    raise MissingColorData(
                        f"{det.class_name!r} detection at t={t} has no color data")
                if color != foa.attribute:
                    continue
            out.append((t, det.position))
    if not out:
        desc = foa.target_name if foa.attribute is None else f"{foa.attribute.value} {foa.target_name}"
        raise NoTargetObserved(f"no {desc} observed in the demonstration")
    return out


def lower_median(values: Sequence[float]) -> float:
    s = sorted(values)
    return s[(len(s) - 1) // 2]


@dataclass(frozen=True)
class VoxelAggregate:
    idx: VoxelIndex
    observations: Tuple[Tuple[float, Position], ...]
    median: Position

    @property
    def count(self) -> int:
        return len(self.observations)


@dataclass(frozen=True)
class TargetLocationFoa:
    voxels: Mapping[VoxelIndex, VoxelAggregate]
    snapshot_times: Tuple[float, ...]

    def __hash__(self):
        return hash((tuple(self.voxels), self.snapshot_times))


def build_location_foa(targets, snapshot_times, cell_size: float) -> TargetLocationFoa:
    """Group target observations by voxel and take the componentwise median.

    No identity tracking between snapshots is attempted: every observation is
    attributed to the voxel it falls in.
    """
    if not targets:
        raise NoTargetObserved("no target observations to aggregate")
    groups = defaultdict(list)
    for t, p in targets:
        groups[voxel_index(p, cell_size)].append((t, tuple(p)))
    voxels = {}
    for idx in sorted(groups):
        obs = tuple(sorted(groups[idx]))
        median = tuple(lower_median([p[k] for _, p in obs]) for k in range(len(idx)))
        voxels[idx] = VoxelAggregate(idx=idx, observations=obs, median=median)
    return TargetLocationFoa(voxels=MappingProxyType(voxels), snapshot_times=tuple(snapshot_times))


def existence_series(foa: TargetLocationFoa, idx: VoxelIndex) -> np.ndarray:
    """0/1 presence of the target in voxel ``idx`` at every snapshot time."""
    idx = tuple(idx)
    if idx not in foa.voxels:
        raise UnknownVoxel(idx)
    seen = {t for t, _ in foa.voxels[idx].observations}
    return np.array([1 if t in seen else 0 for t in foa.snapshot_times], dtype=np.int8)
