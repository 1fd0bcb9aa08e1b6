"""Grasp-release detector.

For every voxel of the target-location filter and every hand, the candidate
time is the global argmin over the hand-to-object distance. Candidates whose
minimum distance exceeds the gate are dropped; the rest are classified by
comparing the smoothed existence probability of the target before and after
the candidate time.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .demo import Demonstration, Hand, Kind, Position, VoxelIndex
from .exceptions import ConfigError, NoHandSamples
from .objects import TargetLocationFoa, existence_series

DEFAULT_DISTANCE_THRESHOLD_3D = 0.2


class Label(str, Enum):
    GRASP = "grasp"
    RELEASE = "release"
    UNRELATED = "unrelated"


@dataclass(frozen=True)
class DetectorParams:
    """Detector settings.

    ``distance_threshold=None`` means the 3-D default of 0.2 m; it must be set
    explicitly for 2-D (pixel) demonstrations.
    """

    distance_threshold: Optional[float] = None
    existence_criterion: float = 0.5
    smoothing_fraction: float = 0.1

    def __post_init__(self):
        if self.distance_threshold is not None and not self.distance_threshold > 0:
            raise ConfigError("distance_threshold must be > 0")
        if not 0.0 < self.existence_criterion < 1.0:
            raise ConfigError("existence_criterion must be in (0, 1)")
        if not 0.0 < self.smoothing_fraction <= 1.0:
            raise ConfigError("smoothing_fraction must be in (0, 1]")

    def resolved(self, dim: int) -> "DetectorParams":
        if self.distance_threshold is not None:
            return self
        if dim == 2:
            raise ConfigError("distance_threshold is required for 2-D demonstrations")
        return DetectorParams(DEFAULT_DISTANCE_THRESHOLD_3D, self.existence_criterion,
                              self.smoothing_fraction)

    def to_dict(self) -> dict:
        return {
            "distance_threshold": self.distance_threshold,
            "existence_criterion": self.existence_criterion,
            "smoothing_fraction": self.smoothing_fraction,
        }


@dataclass(frozen=True)
class Candidate:
    voxel: VoxelIndex
    hand: Hand
    t_min: float
    min_distance: float


@dataclass(frozen=True)
class Classification:
    label: Label
    before_mean: float
    after_mean: float


@dataclass(frozen=True)
class ManipulationEvent:
    kind: Kind
    t: float
    voxel: VoxelIndex
    voxel_median: Position
    hand: Hand
    min_distance: float
    before_mean: float
    after_mean: float

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "t": self.t,
            "voxel": list(self.voxel),
            "voxel_median": list(self.voxel_median),
            "hand": self.hand.value,
            "min_distance": self.min_distance,
            "before_mean": self.before_mean,
            "after_mean": self.after_mean,
        }

    @classmethod
    def from_dict(cls, d) -> "ManipulationEvent":
        return cls(
            kind=Kind(d["kind"]), t=d["t"], voxel=tuple(d["voxel"]),
            voxel_median=tuple(d["voxel_median"]), hand=Hand(d["hand"]),
            min_distance=d["min_distance"], before_mean=d["before_mean"],
            after_mean=d["after_mean"],
        )


@dataclass(frozen=True)
class Rejection:
    """A candidate that did not become an event, kept for the report."""

    voxel: VoxelIndex
    hand: Hand
    t_min: float
    min_distance: float
    reason: str  # "distance", "unrelated" or "arbitration"
    before_mean: Optional[float] = None
    after_mean: Optional[float] = None

    def to_dict(self) -> dict:
        return {
            "voxel": list(self.voxel),
            "hand": self.hand.value,
            "t_min": self.t_min,
            "min_distance": self.min_distance,
            "reason": self.reason,
            "before_mean": self.before_mean,
            "after_mean": self.after_mean,
        }

    @classmethod
    def from_dict(cls, d) -> "Rejection":
        return cls(
            voxel=tuple(d["voxel"]), hand=Hand(d["hand"]), t_min=d["t_min"],
            min_distance=d["min_distance"], reason=d["reason"],
            before_mean=d["before_mean"], after_mean=d["after_mean"],
        )


@dataclass(frozen=True)
class DetectionTrace:
    events: Tuple[ManipulationEvent, ...]
    rejections: Tuple[Rejection, ...] = field(default=())


def candidate_time(hand_samples: Sequence[Tuple[float, Sequence[float]]], obj: Sequence[float]):
    """Time of the global minimum Euclidean distance between hand and object.

    Returns ``(t_min, min_distance)``; among equal minima the earliest time wins.
    """
    if len(hand_samples) == 0:
        raise NoHandSamples("no hand samples")
    times = np.array([t for t, _ in hand_samples], dtype=float)
    pts = np.array([p for _, p in hand_samples], dtype=float)
    sq = np.sum((pts - np.asarray(obj, dtype=float)) ** 2, axis=1)
    best = sq.min()
    t_min = times[sq == best].min()
    return float(t_min), math.sqrt(best)


def smoothing_window(n: int, fraction: float) -> int:
    w = max(1, math.floor(fraction * n + 0.5))
    return w + 1 if w % 2 == 0 else w


def smooth_existence(series, fraction: float = 0.1, window: Optional[int] = None) -> np.ndarray:
    """Centered moving average, truncated at both ends of the series.

    The window is ``round(fraction * len(series))`` bumped to the next odd
    number; pass ``window`` to override it.
    """
    x = np.asarray(series, dtype=float)
    n = len(x)
    if n == 0:
        raise ValueError("empty series")
    w = window if window is not None else smoothing_window(n, fraction)
    half = w // 2
    csum = np.concatenate(([0.0], np.cumsum(x)))
    i = np.arange(n)
    lo = np.maximum(0, i - half)
    hi = np.minimum(n, i + half + 1)
    return (csum[hi] - csum[lo]) / (hi - lo)


def classify_candidate(smoothed, snapshot_times, t_min: float, criterion: float = 0.5) -> Classification:
    """Grasp if the object is present before ``t_min`` and absent after; release
    for the mirror case; unrelated otherwise (including when ``t_min`` has no
    snapshot strictly on one side)."""
    y = np.asarray(smoothed, dtype=float)
    ts = np.asarray(snapshot_times, dtype=float)
    before = y[ts < t_min]
    after = y[ts > t_min]
    if before.size == 0 or after.size == 0:
        return Classification(Label.UNRELATED, float("nan"), float("nan"))
    b, a = float(before.mean()), float(after.mean())
    if b > criterion >= a:
        label = Label.GRASP
    elif a > criterion >= b:
        label = Label.RELEASE
    else:
        label = Label.UNRELATED
    return Classification(label, b, a)


def analyze(demo: Demonstration, location_foa: TargetLocationFoa,
            params: Optional[DetectorParams] = None) -> DetectionTrace:
    """Run the detector and keep every rejected candidate for diagnostics."""
    params = (params or DetectorParams()).resolved(demo.dim)
    samples = {hand: demo.hand_samples(hand) for hand in Hand}
    events: List[ManipulationEvent] = []
    rejections: List[Rejection] = []

    for idx, agg in location_foa.voxels.items():
        smoothed = smooth_existence(existence_series(location_foa, idx), params.smoothing_fraction)
        winners = []
        for hand in (Hand.LEFT, Hand.RIGHT):
            if not samples[hand]:
                continue
            t_min, dist = candidate_time(samples[hand], agg.median)
            if dist > params.distance_threshold:
                rejections.append(Rejection(idx, hand, t_min, dist, "distance"))
                continue
            cls = classify_candidate(smoothed, location_foa.snapshot_times, t_min,
                                     params.existence_criterion)
            if cls.label is Label.UNRELATED:
                rejections.append(Rejection(idx, hand, t_min, dist, "unrelated",
                                            _nan_to_none(cls.before_mean), _nan_to_none(cls.after_mean)))
                continue
            winners.append(ManipulationEvent(
                kind=Kind(cls.label.value), t=t_min, voxel=idx, voxel_median=agg.median,
                hand=hand, min_distance=dist, before_mean=cls.before_mean, after_mean=cls.after_mean,
            ))
        if winners:
            # stable sort: on equal distance the left hand (evaluated first) wins
            winners.sort(key=lambda e: e.min_distance)
            events.append(winners[0])
            for loser in winners[1:]:
                rejections.append(Rejection(idx, loser.hand, loser.t, loser.min_distance, "arbitration",
                                            loser.before_mean, loser.after_mean))

    events.sort(key=lambda e: (e.t, e.voxel))
    return DetectionTrace(events=tuple(events), rejections=tuple(rejections))


def detect_events(demo: Demonstration, location_foa: TargetLocationFoa,
                  params: Optional[DetectorParams] = None) -> List[ManipulationEvent]:
    return list(analyze(demo, location_foa, params).events)


def _nan_to_none(x):
    return None if math.isnan(x) else x
