"""Synthetic pick-place demonstrations with exact ground truth.

The right hand moves at constant speed along a piecewise-linear path:
rest -> (optional fake reach to a decoy point and dwell) -> grasp point ->
carry to the release point -> rest. The target sits at the grasp point until
the grasp, follows the hand while carried and stays at the release point
afterwards. Distractor objects sit at fixed positions. The left hand rests
away from the workspace.

Random draws come from independent SplitMix64 substreams (layout, target,
distractors), so changing the number of distractors never changes the
target's trajectory or detections.
"""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, fields
from typing import Optional, Tuple

import numpy as np

from .demo import (
    Color, Demonstration, Detection, Frame, GroundTruthEvent, Hand, Kind, dump_demonstration,
    voxel_index,
)
from .exceptions import ConfigError
from .rng import SplitMix64

_LAYOUT, _TARGET, _DISTRACTORS = 1, 2, 3
MAX_LAYOUT_ATTEMPTS = 1000

# representative pixels per color name: (h, s, v)
_SWATCH = {
    Color.RED: (0.0, 0.9, 0.85),
    Color.YELLOW: (60.0, 0.9, 0.85),
    Color.GREEN: (120.0, 0.9, 0.85),
    Color.CYAN: (180.0, 0.9, 0.85),
    Color.BLUE: (240.0, 0.9, 0.85),
    Color.MAGENTA: (300.0, 0.9, 0.85),
    Color.BLACK: (0.0, 0.1, 0.05),
    Color.WHITE: (0.0, 0.05, 0.95),
}


def color_histogram(color: Color):
    """A small HSV histogram whose dominant color is ``color``."""
    background = Color.BLACK if color is Color.WHITE else Color.WHITE
    shadow = Color.BLUE if color is Color.BLACK else Color.BLACK
    return (_SWATCH[color] + (70,), _SWATCH[background] + (20,), _SWATCH[shadow] + (10,))


@dataclass(frozen=True)
class FakeReach:
    decoy: Optional[Tuple[float, ...]] = None  # sampled inside the bounds when None
    dwell: float = 0.5


@dataclass(frozen=True)
class SynthConfig:
    dim: int = 3
    cell_size: float = 0.15
    target_class: str = "cup"
    target_color: Optional[str] = "red"
    distractor_count: int = 0
    distractor_pool: Tuple[Tuple[str, str], ...] = (
        ("bowl", "blue"), ("banana", "yellow"), ("apple", "green"),
        ("dish", "white"), ("plastic bottle", "cyan"),
    )
    bounds_min: Tuple[float, ...] = (0.4, -0.5, 0.75)
    bounds_max: Tuple[float, ...] = (1.0, 0.5, 0.95)
    grasp_point: Optional[Tuple[float, ...]] = None
    release_point: Optional[Tuple[float, ...]] = None
    min_separation: float = 0.3
    detection_rate: float = 5.0
    hand_rate: float = 15.0
    hand_speed: float = 0.5
    rest_pose: Tuple[float, ...] = (0.0, -0.3, 1.0)
    left_rest_pose: Tuple[float, ...] = (0.0, 0.3, 1.0)
    rest_dwell: float = 0.5
    grasp_dwell: float = 0.3
    release_dwell: float = 0.3
    end_dwell: float = 0.5
    fake_reach: Optional[FakeReach] = None
    distance_margin: float = 0.25
    jitter: float = 0.0
    dropout: float = 0.0
    color_mode: str = "histogram"
    transcript: Optional[str] = None

    def __post_init__(self):
        self.validate()

    def validate(self):
        d = self.dim
        if d not in (2, 3):
            raise ConfigError("dim must be 2 or 3")
        vectors = {"bounds_min": self.bounds_min, "bounds_max": self.bounds_max,
                   "rest_pose": self.rest_pose, "left_rest_pose": self.left_rest_pose,
                   "grasp_point": self.grasp_point, "release_point": self.release_point}
        if self.fake_reach is not None:
            vectors["fake_reach.decoy"] = self.fake_reach.decoy
        for name, v in vectors.items():
            if v is not None and len(v) != d:
                raise ConfigError(f"{name} must have {d} components")
        if any(lo >= hi for lo, hi in zip(self.bounds_min, self.bounds_max)):
            raise ConfigError("bounds_min must be below bounds_max on every axis")
        for name in ("grasp_point", "release_point"):
            p = vectors[name]
            if p is not None and not self.in_bounds(p):
                raise ConfigError(f"{name} lies outside the workspace bounds")
        if self.grasp_point is not None and self.release_point is not None:
            if voxel_index(self.grasp_point, self.cell_size) == voxel_index(self.release_point, self.cell_size):
                raise ConfigError("grasp and release points share a voxel")
        for name in ("cell_size", "detection_rate", "hand_rate", "hand_speed", "distance_margin"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        for name in ("rest_dwell", "grasp_dwell", "release_dwell", "end_dwell", "jitter", "min_separation"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be non-negative")
        if self.fake_reach is not None and self.fake_reach.dwell < 0:
            raise ConfigError("fake_reach.dwell must be non-negative")
        if not 0.0 <= self.dropout < 1.0:
            raise ConfigError("dropout must be in [0, 1)")
        if 2 * self.jitter >= self.cell_size:
            raise ConfigError("jitter must be below half the cell size")
        if self.distractor_count < 0:
            raise ConfigError("distractor_count must be >= 0")
        if self.distractor_count and not self.distractor_pool:
            raise ConfigError("distractors requested with an empty pool")
        try:
            if self.target_color is not None:
                Color(self.target_color)
            for _, c in self.distractor_pool:
                Color(c)
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        if self.color_mode not in ("histogram", "label"):
            raise ConfigError("color_mode must be 'histogram' or 'label'")

    def in_bounds(self, p) -> bool:
        return all(lo <= c <= hi for c, lo, hi in zip(p, self.bounds_min, self.bounds_max))

    @property
    def default_transcript(self) -> str:
        obj = self.target_class if self.target_color is None else f"{self.target_color} {self.target_class}"
        return f"Pick up the {obj} and place it on the shelf."

    @classmethod
    def from_dict(cls, doc) -> "SynthConfig":
        if not isinstance(doc, dict):
            raise ConfigError("synth config must be an object")
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(doc) - known)
        if unknown:
            raise ConfigError(f"unknown synth config keys {unknown}")
        kw = {}
        for key, value in doc.items():
            if key == "fake_reach" and value is not None:
                if not isinstance(value, dict) or set(value) - {"decoy", "dwell"}:
                    raise ConfigError("fake_reach must be an object with keys decoy, dwell")
                decoy = value.get("decoy")
                value = FakeReach(decoy=None if decoy is None else tuple(decoy),
                                  dwell=value.get("dwell", FakeReach.dwell))
            elif key == "distractor_pool":
                try:
                    value = tuple((item["class"], item["color"]) for item in value)
                except (TypeError, KeyError):
                    raise ConfigError("distractor_pool items need 'class' and 'color'") from None
            elif isinstance(value, list):
                value = tuple(value)
            kw[key] = value
        try:
            return cls(**kw)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None


def load_synth_config(document) -> SynthConfig:
    try:
        return SynthConfig.from_dict(json.loads(document))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"synth config is not JSON: {exc}") from None


# ---------------------------------------------------------------------------
# geometry helpers

def point_segment_distance(p, a, b) -> float:
    p, a, b = (np.asarray(v, dtype=float) for v in (p, a, b))
    ab = b - a
    denom = float(ab @ ab)
    s = 0.0 if denom == 0 else min(1.0, max(0.0, float((p - a) @ ab) / denom))
    return float(np.linalg.norm(p - (a + s * ab)))


def segment_distance(a0, a1, b0, b1) -> float:
    """Minimum distance between two segments.

    The distance from a point moving linearly to a fixed segment is convex, so
    a golden-section search over the first segment converges to the minimum.
    """
    a0, a1 = np.asarray(a0, dtype=float), np.asarray(a1, dtype=float)
    f = lambda s: point_segment_distance(a0 + s * (a1 - a0), b0, b1)  # noqa: E731
    lo, hi = 0.0, 1.0
    g = (math.sqrt(5) - 1) / 2
    for _ in range(80):
        m1, m2 = hi - g * (hi - lo), lo + g * (hi - lo)
        if f(m1) <= f(m2):
            hi = m2
        else:
            lo = m1
    return min(f(0.0), f(1.0), f((lo + hi) / 2))


class _Path:
    """Piecewise-linear motion through timed knots."""

    def __init__(self):
        self.times = []
        self.points = []

    def add(self, t, p):
        self.times.append(float(t))
        self.points.append(tuple(float(c) for c in p))

    def at(self, t):
        k = bisect.bisect_right(self.times, t) - 1
        if k < 0:
            return self.points[0]
        if k >= len(self.times) - 1:
            return self.points[-1]
        t0, t1 = self.times[k], self.times[k + 1]
        p0, p1 = self.points[k], self.points[k + 1]
        if t1 == t0 or p0 == p1:
            return p0
        f = (t - t0) / (t1 - t0)
        return tuple(a + f * (b - a) for a, b in zip(p0, p1))


# ---------------------------------------------------------------------------
# generation

def _sample_in_bounds(rng, cfg):
    return tuple(rng.uniform(lo, hi) for lo, hi in zip(cfg.bounds_min, cfg.bounds_max))


def _voxel_interior(p, cfg):
    # keep jittered detections inside the point's voxel
    c = cfg.cell_size
    m = cfg.jitter + 0.01 * c
    out = []
    for x in p:
        base = math.floor(x / c) * c
        out.append(base + min(c - m, max(m, x - base)))
    return tuple(out)


def _layout(cfg: SynthConfig, rng: SplitMix64):
    slack = cfg.distance_margin + math.sqrt(cfg.dim) * cfg.jitter
    for _ in range(MAX_LAYOUT_ATTEMPTS):
        g = cfg.grasp_point or _voxel_interior(_sample_in_bounds(rng, cfg), cfg)
        r = cfg.release_point or _voxel_interior(_sample_in_bounds(rng, cfg), cfg)
        if not (cfg.in_bounds(g) and cfg.in_bounds(r)):
            continue
        if voxel_index(g, cfg.cell_size) == voxel_index(r, cfg.cell_size):
            continue
        if math.dist(g, r) < cfg.min_separation:
            if cfg.grasp_point and cfg.release_point:
                raise ConfigError("grasp and release points are closer than min_separation")
            continue
        decoy = None
        if cfg.fake_reach is not None:
            decoy = cfg.fake_reach.decoy or _sample_in_bounds(rng, cfg)
            # the fake segment runs from rest to the decoy and dwells there
            clearance = min(
                point_segment_distance(g, cfg.rest_pose, decoy),
                point_segment_distance(r, cfg.rest_pose, decoy),
                segment_distance(cfg.rest_pose, decoy, g, r),
            )
            if clearance <= slack:
                if cfg.fake_reach.decoy is not None and cfg.grasp_point and cfg.release_point:
                    raise ConfigError("fake-reach decoy violates distance_margin")
                continue
        return g, r, decoy
    raise ConfigError("could not find a layout satisfying the configuration")


def _hand_path(cfg, g, r, decoy):
    path = _Path()
    v = cfg.hand_speed
    t = 0.0
    path.add(t, cfg.rest_pose)
    t += cfg.rest_dwell
    path.add(t, cfg.rest_pose)
    fake = None
    cur = cfg.rest_pose
    if decoy is not None:
        fake_start = t
        t += math.dist(cur, decoy) / v
        path.add(t, decoy)
        t += cfg.fake_reach.dwell
        path.add(t, decoy)
        fake = (fake_start, t)
        cur = decoy
    t += math.dist(cur, g) / v
    path.add(t, g)
    grasp_t = t
    t += cfg.grasp_dwell
    path.add(t, g)
    t += math.dist(g, r) / v
    path.add(t, r)
    release_t = t
    t += cfg.release_dwell
    path.add(t, r)
    t += math.dist(r, cfg.rest_pose) / v
    path.add(t, cfg.rest_pose)
    t += cfg.end_dwell
    path.add(t, cfg.rest_pose)
    return path, grasp_t, release_t, t, fake


def _detection(cls_name, color, pos, cfg):
    if color is None:
        return Detection(cls_name, pos)
    if cfg.color_mode == "label":
        return Detection(cls_name, pos, color=color)
    return Detection(cls_name, pos, color_histogram=color_histogram(color))


def _jittered(p, rng, sigma):
    # always draw, so the stream position does not depend on sigma
    return tuple(c + rng.uniform(-sigma, sigma) for c in p)


def generate(cfg: Optional[SynthConfig] = None, seed: int = 0) -> Demonstration:
    """Generate a demonstration with ground truth for ``(cfg, seed)``."""
    cfg = cfg or SynthConfig()
    root = SplitMix64(seed)
    layout_rng, target_rng, distractor_rng = (root.substream(k) for k in (_LAYOUT, _TARGET, _DISTRACTORS))

    g, r, decoy = _layout(cfg, layout_rng)
    path, grasp_t, release_t, t_end, fake = _hand_path(cfg, g, r, decoy)

    target_color = None if cfg.target_color is None else Color(cfg.target_color)
    distractors = []
    for _ in range(cfg.distractor_count):
        cls_name, color = cfg.distractor_pool[distractor_rng.below(len(cfg.distractor_pool))]
        distractors.append((cls_name, Color(color), _sample_in_bounds(distractor_rng, cfg)))

    frames = {}
    target_positions = []
    n_snap = math.floor(t_end * cfg.detection_rate + 1e-9)
    for k in range(n_snap + 1):
        t = k / cfg.detection_rate
        dets = []
        for cls_name, color, pos in distractors:
            jittered = _jittered(pos, distractor_rng, cfg.jitter)
            if distractor_rng.random() >= cfg.dropout:
                dets.append(_detection(cls_name, color, jittered, cfg))
        if t <= grasp_t:
            base = g
        elif t < release_t:
            base = path.at(t)
        else:
            base = r
        jittered = _jittered(base, target_rng, cfg.jitter)
        if target_rng.random() >= cfg.dropout:
            dets.append(_detection(cfg.target_class, target_color, jittered, cfg))
            target_positions.append(jittered)
        frames[t] = {"detections": tuple(dets)}

    n_hand = math.floor(t_end * cfg.hand_rate + 1e-9)
    for k in range(n_hand + 1):
        t = k / cfg.hand_rate
        entry = frames.setdefault(t, {})
        entry["right_hand"] = path.at(t)
        entry["left_hand"] = tuple(float(c) for c in cfg.left_rest_pose)

    demo = Demonstration(
        dim=cfg.dim,
        cell_size=cfg.cell_size,
        transcript=cfg.transcript if cfg.transcript is not None else cfg.default_transcript,
        frames=tuple(Frame(t=t, **frames[t]) for t in sorted(frames)),
        ground_truth=(
            GroundTruthEvent(grasp_t, Kind.GRASP, Hand.RIGHT, g),
            GroundTruthEvent(release_t, Kind.RELEASE, Hand.RIGHT, r),
        ),
    )
    if fake is not None:
        audit_fake_reach(demo, cfg.distance_margin, fake, target_positions)
    return demo


def audit_fake_reach(demo: Demonstration, margin: float, fake_window, target_positions) -> None:
    """Check every fake-segment hand sample against every target detection."""
    t0, t1 = fake_window
    targets = np.asarray(target_positions, dtype=float)
    for t, p in demo.hand_samples(Hand.RIGHT):
        if t0 <= t <= t1 and targets.size:
            closest = float(np.min(np.linalg.norm(targets - np.asarray(p), axis=1)))
            if closest <= margin:
                raise ConfigError(f"fake reach at t={t} comes within {closest:.3f} of the target")


def generate_log(cfg: Optional[SynthConfig] = None, seed: int = 0) -> str:
    return dump_demonstration(generate(cfg, seed))
