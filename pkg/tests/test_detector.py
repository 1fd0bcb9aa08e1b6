import math
import random

import numpy as np
import pytest
from hypothesis import given, strategies as st

from verbal_foa.demo import Demonstration, Detection, Frame, Hand, Kind
from verbal_foa.detector import (
    DetectorParams, Label, analyze, candidate_time, classify_candidate, detect_events,
    smooth_existence, smoothing_window,
)
from verbal_foa.exceptions import ConfigError, NoHandSamples
from verbal_foa.language import parse_instruction
from verbal_foa.objects import build_location_foa, select_targets
from verbal_foa.synth import FakeReach, SynthConfig, generate

from conftest import make_demo


def scan_oracle(samples, obj):
    """Plain linear scan; strict < keeps the earliest of equal minima."""
    best_t, best_d = None, None
    for t, p in samples:
        d = math.sqrt(sum((a - b) * (a - b) for a, b in zip(p, obj)))
        if best_d is None or d < best_d:
            best_t, best_d = t, d
    return best_t, best_d


def samples_at_distances(ds):
    return [(float(t), (d, 0.0, 0.0)) for t, d in enumerate(ds)]


def test_candidate_time_examples():
    assert candidate_time(samples_at_distances([0.5, 0.3, 0.1, 0.4]), (0, 0, 0)) == (2.0, 0.1)
    assert candidate_time(samples_at_distances([0.3, 0.1, 0.1]), (0, 0, 0)) == (1.0, 0.1)


def test_candidate_time_empty():
    with pytest.raises(NoHandSamples):
        candidate_time([], (0, 0, 0))


def test_candidate_time_matches_scan_on_10000_samples():
    rng = random.Random(11)
    samples = [(k / 15, tuple(rng.uniform(-1, 1) for _ in range(3))) for k in range(10_000)]
    obj = (0.1, -0.2, 0.3)
    t, d = candidate_time(samples, obj)
    t_ref, d_ref = scan_oracle(samples, obj)
    assert t == t_ref and d == d_ref


def test_smoothing_examples():
    assert smooth_existence([1] * 9, 0.3).tolist() == [1.0] * 9
    out = smooth_existence([1, 1, 1, 1, 0, 0, 0, 0], window=3)
    assert out == pytest.approx([1, 1, 1, 2 / 3, 1 / 3, 0, 0, 0], abs=1e-15)
    x = [1, 0, 1, 1, 0, 0, 1, 0, 1, 1]
    assert smoothing_window(10, 0.1) == 1
    assert smooth_existence(x, 0.1).tolist() == x


@pytest.mark.parametrize("n, fraction, w", [(10, 0.1, 1), (20, 0.1, 3), (35, 0.1, 5), (40, 0.1, 5),
                                            (50, 0.1, 5), (60, 0.1, 7), (5, 1.0, 5), (4, 1.0, 5)])
def test_smoothing_window(n, fraction, w):
    assert smoothing_window(n, fraction) == w


def brute_smooth(x, w):
    half = w // 2
    out = []
    for i in range(len(x)):
        window = x[max(0, i - half):i + half + 1]
        out.append(sum(window) / len(window))
    return out


@given(st.lists(st.integers(0, 1), min_size=1, max_size=60), st.floats(0.01, 1.0))
def test_smoothing_matches_brute_force_and_stays_in_range(x, fraction):
    y = smooth_existence(x, fraction)
    assert y == pytest.approx(brute_smooth(x, smoothing_window(len(x), fraction)), abs=1e-12)
    assert y.min() >= min(x) and y.max() <= max(x)


TIMES = [k * 0.2 for k in range(10)]
T_INTERIOR = 0.9  # between frames 4 and 5


@pytest.mark.parametrize("series, label, before, after", [
    ([1] * 5 + [0] * 5, Label.GRASP, 1.0, 0.0),
    ([0] * 5 + [1] * 5, Label.RELEASE, 0.0, 1.0),
    ([1] * 10, Label.UNRELATED, 1.0, 1.0),
    ([0] * 10, Label.UNRELATED, 0.0, 0.0),
])
def test_classification(series, label, before, after):
    cls = classify_candidate(smooth_existence(series, window=1), TIMES, T_INTERIOR)
    assert (cls.label, cls.before_mean, cls.after_mean) == (label, before, after)


def test_classification_boundary_is_unrelated():
    series = [1] * 5 + [0] * 5
    assert classify_candidate(series, TIMES, 0.0).label is Label.UNRELATED
    assert classify_candidate(series, TIMES, 1.8).label is Label.UNRELATED


def test_classification_at_criterion():
    # before mean exactly 0.5 is not "present"
    cls = classify_candidate([1, 0, 0, 0], [0, 1, 2, 3], 1.5)
    assert cls.before_mean == 0.5 and cls.label is Label.UNRELATED


def fridge_location(demo):
    foa = parse_instruction(demo.transcript)
    return build_location_foa(select_targets(demo, foa), demo.snapshot_times, demo.cell_size)


def test_fridge_demo_grasp(fridge_demo):
    events = detect_events(fridge_demo, fridge_location(fridge_demo))
    grasps = [e for e in events if e.kind is Kind.GRASP]
    assert len(grasps) == 1
    g = grasps[0]
    assert g.hand is Hand.RIGHT
    gt = fridge_demo.ground_truth[0]
    # closest approach is the first right-hand sample at the handle
    first_at_handle = min(t for t, p in fridge_demo.hand_samples(Hand.RIGHT) if t >= gt.t)
    assert g.t == first_at_handle
    assert g.min_distance == 0.0
    assert [e.kind for e in events] == [Kind.GRASP, Kind.RELEASE]


def test_far_hand_is_gated():
    snaps = {k * 0.2: [Detection("cup", (0, 0, 0))] for k in range(5)}
    right = {k * 0.2 + 0.1: (0.5, 0, 0) for k in range(5)}
    demo = make_demo(snaps, right)
    trace = analyze(demo, fridge_location(demo))
    assert trace.events == ()
    assert {r.reason for r in trace.rejections} == {"distance"}
    assert trace.rejections[0].min_distance == 0.5


def grasp_demo_both_hands(left_offset, right_offset):
    snaps = {k * 0.2: ([Detection("cup", (0.07, 0.07, 0.07))] if k < 5 else []) for k in range(10)}
    right = {k * 0.2 + 0.1: (0.07 + (right_offset if k == 4 else 1.0), 0.07, 0.07) for k in range(10)}
    left = {k * 0.2 + 0.1: (0.07 - (left_offset if k == 4 else 1.0), 0.07, 0.07) for k in range(10)}
    return make_demo(snaps, right, left)


def test_both_hands_arbitration():
    demo = grasp_demo_both_hands(left_offset=0.05, right_offset=0.02)
    trace = analyze(demo, fridge_location(demo), DetectorParams(smoothing_fraction=0.1))
    assert len(trace.events) == 1
    assert trace.events[0].hand is Hand.RIGHT and trace.events[0].kind is Kind.GRASP
    losers = [r for r in trace.rejections if r.reason == "arbitration"]
    assert len(losers) == 1 and losers[0].hand is Hand.LEFT

    demo = grasp_demo_both_hands(left_offset=0.01, right_offset=0.02)
    assert detect_events(demo, fridge_location(demo))[0].hand is Hand.LEFT


def test_2d_requires_threshold():
    demo = make_demo({0.0: [Detection("cup", (5.0, 5.0))]}, {0.1: (0.0, 0.0)}, dim=2, cell_size=10)
    loc = fridge_location(demo)
    with pytest.raises(ConfigError):
        detect_events(demo, loc)
    assert detect_events(demo, loc, DetectorParams(distance_threshold=20.0)) == []


@pytest.mark.parametrize("kw", [{"distance_threshold": 0}, {"existence_criterion": 1.0},
                                {"smoothing_fraction": 0.0}, {"smoothing_fraction": 1.5}])
def test_bad_params(kw):
    with pytest.raises(ConfigError):
        DetectorParams(**kw)


@pytest.fixture(scope="module")
def noisy_demos():
    cfg = SynthConfig(fake_reach=FakeReach(), jitter=0.002, dropout=0.05, distractor_count=3)
    return [generate(cfg, seed) for seed in range(12)]


def test_gate_monotonicity(noisy_demos):
    thresholds = [0.001, 0.005, 0.02, 0.1, 0.2, 0.5, 1.0, 3.0]
    for demo in noisy_demos:
        loc = fridge_location(demo)
        previous = set()
        for th in thresholds:
            events = {(e.voxel, e.kind, e.t) for e in detect_events(demo, loc, DetectorParams(th))}
            assert previous <= events
            previous = events


def test_per_voxel_uniqueness_and_determinism(noisy_demos):
    for demo in noisy_demos:
        loc = fridge_location(demo)
        a = analyze(demo, loc)
        b = analyze(demo, loc)
        assert a == b
        voxels = [e.voxel for e in a.events]
        assert len(voxels) == len(set(voxels))
        assert all(e.min_distance <= 0.2 for e in a.events)
        assert all(0 <= e.before_mean <= 1 and 0 <= e.after_mean <= 1 for e in a.events)


def prepend_idle(demo: Demonstration, shift: float, rate=15.0, snap_rate=5.0):
    """Shift the demo by ``shift`` seconds and fill the gap with frames in
    which the target stays put and the right hand idles far away."""
    target = next(d for _, dets in demo.snapshots() for d in dets if d.class_name == "cup")
    grasp_pos = demo.ground_truth[0].position
    idle = tuple(c + 2.0 for c in grasp_pos)
    frames = {}
    for k in range(int(round(shift * snap_rate))):
        frames.setdefault(k / snap_rate, {})["detections"] = (Detection("cup", grasp_pos, target.color,
                                                                         target.color_histogram),)
    for k in range(int(round(shift * rate))):
        frames.setdefault(k / rate, {})["right_hand"] = idle
    new = [Frame(t=t, **frames[t]) for t in sorted(frames)]
    new += [Frame(f.t + shift, f.detections, f.left_hand, f.right_hand) for f in demo.frames]
    return Demonstration(demo.dim, demo.cell_size, demo.transcript, tuple(new), demo.ground_truth)


def test_temporal_noise_invariance():
    shift = 2.0
    for seed in range(10):
        demo = generate(SynthConfig(), seed)
        grasp = next(e for e in detect_events(demo, fridge_location(demo)) if e.kind is Kind.GRASP)
        longer = prepend_idle(demo, shift)
        grasp2 = next(e for e in detect_events(longer, fridge_location(longer)) if e.kind is Kind.GRASP)
        assert grasp2.t == grasp.t + shift
        assert grasp2.voxel == grasp.voxel
        assert grasp2.before_mean >= grasp.before_mean - 1e-12
