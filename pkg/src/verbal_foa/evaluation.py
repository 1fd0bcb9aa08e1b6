"""Timing-error evaluation against ground-truth grasp/release labels."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .demo import GroundTruthEvent
from .detector import ManipulationEvent
from .pipeline import run_pipeline

DEFAULT_MAX_GAP = 3.0
DEFAULT_BIN_WIDTH = 0.2


@dataclass(frozen=True)
class Match:
    truth: GroundTruthEvent
    detected: ManipulationEvent

    @property
    def error(self) -> float:
        return self.detected.t - self.truth.t


@dataclass(frozen=True)
class MatchResult:
    matches: Tuple[Match, ...]
    misses: Tuple[GroundTruthEvent, ...]
    false_positives: Tuple[ManipulationEvent, ...]

    @property
    def errors(self) -> List[float]:
        return [m.error for m in self.matches]


def match_events(detected: Sequence[ManipulationEvent], truth: Sequence[GroundTruthEvent],
                 max_gap: float = DEFAULT_MAX_GAP) -> MatchResult:
    """Greedy matching in ground-truth time order.

    Each truth event takes the nearest still-unmatched detection with the same
    kind and hand within ``max_gap`` seconds (earlier detection on ties).
    """
    if not max_gap > 0:
        raise ValueError("max_gap must be positive")
    free = list(range(len(detected)))
    matches, misses = [], []
    for gt in sorted(truth, key=lambda e: e.t):
        best = None
        for k in free:
            d = detected[k]
            if d.kind != gt.kind or d.hand != gt.hand:
                continue
            gap = abs(d.t - gt.t)
            if gap > max_gap:
                continue
            if best is None or (gap, d.t) < (abs(detected[best].t - gt.t), detected[best].t):
                best = k
        if best is None:
            misses.append(gt)
        else:
            free.remove(best)
            matches.append(Match(gt, detected[best]))
    return MatchResult(tuple(matches), tuple(misses), tuple(detected[k] for k in free))


@dataclass(frozen=True)
class HistogramBin:
    center: float
    lower: float
    upper: float
    counts: dict  # per event kind, plus "total"


@dataclass
class EvalSummary:
    errors: List[float]
    matches: int
    misses: int
    false_positives: int
    bin_width: float
    mean_error: Optional[float] = None
    median_error: Optional[float] = None
    mean_abs_error: Optional[float] = None
    median_abs_error: Optional[float] = None
    p95_abs_error: Optional[float] = None
    histogram: List[HistogramBin] = field(default_factory=list)
    demos: List[dict] = field(default_factory=list)
    excluded: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "matches": self.matches,
            "misses": self.misses,
            "false_positives": self.false_positives,
            "mean_error": self.mean_error,
            "median_error": self.median_error,
            "mean_abs_error": self.mean_abs_error,
            "median_abs_error": self.median_abs_error,
            "p95_abs_error": self.p95_abs_error,
            "bin_width": self.bin_width,
            "histogram": [
                {"center": b.center, "lower": b.lower, "upper": b.upper, **b.counts}
                for b in self.histogram
            ],
            "errors": self.errors,
            "demos": self.demos,
            "excluded": self.excluded,
        }


def histogram_bins(errors: Sequence[float], bin_width: float, kinds: Optional[Sequence[str]] = None):
    """Bins of width ``bin_width`` centered on multiples of it (one bin centered on 0).

    Bin ``k`` covers ``[(k - 0.5) w, (k + 0.5) w)``; counts are kept per kind
    so the result can be drawn as a stacked histogram.
    """
    if not errors:
        return []
    kinds = list(kinds) if kinds is not None else ["all"] * len(errors)
    labels = sorted(set(kinds))
    keys = [math.floor(e / bin_width + 0.5) for e in errors]
    bins = []
    for k in range(min(keys), max(keys) + 1):
        counts = {label: 0 for label in labels}
        for key, kind in zip(keys, kinds):
            if key == k:
                counts[kind] += 1
        counts["total"] = sum(counts[label] for label in labels)
        bins.append(HistogramBin(k * bin_width, (k - 0.5) * bin_width, (k + 0.5) * bin_width, counts))
    return bins


def summarize(errors: Sequence[float], bin_width: float = DEFAULT_BIN_WIDTH, *, misses: int = 0,
              false_positives: int = 0, kinds: Optional[Sequence[str]] = None) -> EvalSummary:
    """Error statistics and histogram; statistics are ``None`` when there are no errors."""
    if not bin_width > 0:
        raise ValueError("bin_width must be positive")
    errors = [float(e) for e in errors]
    summary = EvalSummary(errors=errors, matches=len(errors), misses=misses,
                          false_positives=false_positives, bin_width=bin_width)
    if errors:
        e = np.asarray(errors)
        a = np.abs(e)
        summary.mean_error = float(e.mean())
        summary.median_error = float(np.median(e))
        summary.mean_abs_error = float(a.mean())
        summary.median_abs_error = float(np.median(a))
        summary.p95_abs_error = float(np.percentile(a, 95))
        summary.histogram = histogram_bins(errors, bin_width, kinds)
    return summary


CSV_COLUMNS = ("demo_id", "kind", "hand", "t_truth", "t_detected", "error")


def error_rows(demo_id: str, result: MatchResult):
    """CSV rows for one demonstration: matches, then misses, then false positives."""
    rows = []
    for m in result.matches:
        rows.append((demo_id, m.truth.kind.value, m.truth.hand.value, m.truth.t, m.detected.t, m.error))
    for gt in result.misses:
        rows.append((demo_id, gt.kind.value, gt.hand.value, gt.t, "", ""))
    for d in result.false_positives:
        rows.append((demo_id, d.kind.value, d.hand.value, "", d.t, ""))
    return rows


def write_errors_csv(fh, rows) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    writer.writerows(rows)


def evaluate(demos, *, lexicons=None, kb=None, params=None, cell_size=None,
             max_gap: float = DEFAULT_MAX_GAP, bin_width: float = DEFAULT_BIN_WIDTH,
             paper_exclusion: bool = False):
    """Run the pipeline on ``(demo_id, Demonstration)`` pairs and pool timing errors.

    With ``paper_exclusion`` a demonstration in which any ground-truth event
    was missed is dropped from the pooled statistics (it is still listed under
    ``excluded``). Returns ``(summary, csv_rows)``.
    """
    errors, kinds, rows, per_demo, excluded = [], [], [], [], []
    misses = false_positives = 0
    for demo_id, demo in demos:
        if demo.ground_truth is None:
            per_demo.append({"demo_id": demo_id, "skipped": "no ground truth"})
            continue
        report = run_pipeline(demo, lexicons, kb, params, cell_size)
        result = match_events(report.events, demo.ground_truth, max_gap)
        per_demo.append({
            "demo_id": demo_id,
            "matches": len(result.matches),
            "misses": len(result.misses),
            "false_positives": len(result.false_positives),
            "stage_error": None if report.stage_error is None else report.stage_error.to_dict(),
        })
        if paper_exclusion and result.misses:
            excluded.append(demo_id)
            continue
        errors.extend(result.errors)
        kinds.extend(m.truth.kind.value for m in result.matches)
        misses += len(result.misses)
        false_positives += len(result.false_positives)
        rows.extend(error_rows(demo_id, result))
    summary = summarize(errors, bin_width, misses=misses, false_positives=false_positives, kinds=kinds)
    summary.demos = per_demo
    summary.excluded = excluded
    return summary, rows
