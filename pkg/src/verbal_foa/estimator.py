"""scikit-learn style front end for the whole FoA pipeline."""
from __future__ import annotations

from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .detector import DetectorParams
from .evaluation import DEFAULT_MAX_GAP, match_events
from .pipeline import run_pipeline
from .validation import check_demonstration, check_positive


class VerbalFoa(BaseEstimator):
    """Verbal focus-of-attention detector.

    Each demonstration is its own problem: ``fit`` runs the pipeline on one
    demonstration and exposes the results as fitted attributes, in the manner
    of transductive estimators such as clusterers.

    Parameters
    ----------
    lexicons : Lexicons, optional
        Verb and object vocabularies; defaults to the built-in ones.
    knowledge_base : TaskKnowledgeBase, optional
        Verb to task-type associations.
    cell_size : float, optional
        Voxel edge length; defaults to the demonstration's ``cell_size``.
    distance_threshold : float, optional
        Hand-object distance gate. Defaults to 0.2 m for 3-D input and is
        required for 2-D input.
    existence_criterion : float, default=0.5
    smoothing_fraction : float, default=0.1
        Smoothing window as a fraction of the number of detection snapshots.

    Attributes
    ----------
    report_ : FoaReport
    instruction_foa_ : InstructionFoa or None
    events_ : list of ManipulationEvent
    task_model_ : TaskModel or None
    stage_error_ : StageFailure or None
    """

    def __init__(self, lexicons=None, knowledge_base=None, cell_size=None, distance_threshold=None,
                 existence_criterion=0.5, smoothing_fraction=0.1):
        self.lexicons = lexicons
        self.knowledge_base = knowledge_base
        self.cell_size = cell_size
        self.distance_threshold = distance_threshold
        self.existence_criterion = existence_criterion
        self.smoothing_fraction = smoothing_fraction

    def _detector_params(self) -> DetectorParams:
        return DetectorParams(self.distance_threshold, self.existence_criterion, self.smoothing_fraction)

    def fit(self, X, y=None):
        demo = check_demonstration(X)
        cell = None if self.cell_size is None else check_positive(self.cell_size, "cell_size")
        report = run_pipeline(demo, self.lexicons, self.knowledge_base, self._detector_params(), cell)
        self.report_ = report
        self.instruction_foa_ = report.instruction_foa
        self.events_ = list(report.events)
        self.task_model_ = report.task_model
        self.stage_error_ = report.stage_error
        return self

    def fit_predict(self, X, y=None):
        return self.fit(X).events_

    def predict(self, X):
        """Detected manipulation events of ``X`` (refits on ``X``)."""
        return self.fit_predict(X)

    def score(self, X, y=None, max_gap=DEFAULT_MAX_GAP):
        """Fraction of ground-truth events matched within ``max_gap`` seconds.

        ``y`` defaults to the demonstration's own ground truth.
        """
        demo = check_demonstration(X)
        truth = y if y is not None else demo.ground_truth
        if not truth:
            raise ValueError("no ground truth to score against")
        events = self.fit_predict(demo)
        return len(match_events(events, truth, max_gap).matches) / len(truth)

    def to_json(self) -> str:
        check_is_fitted(self, "report_")
        return self.report_.to_json()
