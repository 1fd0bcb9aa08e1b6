"""End-to-end driver producing a machine-readable FoA report."""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Tuple

from .demo import Demonstration, Position, VoxelIndex
from .detector import DetectorParams, ManipulationEvent, Rejection, analyze
from .encoder import TaskKnowledgeBase, TaskModel, default_knowledge_base, encode_task_model
from .exceptions import StageError
from .language import InstructionFoa, Lexicons, default_lexicons, parse_instruction
from .objects import build_location_foa, select_targets


@dataclass(frozen=True)
class VoxelSummary:
    index: VoxelIndex
    count: int
    median: Position

    def to_dict(self):
        return {"index": list(self.index), "count": self.count, "median": list(self.median)}

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d["index"]), d["count"], tuple(d["median"]))


@dataclass(frozen=True)
class StageFailure:
    stage: str  # parse, select, detect or encode
    error: str
    message: str

    def to_dict(self):
        return {"stage": self.stage, "error": self.error, "message": self.message}

    @classmethod
    def from_dict(cls, d):
        return cls(d["stage"], d["error"], d["message"])


@dataclass(frozen=True)
class FoaReport:
    config: dict
    instruction_foa: Optional[InstructionFoa] = None
    target_voxels: Tuple[VoxelSummary, ...] = ()
    events: Tuple[ManipulationEvent, ...] = ()
    rejections: Tuple[Rejection, ...] = ()
    task_model: Optional[TaskModel] = None
    stage_error: Optional[StageFailure] = None

    def __hash__(self):
        return hash(self.to_json())

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "instruction_foa": None if self.instruction_foa is None else self.instruction_foa.to_dict(),
            "target_voxels": [v.to_dict() for v in self.target_voxels],
            "events": [e.to_dict() for e in self.events],
            "rejections": [r.to_dict() for r in self.rejections],
            "task_model": None if self.task_model is None else self.task_model.to_dict(),
            "stage_error": None if self.stage_error is None else self.stage_error.to_dict(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d) -> "FoaReport":
        return cls(
            config=d["config"],
            instruction_foa=None if d["instruction_foa"] is None else InstructionFoa.from_dict(d["instruction_foa"]),
            target_voxels=tuple(VoxelSummary.from_dict(v) for v in d["target_voxels"]),
            events=tuple(ManipulationEvent.from_dict(e) for e in d["events"]),
            rejections=tuple(Rejection.from_dict(r) for r in d["rejections"]),
            task_model=None if d["task_model"] is None else TaskModel.from_dict(d["task_model"]),
            stage_error=None if d["stage_error"] is None else StageFailure.from_dict(d["stage_error"]),
        )

    @classmethod
    def from_json(cls, text) -> "FoaReport":
        return cls.from_dict(json.loads(text))


def config_echo(demo: Demonstration, lexicons: Lexicons, kb: TaskKnowledgeBase,
                params: DetectorParams, cell_size: float) -> dict:
    return {
        "dim": demo.dim,
        "cell_size": cell_size,
        **params.to_dict(),
        "lexicons": lexicons.to_dict(),
        "knowledge_base": kb.to_dict(),
    }


def run_pipeline(demo: Demonstration, lexicons: Optional[Lexicons] = None,
                 kb: Optional[TaskKnowledgeBase] = None, params: Optional[DetectorParams] = None,
                 cell_size: Optional[float] = None) -> FoaReport:
    """Parse, select, detect and encode, recording the first failing stage.

    Configuration problems (e.g. a 2-D demonstration without a distance
    threshold) raise ``ConfigError``; stage failures end up in the report.
    """
    lexicons = lexicons or default_lexicons()
    kb = kb or default_knowledge_base()
    params = (params or DetectorParams()).resolved(demo.dim)
    cell_size = cell_size or demo.cell_size
    out = {"config": config_echo(demo, lexicons, kb, params, cell_size)}

    def fail(stage, exc):
        return FoaReport(**out, stage_error=StageFailure(stage, type(exc).__name__, str(exc)))

    try:
        foa = parse_instruction(demo.transcript, lexicons)
    except StageError as exc:
        return fail("parse", exc)
    out["instruction_foa"] = foa

    try:
        location = build_location_foa(select_targets(demo, foa), demo.snapshot_times, cell_size)
    except StageError as exc:
        return fail("select", exc)
    out["target_voxels"] = tuple(VoxelSummary(a.idx, a.count, a.median) for a in location.voxels.values())

    try:
        trace = analyze(demo, location, params)
    except StageError as exc:
        return fail("detect", exc)
    out["events"] = trace.events
    out["rejections"] = trace.rejections

    try:
        model = encode_task_model(foa, trace.events, demo, kb, cell_size)
    except StageError as exc:
        return fail("encode", exc)
    return FoaReport(**out, task_model=model)
