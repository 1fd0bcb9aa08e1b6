"""Task-model encoder: task type from verbs, hand trajectory between grasp and
release, and position parameters (waypoints or a fitted circle)."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .demo import Color, Demonstration, Hand, Kind, Position, VoxelIndex, voxel_center, voxel_index
from .detector import ManipulationEvent
from .exceptions import (
    AmbiguousTask, ConfigError, DegenerateArc, DimensionMismatch, EmptyTrajectory, HandMismatch,
    NoGrasp, NoRelease, TooFewPoints, UnknownTask,
)
from .language import InstructionFoa

COLLINEAR_TOL = 1e-9


class TaskType(str, Enum):
    PICK_PLACE = "pick_place"
    ROTATE_LINKAGE = "rotate_linkage"


class TaskKnowledgeBase:
    """Verb to task-type associations."""

    def __init__(self, mapping: Mapping[Union[TaskType, str], Iterable[str]]):
        self._verb_to_type = {}
        for task, verbs in mapping.items():
            try:
                task = TaskType(task)
            except ValueError:
                raise ConfigError(f"unknown task type {task!r}") from None
            for verb in verbs:
                prev = self._verb_to_type.setdefault(verb, task)
                if prev is not task:
                    raise ConfigError(f"verb {verb!r} maps to both {prev.value} and {task.value}")

    def lookup(self, verb: str) -> Optional[TaskType]:
        return self._verb_to_type.get(verb)

    def to_dict(self) -> dict:
        out = {}
        for verb, task in sorted(self._verb_to_type.items(), key=lambda kv: (kv[1].value, kv[0])):
            out.setdefault(task.value, []).append(verb)
        return out

    @classmethod
    def from_dict(cls, doc) -> "TaskKnowledgeBase":
        if not isinstance(doc, dict) or not all(isinstance(v, list) for v in doc.values()):
            raise ConfigError("knowledge base must map task types to verb lists")
        return cls(doc)

    def __eq__(self, other):
        return isinstance(other, TaskKnowledgeBase) and self._verb_to_type == other._verb_to_type

    def __repr__(self):
        return f"TaskKnowledgeBase({self.to_dict()!r})"


def default_knowledge_base() -> TaskKnowledgeBase:
    return TaskKnowledgeBase({
        TaskType.PICK_PLACE: ["pick", "place", "put", "lift"],
        TaskType.ROTATE_LINKAGE: ["open", "close"],
    })


def load_knowledge_base(document) -> TaskKnowledgeBase:
    try:
        return TaskKnowledgeBase.from_dict(json.loads(document))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"knowledge base is not JSON: {exc}") from None


def recognize_task_type(verbs: Sequence[str], kb: Optional[TaskKnowledgeBase] = None) -> TaskType:
    kb = kb or default_knowledge_base()
    if not verbs:
        raise UnknownTask("no verbs given")
    types = []
    for verb in verbs:
        task = kb.lookup(verb)
        if task is None:
            raise UnknownTask(f"verb {verb!r} is not associated with a task")
        if task not in types:
            types.append(task)
    if len(types) > 1:
        raise AmbiguousTask(f"verbs {list(verbs)} map to {[t.value for t in types]}")
    return types[0]


# ---------------------------------------------------------------------------
# position parameters

def extract_trajectory(demo: Demonstration, grasp: ManipulationEvent, release: ManipulationEvent):
    """Samples of the manipulating hand with ``grasp.t <= t <= release.t``."""
    if grasp.hand != release.hand:
        raise HandMismatch(f"grasp by {grasp.hand.value} hand, release by {release.hand.value} hand")
    traj = [(t, p) for t, p in demo.hand_samples(grasp.hand) if grasp.t <= t <= release.t]
    if not traj:
        raise EmptyTrajectory(f"no {grasp.hand.value}-hand samples in [{grasp.t}, {release.t}]")
    return traj


def discretize_waypoints(traj, cell_size: float) -> List[Position]:
    """Voxel centers visited by the trajectory, consecutive repeats collapsed."""
    out = []
    last = None
    for _, p in traj:
        idx = voxel_index(p, cell_size)
        if idx != last:
            out.append(voxel_center(idx, cell_size))
            last = idx
    return out


@dataclass(frozen=True)
class CircleParams:
    center: Position
    radius: float
    normal: Tuple[float, float, float]
    angle_start: float
    angle_end: float
    residual: float

    @property
    def span(self) -> float:
        return self.angle_end - self.angle_start

    def to_dict(self) -> dict:
        return {
            "center": list(self.center), "radius": self.radius, "normal": list(self.normal),
            "angle_start": self.angle_start, "angle_end": self.angle_end, "residual": self.residual,
        }

    @classmethod
    def from_dict(cls, d) -> "CircleParams":
        return cls(tuple(d["center"]), d["radius"], tuple(d["normal"]),
                   d["angle_start"], d["angle_end"], d["residual"])


def fit_circle(points) -> CircleParams:
    """Fit a circle to 3-D points.

    The plane goes through the centroid with its normal along the direction of
    least variance. Inside the plane the algebraic (Kasa) fit minimizes
    ``sum((|p - c|**2 - r**2)**2)``, which is linear in ``(c, r**2 - |c|**2)``.
    The normal is oriented so that the first-to-last traversal is
    counterclockwise; ``angle_end - angle_start`` is the swept angle.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != 3:
        raise DimensionMismatch("circle fitting needs 3-D points")
    if len(P) < 3:
        raise TooFewPoints(f"need at least 3 points, got {len(P)}")

    centroid = P.mean(axis=0)
    Q = P - centroid
    _, s, vt = np.linalg.svd(Q, full_matrices=False)
    var = s ** 2 / len(P)
    if var[0] == 0.0 or var[1] <= COLLINEAR_TOL * var[0]:
        raise DegenerateArc("points are collinear")

    e1 = vt[0]
    if e1[np.argmax(np.abs(e1))] < 0:
        e1 = -e1
    normal = np.cross(e1, vt[1])
    normal /= np.linalg.norm(normal)
    e2 = np.cross(normal, e1)

    x, y = Q @ e1, Q @ e2
    A = np.column_stack([2 * x, 2 * y, np.ones_like(x)])
    (a, b, c), *_ = np.linalg.lstsq(A, x * x + y * y, rcond=None)
    r2 = c + a * a + b * b
    if not r2 > 0:
        raise DegenerateArc("no finite circle through the points")
    radius = math.sqrt(r2)
    center = centroid + a * e1 + b * e2

    theta = np.unwrap(np.arctan2(y - b, x - a))
    sweep = theta[-1] - theta[0]
    if sweep < 0:
        # flipping the normal mirrors the in-plane angles
        normal = -normal
        theta, sweep = -theta, -sweep
    residual = math.sqrt(np.mean((np.linalg.norm(P - center, axis=1) - radius) ** 2))
    return CircleParams(
        center=tuple(float(v) for v in center),
        radius=float(radius),
        normal=tuple(float(v) for v in normal),
        angle_start=float(theta[0]),
        angle_end=float(theta[0] + sweep),
        residual=float(residual),
    )


# ---------------------------------------------------------------------------
# task model

@dataclass(frozen=True)
class TaskModel:
    task_type: TaskType
    object_name: str
    attribute: Optional[Color]
    hand: Hand
    grasp_location: VoxelIndex
    release_location: VoxelIndex
    grasp_time: float
    release_time: float
    position_params: Union[Tuple[Position, ...], CircleParams]

    def to_dict(self) -> dict:
        if isinstance(self.position_params, CircleParams):
            pos = {"circle": self.position_params.to_dict()}
        else:
            pos = {"waypoints": [list(p) for p in self.position_params]}
        return {
            "task_type": self.task_type.value,
            "object_name": self.object_name,
            "attribute": None if self.attribute is None else self.attribute.value,
            "hand": self.hand.value,
            "grasp_location": list(self.grasp_location),
            "release_location": list(self.release_location),
            "grasp_time": self.grasp_time,
            "release_time": self.release_time,
            "position_params": pos,
        }

    @classmethod
    def from_dict(cls, d) -> "TaskModel":
        pos = d["position_params"]
        if "circle" in pos:
            params = CircleParams.from_dict(pos["circle"])
        else:
            params = tuple(tuple(p) for p in pos["waypoints"])
        return cls(
            task_type=TaskType(d["task_type"]),
            object_name=d["object_name"],
            attribute=None if d["attribute"] is None else Color(d["attribute"]),
            hand=Hand(d["hand"]),
            grasp_location=tuple(d["grasp_location"]),
            release_location=tuple(d["release_location"]),
            grasp_time=d["grasp_time"],
            release_time=d["release_time"],
            position_params=params,
        )


def pair_events(events: Sequence[ManipulationEvent]):
    """Earliest grasp and the earliest later release by the same hand."""
    grasps = sorted((e for e in events if e.kind is Kind.GRASP), key=lambda e: e.t)
    if not grasps:
        raise NoGrasp("no grasp event detected")
    grasp = grasps[0]
    releases = sorted((e for e in events if e.kind is Kind.RELEASE and e.hand == grasp.hand
                       and e.t > grasp.t), key=lambda e: e.t)
    if not releases:
        raise NoRelease(f"no {grasp.hand.value}-hand release after the grasp at t={grasp.t}")
    return grasp, releases[0]


def encode_task_model(instruction_foa: InstructionFoa, events: Sequence[ManipulationEvent],
                      demo: Demonstration, kb: Optional[TaskKnowledgeBase] = None,
                      cell_size: Optional[float] = None) -> TaskModel:
    task_type = recognize_task_type(instruction_foa.verbs, kb)
    grasp, release = pair_events(events)
    traj = extract_trajectory(demo, grasp, release)
    if task_type is TaskType.PICK_PLACE:
        params = tuple(discretize_waypoints(traj, cell_size or demo.cell_size))
    else:
        if demo.dim != 3:
            raise DimensionMismatch("rotate-a-linkage encoding needs a 3-D demonstration")
        params = fit_circle([p for _, p in traj])
    return TaskModel(
        task_type=task_type,
        object_name=instruction_foa.target_name,
        attribute=instruction_foa.attribute,
        hand=grasp.hand,
        grasp_location=grasp.voxel,
        release_location=release.voxel,
        grasp_time=grasp.t,
        release_time=release.t,
        position_params=params,
    )
