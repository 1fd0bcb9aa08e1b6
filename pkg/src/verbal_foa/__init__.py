"""Verbal focus-of-attention for learning from observation.

From a transcribed instruction and a recorded demonstration (object
detections plus hand positions) compute where and when to look: the target
object's voxels and the grasp/release timings, then encode a task model.
"""
from .demo import (
    Color, Demonstration, Detection, Frame, GroundTruthEvent, Hand, Kind, dump_demonstration,
    load_demonstration, read_demonstration, voxel_center, voxel_index,
)
from .detector import DetectorParams, ManipulationEvent, candidate_time, classify_candidate, detect_events, smooth_existence
from .encoder import (
    CircleParams, TaskKnowledgeBase, TaskModel, TaskType, default_knowledge_base, discretize_waypoints,
    encode_task_model, extract_trajectory, fit_circle, recognize_task_type,
)
from .estimator import VerbalFoa
from .evaluation import evaluate, match_events, summarize
from .language import InstructionFoa, Lexicons, default_lexicons, parse_instruction, tokenize
from .objects import (
    TargetLocationFoa, build_location_foa, classify_dominant_color, existence_series, select_targets,
)
from .pipeline import FoaReport, run_pipeline
from .synth import SynthConfig, generate

__version__ = "0.1.0"
