"""Input validation helpers shared by the estimator and the CLI."""
from __future__ import annotations

import math
import os
from typing import Optional

import numpy as np

from .demo import Demonstration, demonstration_from_dict, load_demonstration, read_demonstration
from .exceptions import ValidationError


def check_demonstration(X) -> Demonstration:
    """Coerce ``X`` to a validated ``Demonstration``.

    Accepts a ``Demonstration``, a parsed log ``dict``, JSON text or bytes, or
    a path to a log file.
    """
    if isinstance(X, Demonstration):
        return X
    if isinstance(X, dict):
        return demonstration_from_dict(X)
    if isinstance(X, bytes):
        return load_demonstration(X)
    if isinstance(X, str) and X.lstrip().startswith("{"):
        return load_demonstration(X)
    if isinstance(X, (str, os.PathLike)):
        return read_demonstration(X)
    raise TypeError(f"cannot interpret {type(X).__name__} as a demonstration")


def check_position(p, dim: Optional[int] = None):
    try:
        out = tuple(float(c) for c in p)
    except (TypeError, ValueError):
        raise ValidationError(f"not a position: {p!r}") from None
    if dim is not None and len(out) != dim:
        raise ValidationError(f"expected {dim} coordinates, got {len(out)}")
    if not all(math.isfinite(c) for c in out):
        raise ValidationError("coordinates must be finite")
    return out


def check_points(points, dim: Optional[int] = None) -> np.ndarray:
    """2-D float array of finite points, one per row."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2:
        raise ValidationError(f"expected an (n, d) array, got shape {P.shape}")
    if dim is not None and P.shape[1] != dim:
        raise ValidationError(f"expected {dim} columns, got {P.shape[1]}")
    if not np.all(np.isfinite(P)):
        raise ValidationError("points must be finite")
    return P


def check_positive(value, name: str) -> float:
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValidationError(f"{name} must be a positive number, got {value!r}")
    return float(value)
