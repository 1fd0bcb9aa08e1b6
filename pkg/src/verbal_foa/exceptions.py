"""Exception hierarchy.

Loading problems (``SchemaError``, ``ValidationError``) and configuration
problems (``ConfigError``) are hard failures. Everything deriving from
``StageError`` is a pipeline-stage failure that the report driver records
instead of propagating.
"""


class VerbalFoaError(Exception):
    """Base class for all errors raised by this package."""


class SchemaError(VerbalFoaError, ValueError):
    """The log document is not well formed."""


class ValidationError(VerbalFoaError, ValueError):
    """A well-formed document violates a domain invariant."""

    def __init__(self, message, path=""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class ConfigError(VerbalFoaError, ValueError):
    pass


class StageError(VerbalFoaError):
    """A pipeline stage could not produce its output."""


# language parser
class NoTaskVerb(StageError):
    pass


class NoTargetObject(StageError):
    pass


# object selector
class EmptyHistogram(StageError, ValueError):
    pass


class NoTargetObserved(StageError):
    pass


class MissingColorData(StageError):
    pass


class UnknownVoxel(StageError, KeyError):
    pass


# grasp-release detector
class NoHandSamples(StageError, ValueError):
    pass


# task encoder
class UnknownTask(StageError):
    pass


class AmbiguousTask(StageError):
    pass


class HandMismatch(StageError):
    pass


class EmptyTrajectory(StageError):
    pass


class TooFewPoints(StageError, ValueError):
    pass


class DegenerateArc(StageError, ValueError):
    pass


class DimensionMismatch(StageError, ValueError):
    pass


class NoGrasp(StageError):
    pass


class NoRelease(StageError):
    pass
