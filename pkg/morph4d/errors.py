"""
Exception hierarchy for morph4d.

Every error raised on purpose derives from ``Morph4DError``. Input and
numerical-precondition failures are ``ValidationError`` (CLI exit code 1);
file problems are ``DataIOError`` (CLI exit code 2).
"""

from typing import Optional

import numpy as np


class Morph4DError(Exception):
    """Base class for all morph4d errors."""
    pass


class ValidationError(Morph4DError, ValueError):
    """Inputs violate an operation's preconditions."""
    pass


class ShapeMismatchError(ValidationError):
    pass


class DegenerateFrameError(ValidationError):
    pass


class SequenceTooShortError(ValidationError):
    pass


class ZeroMotionError(ValidationError):
    pass


class AntipodalPointError(ValidationError):
    pass


class ConvergenceError(ValidationError):
    """An iterative solver stopped at max_iter without meeting its tolerance."""

    def __init__(self, message: str, last_iterate=None, residual: Optional[float] = None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class NoInteriorPeakError(ValidationError):
    pass


class IncoherentInitError(ValidationError):
    pass


class IncompatibleMotionError(ValidationError):
    pass


class DiscontinuousChainError(ValidationError):
    pass


class MissingPrototypeError(ValidationError):
    pass


class MissingMotionError(ValidationError):
    """No motion in the bank connects two consecutive recipe labels."""
    pass


class SingularSystemError(ValidationError):
    pass


class TopologyMismatchError(ValidationError):
    pass


class ModelConsistencyError(ValidationError):
    pass


class LabelError(ValidationError):
    pass


class ConfigError(ValidationError):
    pass


class DataIOError(Morph4DError, OSError):
    """A file could not be read or written in the expected format."""
    pass


class MeshFormatError(DataIOError):
    """Malformed OBJ content; ``line_number`` is 1-based when known."""

    def __init__(self, message: str, path=None, line_number: Optional[int] = None):
        where = f"{path}:{line_number}" if line_number is not None else f"{path}"
        super().__init__(f"{where}: {message}" if path is not None else message)
        self.path = path
        self.line_number = line_number


class ArtifactFormatError(DataIOError):
    pass


class ConfigReadError(DataIOError):
    """The config file named by --config or MORPH4D_CONFIG cannot be read."""
    pass


def require_finite(array: np.ndarray, what: str) -> np.ndarray:
    """Raise ValidationError unless every entry of ``array`` is finite."""
    if not np.all(np.isfinite(array)):
        raise ValidationError(f"{what} contains non-finite values")
    return array
