"""
Value types for landmark trajectories and their SRVF representation.

LOCATION: morph4d/trajectory/types.py
PURPOSE: Immutable containers shared by the trajectory, synthesis and
    evaluation modules

A landmark frame is a plain ``(k, 3)`` float array. Sequences stack frames
into a ``(T, k, 3)`` array; SRVF samples are flattened per interval into a
``(M, 3k)`` matrix with ``M = T - 1``.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from morph4d.errors import ShapeMismatchError, ValidationError, require_finite

LandmarkFrame = np.ndarray
ArrayLike = Union[np.ndarray, Sequence]


def as_frame(points: ArrayLike) -> LandmarkFrame:
    """Validate and convert to a ``(k, 3)`` float frame."""
    frame = np.asarray(points, dtype=float)
    if frame.ndim != 2 or frame.shape[1] != 3 or frame.shape[0] < 1:
        raise ShapeMismatchError(f"landmark frame must be k×3 with k ≥ 1, got shape {frame.shape}")
    return require_finite(frame, "landmark frame")


@dataclass(frozen=True, eq=False)
class LandmarkSequence:
    """
    T frames of k 3D landmarks sampled every ``dt``.

    ``dt`` defaults to ``1/(T-1)`` so the parameter domain is [0, 1].
    Construction accepts a single frame so that operations needing two can
    report "sequence too short" themselves.
    """
    frames: np.ndarray
    dt: Optional[float] = None

    def __post_init__(self):
        frames = np.array(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[2] != 3 or frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ShapeMismatchError(f"sequence frames must be T×k×3, got shape {frames.shape}")
        require_finite(frames, "landmark sequence")
        dt = self.dt
        if dt is None:
            dt = 1.0 / (frames.shape[0] - 1) if frames.shape[0] > 1 else 1.0
        if not dt > 0:
            raise ValidationError(f"sample spacing must be positive, got {dt}")
        frames.setflags(write=False)
        object.__setattr__(self, 'frames', frames)
        object.__setattr__(self, 'dt', float(dt))

    @classmethod
    def from_frames(cls, frames: Iterable[ArrayLike], dt: Optional[float] = None) -> "LandmarkSequence":
        stacked = [as_frame(f) for f in frames]
        if len({f.shape[0] for f in stacked}) > 1:
            raise ShapeMismatchError("all frames of a sequence must have the same landmark count")
        return cls(np.stack(stacked), dt)

    @property
    def n_frames(self) -> int:
        return self.frames.shape[0]

    @property
    def n_landmarks(self) -> int:
        return self.frames.shape[1]

    def __len__(self) -> int:
        return self.n_frames

    def __getitem__(self, index: int) -> LandmarkFrame:
        return self.frames[index]

    def translated(self, offset: ArrayLike) -> "LandmarkSequence":
        return LandmarkSequence(self.frames + np.asarray(offset, dtype=float), self.dt)

    def scaled(self, factor: float) -> "LandmarkSequence":
        return LandmarkSequence(self.frames * factor, self.dt)

    def __repr__(self) -> str:
        return f"LandmarkSequence(T={self.n_frames}, k={self.n_landmarks}, dt={self.dt:g})"


@dataclass(frozen=True, eq=False)
class Srvf:
    """
    Discretized square-root velocity function.

    ``samples`` holds one flattened velocity sample per inter-frame interval.
    ``scale`` is the discrete norm the samples had before normalization
    (1.0 for points built directly on the sphere); decoding can re-apply it.
    """
    samples: np.ndarray
    dt: float
    scale: float = 1.0

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.ndim != 2 or samples.shape[0] < 1 or samples.shape[1] < 3 or samples.shape[1] % 3:
            raise ShapeMismatchError(f"SRVF samples must be M×3k, got shape {samples.shape}")
        require_finite(samples, "SRVF samples")
        if not self.dt > 0:
            raise ValidationError(f"sample spacing must be positive, got {self.dt}")
        if not (np.isfinite(self.scale) and self.scale > 0):
            raise ValidationError(f"SRVF scale must be positive, got {self.scale}")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'dt', float(self.dt))
        object.__setattr__(self, 'scale', float(self.scale))

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_landmarks(self) -> int:
        return self.samples.shape[1] // 3

    def __repr__(self) -> str:
        return f"Srvf(M={self.n_samples}, k={self.n_landmarks}, dt={self.dt:g}, scale={self.scale:g})"


@dataclass(frozen=True, eq=False)
class TangentVector:
    """Element of the tangent space of the SRVF sphere at ``basepoint``."""
    samples: np.ndarray
    basepoint: Srvf
    dt: Optional[float] = None

    def __post_init__(self):
        samples = np.array(self.samples, dtype=float)
        if samples.shape != self.basepoint.samples.shape:
            raise ShapeMismatchError(
                f"tangent samples {samples.shape} do not match basepoint {self.basepoint.samples.shape}"
            )
        require_finite(samples, "tangent vector")
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)
        object.__setattr__(self, 'dt', self.basepoint.dt if self.dt is None else float(self.dt))

    def norm(self) -> float:
        return float(np.sqrt(np.sum(self.samples ** 2) * self.dt))

    def __add__(self, other: "TangentVector") -> "TangentVector":
        if other.samples.shape != self.samples.shape:
            raise ShapeMismatchError("tangent vectors have different shapes")
        return TangentVector(self.samples + other.samples, self.basepoint)

    def __sub__(self, other: "TangentVector") -> "TangentVector":
        if other.samples.shape != self.samples.shape:
            raise ShapeMismatchError("tangent vectors have different shapes")
        return TangentVector(self.samples - other.samples, self.basepoint)

    def __mul__(self, factor: float) -> "TangentVector":
        return TangentVector(self.samples * float(factor), self.basepoint)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"TangentVector(M={self.samples.shape[0]}, norm={self.norm():.6g})"
