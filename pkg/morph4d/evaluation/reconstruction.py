"""
Mesh reconstruction errors.

LOCATION: morph4d/evaluation/reconstruction.py
PURPOSE: Mean per-vertex Euclidean error, cumulative error curves and the
    sliding-window error used when generated and ground-truth sequences
    differ in length
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from morph4d.deform.mesh import Mesh
from morph4d.errors import TopologyMismatchError, ValidationError
from morph4d.utils import evaluate, get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class ErrorSummary:
    """
    Mean and population standard deviation of a set of errors (mm).

    ``values`` optionally keeps the individual errors (per vertex, per
    sample or per frame depending on the measure).
    """
    mean: float
    std: float
    values: Optional[np.ndarray] = None

    @classmethod
    def from_values(cls, values: np.ndarray, keep: bool = True) -> "ErrorSummary":
        values = np.asarray(values, dtype=float).reshape(-1)
        if values.size == 0:
            raise ValidationError("cannot summarize an empty set of errors")
        return cls(float(values.mean()), float(values.std()), values if keep else None)

    @property
    def per_vertex(self) -> Optional[np.ndarray]:
        return self.values


@dataclass(frozen=True, eq=False)
class CumulativeCurve:
    """Fraction of errors ≤ each threshold."""
    thresholds: np.ndarray
    fractions: np.ndarray


def _vertex_distances(a: Mesh, b: Mesh) -> np.ndarray:
    if a.vertex_count != b.vertex_count:
        raise TopologyMismatchError(f"meshes have {a.vertex_count} and {b.vertex_count} vertices")
    return np.linalg.norm(a.vertices - b.vertices, axis=1)


def per_vertex_error(a: Mesh, b: Mesh, keep_per_vertex: bool = True) -> ErrorSummary:
    """Euclidean distance of every corresponding vertex pair, summarized."""
    return ErrorSummary.from_values(_vertex_distances(a, b), keep=keep_per_vertex)


def cumulative_error_curve(errors: Iterable[Union[np.ndarray, ErrorSummary]],
                           thresholds: Sequence[float]) -> CumulativeCurve:
    """
    Fraction of all pooled per-vertex errors at or below each threshold.

    Raises:
        ValidationError: no errors, or thresholds not ascending
    """
    pooled = [e.values if isinstance(e, ErrorSummary) else np.asarray(e, dtype=float).reshape(-1)
              for e in errors]
    if any(p is None for p in pooled):
        raise ValidationError("error summaries must keep their per-vertex values")
    pooled = np.sort(np.concatenate(pooled)) if pooled else np.empty(0)
    if pooled.size == 0:
        raise ValidationError("cumulative curve needs at least one error value")
    thresholds = np.asarray(thresholds, dtype=float).reshape(-1)
    if thresholds.size == 0 or np.any(np.diff(thresholds) < 0):
        raise ValidationError("thresholds must be a non-empty ascending list")
    fractions = np.searchsorted(pooled, thresholds, side='right') / pooled.size
    return CumulativeCurve(thresholds, fractions)


@evaluate()
def sliding_window_error(gen: Sequence[Mesh], gt: Sequence[Mesh], window: int = 20) -> ErrorSummary:
    """
    Per generated frame t, the smallest mean per-vertex error against the
    ground-truth frames in [t − window//2, t + window//2] (clamped to the
    ground-truth length); summarized over generated frames.

    Raises:
        ValidationError: empty sequences or window < 1
    """
    if not gen or not gt:
        raise ValidationError("sliding window error needs non-empty sequences")
    if window < 1:
        raise ValidationError(f"window must be at least 1, got {window}")
    half = window // 2
    last = len(gt) - 1
    per_frame = np.empty(len(gen))
    for t, mesh in enumerate(gen):
        lo = min(max(t - half, 0), last)
        hi = min(t + half, last)
        per_frame[t] = min(_vertex_distances(mesh, gt[j]).mean() for j in range(lo, hi + 1))
    logger.debug("Sliding window error", frames=len(gen), window=window, mean=float(per_frame.mean()))
    return ErrorSummary.from_values(per_frame)
