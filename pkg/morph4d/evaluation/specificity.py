"""
Specificity of generated landmark sequences.

LOCATION: morph4d/evaluation/specificity.py
PURPOSE: Per-landmark average Euclidean distance between generated
    transitions and real test transitions for the same label pair, as a
    scalar summary, a per-frame curve and a per-pair table
"""

from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from morph4d.errors import ValidationError
from morph4d.evaluation.reconstruction import ErrorSummary
from morph4d.synthesis.labels import ExpressionLabel
from morph4d.trajectory.types import LandmarkSequence
from morph4d.utils import evaluate, get_logger

logger = get_logger(__name__)


def _landmark_distances(generated: Sequence[LandmarkSequence], reference: LandmarkSequence) -> np.ndarray:
    """Distances of shape (samples, frames, landmarks)."""
    if not generated:
        raise ValidationError("specificity needs at least one generated sequence")
    shape = reference.frames.shape
    for i, seq in enumerate(generated):
        if seq.frames.shape != shape:
            raise ValidationError(
                f"length mismatch: generated sample {i} has shape {seq.frames.shape}, reference {shape}"
            )
    stacked = np.stack([seq.frames for seq in generated])
    return np.linalg.norm(stacked - reference.frames[None], axis=-1)


@evaluate()
def specificity(generated: Sequence[LandmarkSequence], reference: LandmarkSequence) -> ErrorSummary:
    """Mean ± std over samples of each sample's mean landmark distance to the reference."""
    per_sample = _landmark_distances(generated, reference).mean(axis=(1, 2))
    return ErrorSummary.from_values(per_sample)


def specificity_nearest(generated: Sequence[LandmarkSequence],
                        references: Sequence[LandmarkSequence]) -> ErrorSummary:
    """Like :func:`specificity`, scoring each sample against its closest reference."""
    if not references:
        raise ValidationError("specificity needs at least one reference sequence")
    per_reference = np.stack([_landmark_distances(generated, ref).mean(axis=(1, 2)) for ref in references])
    return ErrorSummary.from_values(per_reference.min(axis=0))


def per_frame_specificity(generated: Sequence[LandmarkSequence], reference: LandmarkSequence) -> List[float]:
    """Landmark distance per frame, averaged over samples and landmarks."""
    return _landmark_distances(generated, reference).mean(axis=(0, 2)).tolist()


def specificity_table(
    entries: Iterable[Tuple[ExpressionLabel, ExpressionLabel, Sequence[LandmarkSequence], LandmarkSequence]],
) -> Dict[Tuple[str, str], ErrorSummary]:
    """
    Specificity for every (start, end) label pair.

    Args:
        entries: (start, end, generated samples, reference transition) tuples

    Raises:
        ValidationError: the same label pair appears twice
    """
    table: Dict[Tuple[str, str], ErrorSummary] = {}
    for start, end, generated, reference in entries:
        key = (start.name, end.name)
        if key in table:
            raise ValidationError(f"duplicate label pair {key[0]}->{key[1]}")
        table[key] = specificity(generated, reference)
        logger.debug("Specificity", start=key[0], end=key[1], mean=table[key].mean)
    return table
