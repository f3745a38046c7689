"""Evaluation measures: reconstruction errors, S2D losses and specificity."""

from morph4d.evaluation.losses import (
    DEFAULT_BETA1,
    DEFAULT_BETA2,
    S2DWeights,
    displacement_l1,
    s2d_total_loss,
    weighted_l1,
)
from morph4d.evaluation.reconstruction import (
    CumulativeCurve,
    ErrorSummary,
    cumulative_error_curve,
    per_vertex_error,
    sliding_window_error,
)
from morph4d.evaluation.specificity import (
    per_frame_specificity,
    specificity,
    specificity_nearest,
    specificity_table,
)

__all__ = [
    'DEFAULT_BETA1',
    'DEFAULT_BETA2',
    'S2DWeights',
    'displacement_l1',
    's2d_total_loss',
    'weighted_l1',
    'CumulativeCurve',
    'ErrorSummary',
    'cumulative_error_curve',
    'per_vertex_error',
    'sliding_window_error',
    'per_frame_specificity',
    'specificity',
    'specificity_nearest',
    'specificity_table',
]
