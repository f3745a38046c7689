"""
Landmark-distance vertex weights.

LOCATION: morph4d/deform/weights.py
PURPOSE: Per-vertex weights w_i = 1 / min_j |p_i − Z_j| that emphasize the
    movable regions around the landmarks in the weighted reconstruction loss

Landmark vertices (and any vertex lying exactly on a landmark) take the
largest finite weight; all weights are then divided by that maximum, so the
landmarks sit at exactly 1.0 and every weight lies in (0, 1].
"""

from dataclasses import dataclass

import numpy as np
from scipy.spatial import KDTree

from morph4d.deform.mesh import Mesh, extract_landmarks
from morph4d.errors import ValidationError
from morph4d.utils import evaluate


@dataclass(frozen=True, eq=False)
class VertexWeights:
    weights: np.ndarray

    def __post_init__(self):
        weights = np.array(self.weights, dtype=float).reshape(-1)
        if weights.size and (weights.min() < 0.0 or weights.max() > 1.0 or not np.all(np.isfinite(weights))):
            raise ValidationError("vertex weights must lie in [0, 1]")
        weights.setflags(write=False)
        object.__setattr__(self, 'weights', weights)

    def __len__(self) -> int:
        return self.weights.size


@evaluate()
def compute_vertex_weights(neutral: Mesh) -> VertexWeights:
    """Inverse nearest-landmark distance of every vertex, rescaled to (0, 1]."""
    landmarks = extract_landmarks(neutral)
    distances, _ = KDTree(landmarks).query(neutral.vertices, k=1)

    on_landmark = distances == 0.0
    on_landmark[neutral.topology.landmark_indices] = True

    inverse = np.zeros(neutral.vertex_count)
    inverse[~on_landmark] = 1.0 / distances[~on_landmark]
    peak = inverse.max() if (~on_landmark).any() else 1.0
    inverse[on_landmark] = peak
    return VertexWeights(inverse / peak)
