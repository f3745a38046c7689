"""
Sparse-to-dense reconstruction losses.

LOCATION: morph4d/evaluation/losses.py
PURPOSE: Dense displacement L1, landmark-distance weighted L1 on vertex
    positions, and their weighted total
"""

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from morph4d.deform.mesh import DisplacementField, Mesh
from morph4d.deform.weights import VertexWeights
from morph4d.errors import ShapeMismatchError, TopologyMismatchError

DEFAULT_BETA1 = 1.0
DEFAULT_BETA2 = 0.1


class S2DWeights(BaseModel):
    """Weights of the displacement and weighted-position terms."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    beta1: float = Field(default=DEFAULT_BETA1, ge=0.0, description="Weight of the displacement L1 term")
    beta2: float = Field(default=DEFAULT_BETA2, ge=0.0, description="Weight of the weighted position L1 term")

    def total(self, l_dr: float, l_pr: float) -> float:
        return s2d_total_loss(l_dr, l_pr, self.beta1, self.beta2)


def displacement_l1(dg: DisplacementField, dgt: DisplacementField) -> float:
    """(1/N) Σ_i |Dg_i − Dgt_i|₁."""
    if dg.values.shape != dgt.values.shape:
        raise ShapeMismatchError(f"displacement shapes differ: {dg.values.shape} vs {dgt.values.shape}")
    return float(np.abs(dg.values - dgt.values).sum(axis=1).mean())


def weighted_l1(sg: Mesh, sgt: Mesh, w: VertexWeights) -> float:
    """(1/N) Σ_i w_i |p_i − p_i^gt|₁."""
    if sg.vertex_count != sgt.vertex_count:
        raise TopologyMismatchError(f"meshes have {sg.vertex_count} and {sgt.vertex_count} vertices")
    if len(w) != sg.vertex_count:
        raise ShapeMismatchError(f"{len(w)} weights for {sg.vertex_count} vertices")
    return float((w.weights * np.abs(sg.vertices - sgt.vertices).sum(axis=1)).mean())


def s2d_total_loss(l_dr: float, l_pr: float,
                   beta1: float = DEFAULT_BETA1, beta2: float = DEFAULT_BETA2) -> float:
    return beta1 * l_dr + beta2 * l_pr
