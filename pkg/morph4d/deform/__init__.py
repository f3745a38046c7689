"""
Sparse-to-dense mesh deformation: fixed-topology meshes, PCA displacement
models fitted from landmark displacements, and landmark-distance weights.
"""

from morph4d.deform.mesh import (
    DisplacementField,
    Mesh,
    MeshTopology,
    SparseDisplacement,
    build_displacement_dataset,
    extract_landmarks,
)
from morph4d.deform.model import (
    DeformationModel,
    apply_deformation,
    default_ridge,
    deform_sequence,
    fit_coefficients,
    reconstruction_errors,
    train_pca,
)
from morph4d.deform.weights import VertexWeights, compute_vertex_weights

__all__ = [
    'DisplacementField',
    'Mesh',
    'MeshTopology',
    'SparseDisplacement',
    'build_displacement_dataset',
    'extract_landmarks',
    'DeformationModel',
    'apply_deformation',
    'default_ridge',
    'deform_sequence',
    'fit_coefficients',
    'reconstruction_errors',
    'train_pca',
    'VertexWeights',
    'compute_vertex_weights',
]
