"""
Fixed-topology meshes and their dense/sparse displacements.

LOCATION: morph4d/deform/mesh.py
PURPOSE: Mesh containers in full point-to-point correspondence, landmark
    extraction by vertex index and the (dense, sparse) displacement pairs a
    deformation model is trained on
"""

from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from morph4d.errors import ShapeMismatchError, TopologyMismatchError, ValidationError, require_finite
from morph4d.trajectory.types import LandmarkFrame
from morph4d.utils import get_logger

logger = get_logger(__name__)


@dataclass(frozen=True, eq=False)
class MeshTopology:
    """Vertex count, triangles and the landmark vertex indices I_z."""
    vertex_count: int
    faces: np.ndarray
    landmark_indices: np.ndarray

    def __post_init__(self):
        faces = np.array(self.faces, dtype=np.int64).reshape(-1, 3)
        landmarks = np.array(self.landmark_indices, dtype=np.int64).reshape(-1)
        n = int(self.vertex_count)
        if n < 1:
            raise ValidationError(f"vertex_count must be positive, got {n}")
        if faces.size and (faces.min() < 0 or faces.max() >= n):
            bad = int(np.flatnonzero((faces < 0).any(axis=1) | (faces >= n).any(axis=1))[0])
            raise ValidationError(f"face {bad} references a vertex outside [0, {n - 1}]: {faces[bad].tolist()}")
        if landmarks.size and (landmarks.min() < 0 or landmarks.max() >= n):
            raise ValidationError(f"landmark index outside [0, {n - 1}]")
        if np.unique(landmarks).size != landmarks.size:
            raise ValidationError("landmark indices contain duplicates")
        faces.setflags(write=False)
        landmarks.setflags(write=False)
        object.__setattr__(self, 'vertex_count', n)
        object.__setattr__(self, 'faces', faces)
        object.__setattr__(self, 'landmark_indices', landmarks)

    @property
    def n_landmarks(self) -> int:
        return self.landmark_indices.size

    def landmark_rows(self) -> np.ndarray:
        """Row indices of the landmark coordinates in a flattened 3N vector."""
        return (3 * self.landmark_indices[:, None] + np.arange(3)).reshape(-1)

    def with_landmarks(self, landmark_indices: Sequence[int]) -> "MeshTopology":
        return MeshTopology(self.vertex_count, self.faces, landmark_indices)

    def matches(self, other: "MeshTopology") -> bool:
        return (self is other
                or (self.vertex_count == other.vertex_count
                    and np.array_equal(self.faces, other.faces)
                    and np.array_equal(self.landmark_indices, other.landmark_indices)))


@dataclass(frozen=True, eq=False)
class Mesh:
    vertices: np.ndarray
    topology: MeshTopology

    def __post_init__(self):
        vertices = np.array(self.vertices, dtype=float)
        if vertices.shape != (self.topology.vertex_count, 3):
            raise ShapeMismatchError(
                f"mesh has vertex array {vertices.shape}, topology expects ({self.topology.vertex_count}, 3)"
            )
        require_finite(vertices, "mesh vertices")
        vertices.setflags(write=False)
        object.__setattr__(self, 'vertices', vertices)

    @property
    def vertex_count(self) -> int:
        return self.topology.vertex_count

    def with_vertices(self, vertices: np.ndarray) -> "Mesh":
        return Mesh(vertices, self.topology)

    def translated(self, offset) -> "Mesh":
        return Mesh(self.vertices + np.asarray(offset, dtype=float), self.topology)


@dataclass(frozen=True, eq=False)
class DisplacementField:
    """Per-vertex displacement D = S_expressive − S_neutral (N×3)."""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 3:
            raise ShapeMismatchError(f"displacement field must be N×3, got {values.shape}")
        require_finite(values, "displacement field")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def vertex_count(self) -> int:
        return self.values.shape[0]

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


@dataclass(frozen=True, eq=False)
class SparseDisplacement:
    """Landmark displacement d = Z_expressive − Z_neutral (k×3)."""
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2 or values.shape[1] != 3:
            raise ShapeMismatchError(f"sparse displacement must be k×3, got {values.shape}")
        require_finite(values, "sparse displacement")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def flat(self) -> np.ndarray:
        return self.values.reshape(-1)


def extract_landmarks(mesh: Mesh) -> LandmarkFrame:
    """Landmark coordinates Z = S(I_z), in I_z order."""
    if mesh.topology.n_landmarks == 0:
        raise ValidationError("mesh topology has no landmark indices")
    return mesh.vertices[mesh.topology.landmark_indices].copy()


def require_same_topology(a: Mesh, b: Mesh, what: str = "meshes"):
    if not a.topology.matches(b.topology):
        raise TopologyMismatchError(
            f"{what} do not share a topology ({a.vertex_count} vs {b.vertex_count} vertices)"
        )


def build_displacement_dataset(pairs: Sequence[Tuple[Mesh, Mesh]]) -> List[Tuple[DisplacementField, SparseDisplacement]]:
    """
    Dense and sparse displacements of (neutral, expressive) mesh pairs.

    Raises:
        TopologyMismatchError: any mesh differs in topology from the first
    """
    if not pairs:
        raise ValidationError("no mesh pairs given")
    reference = pairs[0][0]
    dataset = []
    for i, (neutral, expressive) in enumerate(pairs):
        require_same_topology(reference, neutral, f"pair {i} neutral mesh and pair 0")
        require_same_topology(neutral, expressive, f"pair {i} meshes")
        dense = expressive.vertices - neutral.vertices
        sparse = dense[neutral.topology.landmark_indices]
        dataset.append((DisplacementField(dense), SparseDisplacement(sparse)))
    logger.debug("Built displacement dataset", pairs=len(dataset))
    return dataset
