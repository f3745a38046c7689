"""
Shared fixtures: seeded random generators, smooth synthetic landmark
trajectories, onset motions with known peaks and small meshes with a
planted deformation model.
"""
import os
from typing import Callable, Tuple

import numpy as np
import pytest
from dotenv import find_dotenv, load_dotenv

from morph4d.deform import DeformationModel, Mesh, MeshTopology
from morph4d.synthesis import LabelSet, LabeledMotion, motion_from_sequence
from morph4d.trajectory import LandmarkSequence
from tests.helpers.synthetic import grid_topology, linear_onset, smooth_trajectory

# Load test environment variables
load_dotenv(find_dotenv('.env.test'))

COMA_DIR_ENV = "MORPH4D_COMA_DIR"


def pytest_collection_modifyitems(config, items):
    """Skip tests marked `dataset` unless the CoMA directory is configured."""
    if os.getenv(COMA_DIR_ENV):
        return
    skip = pytest.mark.skip(reason=f"{COMA_DIR_ENV} not set")
    for item in items:
        if "dataset" in item.keywords:
            item.add_marker(skip)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def make_trajectory(rng) -> Callable[..., LandmarkSequence]:
    def _make(n_frames: int = 30, n_landmarks: int = 5, amplitude: float = 0.3) -> LandmarkSequence:
        return smooth_trajectory(rng, n_frames, n_landmarks, amplitude)
    return _make


@pytest.fixture
def labels() -> LabelSet:
    return LabelSet.default()


@pytest.fixture
def neutral_frame(rng) -> np.ndarray:
    return rng.normal(size=(6, 3))


@pytest.fixture
def make_onset(labels, neutral_frame, rng) -> Callable[..., Tuple[LabeledMotion, np.ndarray]]:
    """Onset motion from the shared neutral frame to a random peak; returns (motion, peak)."""
    def _make(end: str, n_frames: int = 10, magnitude: float = 0.5):
        peak = neutral_frame + rng.normal(scale=magnitude, size=neutral_frame.shape)
        motion = motion_from_sequence(linear_onset(neutral_frame, peak, n_frames), labels.neutral, labels[end])
        return motion, peak
    return _make


@pytest.fixture
def topology() -> MeshTopology:
    return grid_topology()


@pytest.fixture
def neutral_mesh(topology, rng) -> Mesh:
    ys, xs = np.divmod(np.arange(topology.vertex_count), 5)
    vertices = np.column_stack([xs, ys, 0.1 * rng.normal(size=topology.vertex_count)]).astype(float)
    return Mesh(vertices, topology)


@pytest.fixture
def planted_model(topology, rng) -> DeformationModel:
    """Three orthonormal modes over the grid with a small mean displacement."""
    basis, _ = np.linalg.qr(rng.normal(size=(3 * topology.vertex_count, 3)))
    mean = 0.01 * rng.normal(size=3 * topology.vertex_count)
    return DeformationModel(basis, mean, topology.landmark_indices)
