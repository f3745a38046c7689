"""
Synthetic trajectories and meshes with known closed-form properties.

LOCATION: tests/helpers/synthetic.py
"""
import numpy as np

from morph4d.deform import MeshTopology
from morph4d.trajectory import LandmarkSequence


def smooth_trajectory(rng: np.random.Generator, n_frames: int, n_landmarks: int,
                      amplitude: float = 0.3) -> LandmarkSequence:
    """Random base face plus a few low-frequency sinusoidal displacements per coordinate."""
    t = np.linspace(0.0, 1.0, n_frames)[:, None, None]
    base = rng.normal(size=(n_landmarks, 3))
    frames = base[None].repeat(n_frames, axis=0)
    for harmonic in (1, 2, 3):
        coeff = rng.normal(scale=amplitude / harmonic, size=(n_landmarks, 3))
        phase = rng.uniform(0, 2 * np.pi, size=(n_landmarks, 3))
        frames = frames + coeff * np.sin(np.pi * harmonic * t + phase)
    return LandmarkSequence(frames)


def linear_onset(neutral: np.ndarray, peak: np.ndarray, n_frames: int = 10) -> LandmarkSequence:
    """Straight-line motion from ``neutral`` to ``peak``."""
    t = np.linspace(0.0, 1.0, n_frames)[:, None, None]
    return LandmarkSequence(neutral[None] + t * (peak - neutral)[None])


def grid_topology(rows: int = 5, cols: int = 5, landmarks=(0, 6, 12, 18, 24)) -> MeshTopology:
    """Triangulated rows×cols grid."""
    faces = []
    for r in range(rows - 1):
        for c in range(cols - 1):
            v = r * cols + c
            faces.append([v, v + 1, v + cols])
            faces.append([v + 1, v + cols + 1, v + cols])
    return MeshTopology(rows * cols, np.array(faces), list(landmarks))
