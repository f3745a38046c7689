"""
Linear Deformation Model - sparse-to-dense displacement fitting

LOCATION: morph4d/deform/model.py
PURPOSE: Learn a PCA basis of dense per-vertex displacements and drive it
    from landmark displacements by regularized least squares

KEY FEATURES:
    1. PCA TRAINING: fixed mode count or explained-variance target
    2. EXPRESSION MEANS: optional per-expression mean displacement
    3. LANDMARK FITTING: ridge least squares on the landmark rows of the basis,
       solved by an orthogonal factorization (scipy.linalg.lstsq)
    4. SEQUENCE DEFORMATION: every frame of a landmark sequence fitted in one
       batched solve

TRACE POINTS:
    - PCA: selected mode count and retained variance
    - FIT: ridge value and residual
"""

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg

from morph4d.deform.mesh import DisplacementField, Mesh, MeshTopology, SparseDisplacement
from morph4d.errors import (
    ModelConsistencyError,
    ShapeMismatchError,
    SingularSystemError,
    TopologyMismatchError,
    ValidationError,
)
from morph4d.trajectory import LandmarkSequence
from morph4d.utils import evaluate, get_logger, observe, traceable

logger = get_logger(__name__)

ORTHONORMAL_TOL = 1e-8
LANDMARK_ROWS_TOL = 1e-12
DEFAULT_RIDGE_FACTOR = 1e-8


def _landmark_row_index(landmark_indices: np.ndarray) -> np.ndarray:
    return (3 * np.asarray(landmark_indices, dtype=np.int64)[:, None] + np.arange(3)).reshape(-1)


@dataclass(frozen=True, eq=False)
class DeformationModel:
    """
    Dense displacement modes with their restriction to the landmark rows.

    Attributes:
        basis: (3N, m) displacement modes, vertex-major (x0, y0, z0, x1, ...)
        mean: (3N,) mean displacement
        landmark_indices: (k,) landmark vertex indices I_z
        landmark_rows: (3k, m) rows of ``basis`` at I_z; derived when omitted,
            verified when given
        explained_variance_ratio: (m,) variance share of each mode, if known
        label_means: expression name -> (3N,) mean displacement
        orthonormal: whether the basis columns are orthonormal (PCA models)
    """
    basis: np.ndarray
    mean: np.ndarray
    landmark_indices: np.ndarray
    landmark_rows: Optional[np.ndarray] = None
    explained_variance_ratio: Optional[np.ndarray] = None
    label_means: Dict[str, np.ndarray] = field(default_factory=dict)
    orthonormal: bool = True

    def __post_init__(self):
        basis = np.array(self.basis, dtype=float)
        mean = np.array(self.mean, dtype=float).reshape(-1)
        indices = np.array(self.landmark_indices, dtype=np.int64).reshape(-1)
        if basis.ndim != 2 or basis.shape[0] % 3 or basis.shape[1] < 1:
            raise ShapeMismatchError(f"basis must be 3N×m, got {basis.shape}")
        if mean.shape != (basis.shape[0],):
            raise ShapeMismatchError(f"mean has shape {mean.shape}, basis has {basis.shape[0]} rows")
        if indices.size == 0 or indices.min() < 0 or indices.max() >= basis.shape[0] // 3:
            raise ValidationError("landmark indices missing or outside the model's vertex range")
        if not (np.all(np.isfinite(basis)) and np.all(np.isfinite(mean))):
            raise ValidationError("model contains non-finite values")

        expected = basis[_landmark_row_index(indices)]
        if self.landmark_rows is None:
            rows = expected
        else:
            rows = np.array(self.landmark_rows, dtype=float)
            if rows.shape != expected.shape or not np.allclose(rows, expected, rtol=0.0, atol=LANDMARK_ROWS_TOL):
                raise ModelConsistencyError("landmark_rows is not the landmark-row selection of basis")
        if self.orthonormal:
            gram = basis.T @ basis
            if not np.allclose(gram, np.eye(basis.shape[1]), rtol=0.0, atol=ORTHONORMAL_TOL):
                raise ModelConsistencyError("basis columns are not orthonormal")

        label_means = {}
        for name, value in self.label_means.items():
            value = np.array(value, dtype=float).reshape(-1)
            if value.shape != mean.shape:
                raise ShapeMismatchError(f"mean for '{name}' has shape {value.shape}, expected {mean.shape}")
            value.setflags(write=False)
            label_means[str(name)] = value

        ratio = self.explained_variance_ratio
        if ratio is not None:
            ratio = np.array(ratio, dtype=float).reshape(-1)
            ratio.setflags(write=False)
        for array in (basis, mean, indices, rows):
            array.setflags(write=False)
        object.__setattr__(self, 'basis', basis)
        object.__setattr__(self, 'mean', mean)
        object.__setattr__(self, 'landmark_indices', indices)
        object.__setattr__(self, 'landmark_rows', rows)
        object.__setattr__(self, 'explained_variance_ratio', ratio)
        object.__setattr__(self, 'label_means', label_means)

    @property
    def vertex_count(self) -> int:
        return self.basis.shape[0] // 3

    @property
    def mode_count(self) -> int:
        return self.basis.shape[1]

    @property
    def n_landmarks(self) -> int:
        return self.landmark_indices.size

    def mean_for(self, label: Optional[str] = None) -> np.ndarray:
        if label is None:
            return self.mean
        try:
            return self.label_means[label]
        except KeyError:
            raise ValidationError(f"model has no mean for expression '{label}'") from None

    def mean_landmarks(self, label: Optional[str] = None) -> np.ndarray:
        return self.mean_for(label)[_landmark_row_index(self.landmark_indices)]


@observe("train_pca")
def train_pca(displacements: Sequence[DisplacementField],
              topology: Union[MeshTopology, Sequence[int]],
              m: Optional[int] = None,
              variance_target: Optional[float] = None,
              labels: Optional[Sequence[str]] = None,
              expression_specific_mean: bool = False) -> DeformationModel:
    """
    Principal displacement modes of a training set.

    Args:
        displacements: training fields, all with the same vertex count
        topology: mesh topology (or plain landmark indices) fixing I_z
        m: number of modes; at most min(sample count, 3N)
        variance_target: alternatively, smallest m whose cumulative explained
            variance ratio reaches this value
        labels: expression name per sample (needed for expression means)
        expression_specific_mean: center every sample on its expression's
            mean instead of the overall mean

    Raises:
        ValidationError: no samples, no mode selection, or m too large
    """
    if not displacements:
        raise ValidationError("no displacement samples given")
    if len({d.vertex_count for d in displacements}) > 1:
        raise ShapeMismatchError("displacement fields have different vertex counts")
    landmark_indices = topology.landmark_indices if isinstance(topology, MeshTopology) else topology

    data = np.stack([d.flat for d in displacements])
    n_samples, n_features = data.shape
    mean = data.mean(axis=0)

    label_means: Dict[str, np.ndarray] = {}
    if expression_specific_mean:
        if labels is None or len(labels) != n_samples:
            raise ValidationError("expression-specific means need one label per sample")
        labels = [str(lab) for lab in labels]
        for name in dict.fromkeys(labels):
            label_means[name] = data[[lab == name for lab in labels]].mean(axis=0)
        centered = data - np.stack([label_means[lab] for lab in labels])
    else:
        centered = data - mean

    _, singular, vt = np.linalg.svd(centered, full_matrices=False)
    # Deterministic signs: largest-magnitude entry of every mode positive
    signs = np.sign(vt[np.arange(vt.shape[0]), np.argmax(np.abs(vt), axis=1)])
    signs[signs == 0] = 1.0
    vt *= signs[:, None]

    variance = singular ** 2 / max(n_samples - 1, 1)
    total = variance.sum()
    ratio = variance / total if total > 0 else np.zeros_like(variance)

    limit = min(n_samples, n_features)
    if m is None:
        if variance_target is None:
            raise ValidationError("train_pca needs either m or variance_target")
        if not 0.0 < variance_target <= 1.0:
            raise ValidationError(f"variance_target must lie in (0, 1], got {variance_target}")
        reached = np.flatnonzero(np.cumsum(ratio) >= variance_target - 1e-12)
        m = int(reached[0]) + 1 if reached.size else vt.shape[0]
    if not 1 <= m <= limit:
        raise ValidationError(f"m too large: requested {m} modes, at most {limit} available")

    logger.trace("PCA", "modes selected", m=m, retained=float(ratio[:m].sum()))
    logger.info("Trained PCA deformation model", samples=n_samples, vertices=n_features // 3, modes=m)
    return DeformationModel(
        basis=vt[:m].T,
        mean=mean,
        landmark_indices=landmark_indices,
        explained_variance_ratio=ratio[:m],
        label_means=label_means,
    )


def reconstruction_errors(model: DeformationModel, displacements: Sequence[DisplacementField],
                          label: Optional[str] = None) -> np.ndarray:
    """RMS residual of projecting each field onto the model subspace."""
    data = np.stack([d.flat for d in displacements]) - model.mean_for(label)
    coefficients = scipy.linalg.lstsq(model.basis, data.T)[0]
    residual = data.T - model.basis @ coefficients
    return np.sqrt(np.mean(residual ** 2, axis=0))


def default_ridge(model: DeformationModel) -> float:
    """1e-8 · trace(AᵀA) / m with A the landmark rows of the basis."""
    return DEFAULT_RIDGE_FACTOR * float(np.sum(model.landmark_rows ** 2)) / model.mode_count


def _solve_ridge(a: np.ndarray, b: np.ndarray, ridge: float) -> np.ndarray:
    """argmin_c ||A c − b||² + ridge ||c||², column-wise for a matrix b."""
    if ridge < 0:
        raise ValidationError(f"ridge must be non-negative, got {ridge}")
    m = a.shape[1]
    if ridge == 0.0:
        rank = np.linalg.matrix_rank(a)
        if rank < m:
            raise SingularSystemError(
                f"landmark system is rank deficient (rank {rank} < {m} modes); use ridge > 0"
            )
        return scipy.linalg.lstsq(a, b)[0]
    augmented = np.vstack([a, np.sqrt(ridge) * np.eye(m)])
    rhs = np.vstack([b, np.zeros((m, b.shape[1]))])
    return scipy.linalg.lstsq(augmented, rhs)[0]


@evaluate()
@traceable()
def fit_coefficients(model: DeformationModel, d_target: Union[SparseDisplacement, np.ndarray],
                     ridge: Optional[float] = None, label: Optional[str] = None) -> np.ndarray:
    """
    Coefficients c minimizing ||landmark_rows·c + mean_L − d||² + ridge·||c||².

    ``ridge=None`` uses ``default_ridge(model)``; ``ridge=0`` is plain least squares.

    Raises:
        ShapeMismatchError: target is not k×3 for the model's k
        SingularSystemError: rank-deficient landmark rows with ridge = 0
    """
    target = d_target.flat if isinstance(d_target, SparseDisplacement) else np.asarray(d_target, dtype=float).reshape(-1)
    if target.shape != (3 * model.n_landmarks,):
        raise ShapeMismatchError(
            f"target has {target.size} values, model expects {3 * model.n_landmarks} (k={model.n_landmarks})"
        )
    if ridge is None:
        ridge = default_ridge(model)
    rhs = (target - model.mean_landmarks(label))[:, None]
    coefficients = _solve_ridge(model.landmark_rows, rhs, ridge)[:, 0]
    logger.trace("FIT", "solved", ridge=ridge,
                 residual=float(np.linalg.norm(model.landmark_rows @ coefficients - rhs[:, 0])))
    return coefficients


def apply_deformation(model: DeformationModel, coefficients: np.ndarray, neutral: Mesh,
                      label: Optional[str] = None) -> Tuple[Mesh, DisplacementField]:
    """
    Expressive mesh S_n + D with D = basis·c + mean.

    Raises:
        ShapeMismatchError: wrong coefficient count
        TopologyMismatchError: the neutral mesh has a different vertex count
    """
    coefficients = np.asarray(coefficients, dtype=float).reshape(-1)
    if coefficients.shape != (model.mode_count,):
        raise ShapeMismatchError(f"expected {model.mode_count} coefficients, got {coefficients.size}")
    if neutral.vertex_count != model.vertex_count:
        raise TopologyMismatchError(
            f"mesh has {neutral.vertex_count} vertices, model has {model.vertex_count}"
        )
    dense = (model.basis @ coefficients + model.mean_for(label)).reshape(-1, 3)
    return neutral.with_vertices(neutral.vertices + dense), DisplacementField(dense)


@evaluate()
def deform_sequence(neutral: Mesh, lms: LandmarkSequence, model: DeformationModel,
                    ridge: Optional[float] = None, label: Optional[str] = None) -> List[Mesh]:
    """
    One deformed mesh per landmark frame. Frame 0 of ``lms`` is taken as the
    neutral landmark configuration; frame t is fitted to lms[t] - lms[0].

    ``ridge=None`` uses ``default_ridge(model)``.

    Raises:
        ShapeMismatchError: landmark count differs from the model's
        TopologyMismatchError: neutral mesh incompatible with the model
    """
    if lms.n_landmarks != model.n_landmarks:
        raise ShapeMismatchError(f"sequence has {lms.n_landmarks} landmarks, model has {model.n_landmarks}")
    if neutral.vertex_count != model.vertex_count or not np.array_equal(
            neutral.topology.landmark_indices, model.landmark_indices):
        raise TopologyMismatchError("neutral mesh topology does not match the deformation model")
    if ridge is None:
        ridge = default_ridge(model)

    sparse = (lms.frames - lms.frames[0]).reshape(lms.n_frames, -1)
    rhs = (sparse - model.mean_landmarks(label)).T
    coefficients = _solve_ridge(model.landmark_rows, rhs, ridge)
    dense = (model.basis @ coefficients).T + model.mean_for(label)
    return [neutral.with_vertices(neutral.vertices + d.reshape(-1, 3)) for d in dense]
