"""
Condition codes for the conditional motion generator.

LOCATION: morph4d/gan/conditions.py
PURPOSE: One-hot start/end expression labels concatenated with a noise
    vector, and the flat view a generator consumes
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from morph4d.errors import LabelError, ShapeMismatchError, ValidationError, require_finite
from morph4d.synthesis.labels import DEFAULT_LABEL_NAMES, ExpressionLabel

NOISE_SIZE = 128
DEFAULT_N_LABELS = len(DEFAULT_LABEL_NAMES)


def _one_hot(label_id: int, n_labels: int) -> np.ndarray:
    if not 0 <= label_id < n_labels:
        raise LabelError(f"label id {label_id} out of range [0, {n_labels - 1}]")
    code = np.zeros(n_labels)
    code[label_id] = 1.0
    return code


def _check_one_hot(code: np.ndarray, what: str):
    if code.ndim != 1 or np.count_nonzero(code == 1.0) != 1 or np.count_nonzero(code) != 1:
        raise ValidationError(f"{what} is not a one-hot vector")


@dataclass(frozen=True, eq=False)
class ConditionCode:
    start_onehot: np.ndarray
    end_onehot: np.ndarray
    noise: np.ndarray

    def __post_init__(self):
        start = np.array(self.start_onehot, dtype=float).reshape(-1)
        end = np.array(self.end_onehot, dtype=float).reshape(-1)
        noise = np.array(self.noise, dtype=float).reshape(-1)
        _check_one_hot(start, "start label code")
        _check_one_hot(end, "end label code")
        if start.size != end.size:
            raise ShapeMismatchError(f"label codes differ in length: {start.size} vs {end.size}")
        require_finite(noise, "condition noise")
        for arr in (start, end, noise):
            arr.setflags(write=False)
        object.__setattr__(self, 'start_onehot', start)
        object.__setattr__(self, 'end_onehot', end)
        object.__setattr__(self, 'noise', noise)

    @property
    def n_labels(self) -> int:
        return self.start_onehot.size

    @property
    def start_id(self) -> int:
        return int(np.argmax(self.start_onehot))

    @property
    def end_id(self) -> int:
        return int(np.argmax(self.end_onehot))

    @property
    def flat(self) -> np.ndarray:
        """[start one-hot | end one-hot | noise], length 2L + len(noise)."""
        return np.concatenate([self.start_onehot, self.end_onehot, self.noise])

    @classmethod
    def from_flat(cls, vec, n_labels: int = DEFAULT_N_LABELS) -> "ConditionCode":
        vec = np.asarray(vec, dtype=float).reshape(-1)
        if vec.size < 2 * n_labels:
            raise ShapeMismatchError(f"flat condition of length {vec.size} is shorter than 2*{n_labels}")
        return cls(vec[:n_labels], vec[n_labels:2 * n_labels], vec[2 * n_labels:])


def encode_condition(start: ExpressionLabel, end: ExpressionLabel, noise,
                     n_labels: int = DEFAULT_N_LABELS, noise_size: int = NOISE_SIZE) -> ConditionCode:
    """
    Condition code for a ``start`` → ``end`` transition.

    Raises:
        LabelError: a label id outside [0, n_labels)
        ShapeMismatchError: noise is not ``noise_size`` long
    """
    noise = np.asarray(noise, dtype=float).reshape(-1)
    if noise.size != noise_size:
        raise ShapeMismatchError(f"noise must have {noise_size} entries, got {noise.size}")
    return ConditionCode(_one_hot(start.id, n_labels), _one_hot(end.id, n_labels), noise)


def sample_noise(rng: Optional[np.random.Generator] = None, size: int = NOISE_SIZE) -> np.ndarray:
    """Standard normal noise vector."""
    rng = rng if rng is not None else np.random.default_rng()
    return rng.standard_normal(size)
