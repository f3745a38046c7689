"""
Wasserstein loss algebra for motions on the SRVF sphere.

LOCATION: morph4d/gan/losses.py
PURPOSE: Critic loss with gradient penalty, the tangent-space interpolant
    the penalty is evaluated at, the tangent reconstruction loss and the
    weighted generator objective

Critic and generator networks are not part of this package: callers pass
their scores and gradient norms in, and generator outputs as tangent
vectors at the reference point p.
"""

from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from morph4d.errors import ShapeMismatchError, ValidationError
from morph4d.trajectory.sphere import exp_map, log_map
from morph4d.trajectory.types import Srvf, TangentVector

DEFAULT_ALPHA1 = 1.0
DEFAULT_ALPHA2 = 10.0
DEFAULT_LAMBDA_GP = 10.0


class LossWeights(BaseModel):
    """Weights of the motion generator objective and the gradient penalty."""
    model_config = ConfigDict(frozen=True, extra='forbid')

    alpha1: float = Field(default=DEFAULT_ALPHA1, ge=0.0, description="Weight of the adversarial term")
    alpha2: float = Field(default=DEFAULT_ALPHA2, ge=0.0, description="Weight of the reconstruction term")
    lambda_gp: float = Field(default=DEFAULT_LAMBDA_GP, ge=0.0, description="Gradient penalty weight")


def _as_scores(values: Sequence[float], what: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.size == 0:
        raise ValidationError(f"{what} must not be empty")
    return arr


def _generated_tangent(g_tangent: TangentVector, p: Srvf) -> np.ndarray:
    """log_p(exp_p(g)) samples."""
    if g_tangent.samples.shape != p.samples.shape:
        raise ShapeMismatchError(
            f"generator output {g_tangent.samples.shape} does not match reference point {p.samples.shape}"
        )
    based = TangentVector(g_tangent.samples, p)
    return log_map(p, exp_map(p, based)).samples


def gp_interpolate(q_real: Srvf, g_tangent: TangentVector, tau: float, p: Srvf) -> TangentVector:
    """
    (1 − τ)·log_p(q_real) + τ·log_p(exp_p(g)): the point on the straight
    tangent-space segment between a real and a generated motion at which
    the gradient penalty is taken.
    """
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau must lie in [0, 1], got {tau}")
    real = log_map(p, q_real).samples
    fake = _generated_tangent(g_tangent, p)
    return TangentVector((1.0 - tau) * real + tau * fake, p)


def adversarial_loss(real_scores: Sequence[float], fake_scores: Sequence[float],
                     grad_norms: Sequence[float], weights: Optional[LossWeights] = None) -> float:
    """mean(real) − mean(fake) + λ_gp·mean((‖∇‖ − 1)²)."""
    weights = weights or LossWeights()
    real = _as_scores(real_scores, "real scores")
    fake = _as_scores(fake_scores, "fake scores")
    norms = _as_scores(grad_norms, "gradient norms")
    if norms.min() < 0.0:
        raise ValidationError("gradient norms must be nonnegative")
    penalty = np.mean((norms - 1.0) ** 2)
    return float(real.mean() - fake.mean() + weights.lambda_gp * penalty)


def generator_adversarial_loss(fake_scores: Sequence[float]) -> float:
    return float(-_as_scores(fake_scores, "fake scores").mean())


def reconstruction_loss_tangent(g_tangent: TangentVector, q_gt: Srvf, p: Srvf) -> float:
    """Elementwise L1 distance between log_p(exp_p(g)) and log_p(q_gt)."""
    fake = _generated_tangent(g_tangent, p)
    real = log_map(p, q_gt).samples
    return float(np.abs(fake - real).sum())


def motion_total_loss(l_adv: float, l_r: float, weights: Optional[LossWeights] = None) -> float:
    weights = weights or LossWeights()
    return weights.alpha1 * l_adv + weights.alpha2 * l_r
