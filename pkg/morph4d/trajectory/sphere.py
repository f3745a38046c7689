"""
Riemannian geometry of the unit sphere of SRVFs.

LOCATION: morph4d/trajectory/sphere.py
PURPOSE: Inner product, geodesic distance, exponential and logarithm maps,
    geodesic interpolation and the intrinsic (Karcher) mean

TRACE POINTS:
    - LOG_MAP: small-angle branch
    - KARCHER: per-iteration residual of the mean tangent

All inner products are discrete L2 products weighted by the sample spacing:
<a, b> = sum(a_i . b_i) * dt.
"""

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from morph4d.errors import AntipodalPointError, ConvergenceError, ShapeMismatchError, ValidationError
from morph4d.trajectory.types import Srvf, TangentVector
from morph4d.utils import evaluate, get_logger, run_metrics, traceable

logger = get_logger(__name__)

NUMERIC_EPSILON = 1e-12
KARCHER_TOL = 1e-8
KARCHER_MAX_ITER = 100
UNIT_NORM_TOL = 1e-9

SphereElement = Union[Srvf, TangentVector]


def _check_compatible(a: SphereElement, b: SphereElement):
    if a.samples.shape != b.samples.shape:
        raise ShapeMismatchError(f"shape mismatch: {a.samples.shape} vs {b.samples.shape}")
    if not np.isclose(a.dt, b.dt, rtol=1e-12, atol=0.0):
        raise ShapeMismatchError(f"sample spacing mismatch: {a.dt} vs {b.dt}")


def inner_product(a: SphereElement, b: SphereElement) -> float:
    """Discrete L2 inner product of two SRVFs or tangent vectors."""
    _check_compatible(a, b)
    return float(np.sum(a.samples * b.samples) * a.dt)


def srvf_norm(q: SphereElement) -> float:
    return float(np.sqrt(np.sum(q.samples ** 2) * q.dt))


def _angle_and_direction(p: Srvf, q: Srvf):
    """Angle between unit p and q, and the component of q orthogonal to p."""
    cos_theta = inner_product(p, q)
    perpendicular = q.samples - cos_theta * p.samples
    sin_theta = float(np.sqrt(np.sum(perpendicular ** 2) * p.dt))
    return float(np.arctan2(sin_theta, cos_theta)), perpendicular, sin_theta


def geodesic_distance(q1: Srvf, q2: Srvf) -> float:
    """
    Arc length between two unit SRVFs, in radians within [0, π].

    Equal to arccos of the clamped inner product; evaluated through atan2 so
    it stays accurate near 0 and π.
    """
    theta, _, _ = _angle_and_direction(q1, q2)
    return theta


def exp_map(p: Srvf, v: TangentVector, eps: float = NUMERIC_EPSILON) -> Srvf:
    """
    Exponential map at ``p``: cos|v|·p + sin|v|·v/|v|.

    Returns ``p`` itself when |v| < eps.
    """
    _check_compatible(p, v)
    length = v.norm()
    if length < eps:
        return p
    samples = np.cos(length) * p.samples + (np.sin(length) / length) * v.samples
    samples /= np.sqrt(np.sum(samples ** 2) * p.dt)
    return Srvf(samples, p.dt, scale=p.scale)


def log_map(p: Srvf, q: Srvf, eps: float = NUMERIC_EPSILON) -> TangentVector:
    """
    Logarithm map at ``p``: (θ/sin θ)·(q − cos θ·p) with θ = d(p, q).

    Raises:
        AntipodalPointError: θ within ``eps`` of π
    """
    theta, perpendicular, sin_theta = _angle_and_direction(p, q)
    if theta < eps:
        logger.trace("LOG_MAP", "small angle branch", theta=theta)
        return TangentVector(np.zeros_like(p.samples), p)
    if np.pi - theta < eps or sin_theta == 0.0:
        raise AntipodalPointError(f"antipodal point: logarithm undefined (θ = {theta!r})")
    return TangentVector(perpendicular * (theta / sin_theta), p)


def geodesic_interpolate(q1: Srvf, q2: Srvf, tau: float, eps: float = NUMERIC_EPSILON) -> Srvf:
    """
    Point at fraction ``tau`` of the geodesic from ``q1`` to ``q2``.

    ψ(τ) = [sin((1−τ)θ)·q1 + sin(τθ)·q2] / sin θ. The decoding scale moves
    linearly from ``q1.scale`` to ``q2.scale``.

    Raises:
        ValidationError: tau outside [0, 1]
        AntipodalPointError: q1 and q2 antipodal
    """
    if not 0.0 <= tau <= 1.0:
        raise ValidationError(f"tau must lie in [0, 1], got {tau}")
    _check_compatible(q1, q2)
    theta, _, _ = _angle_and_direction(q1, q2)
    scale = (1.0 - tau) * q1.scale + tau * q2.scale
    if theta < eps:
        return Srvf(q1.samples, q1.dt, scale=scale)
    if np.pi - theta < eps:
        raise AntipodalPointError(f"antipodal point: no unique geodesic (θ = {theta!r})")
    if tau == 0.0:
        return q1
    if tau == 1.0:
        return q2
    samples = (np.sin((1.0 - tau) * theta) * q1.samples + np.sin(tau * theta) * q2.samples) / np.sin(theta)
    return Srvf(samples, q1.dt, scale=scale)


@evaluate()
@traceable()
def karcher_mean(qs: Sequence[Srvf], tol: float = KARCHER_TOL, max_iter: int = KARCHER_MAX_ITER,
                 eps: float = NUMERIC_EPSILON) -> Srvf:
    """
    Intrinsic mean of SRVFs on the sphere.

    Iterates m ← exp_m(mean_i log_m(q_i)) from the renormalized extrinsic
    mean until the mean tangent is shorter than ``tol``. The result carries
    the arithmetic mean of the input scales.

    Raises:
        ValidationError: empty input
        ConvergenceError: ``max_iter`` reached; ``last_iterate`` holds the estimate
    """
    qs = list(qs)
    if not qs:
        raise ValidationError("karcher_mean needs at least one SRVF")
    for q in qs[1:]:
        _check_compatible(qs[0], q)
    if len(qs) == 1:
        return qs[0]

    dt = qs[0].dt
    scale = float(np.mean([q.scale for q in qs]))
    start = np.mean([q.samples for q in qs], axis=0)
    start_norm = np.sqrt(np.sum(start ** 2) * dt)
    mean = Srvf(start / start_norm, dt) if start_norm > eps else qs[0]

    residual = np.inf
    for iteration in range(1, max_iter + 1):
        step = np.mean([log_map(mean, q, eps).samples for q in qs], axis=0)
        tangent = TangentVector(step, mean)
        residual = tangent.norm()
        logger.trace("KARCHER", "iteration", step=iteration, residual=residual)
        if residual < tol:
            run_metrics.add_counters("karcher_mean", iterations=iteration)
            logger.observe("karcher_mean", success=True, iterations=iteration, residual=residual)
            return Srvf(mean.samples, dt, scale=scale)
        mean = exp_map(mean, tangent, eps)

    run_metrics.add_counters("karcher_mean", iterations=max_iter)
    logger.observe("karcher_mean", success=False, iterations=max_iter, residual=residual)
    raise ConvergenceError(
        f"karcher mean did not converge in {max_iter} iterations (residual {residual:.3e})",
        last_iterate=Srvf(mean.samples, dt, scale=scale),
        residual=residual,
    )


@dataclass(frozen=True)
class SphereConfig:
    """
    Reference point where tangent spaces are taken, plus the small-angle guard.
    """
    reference_point: Srvf
    numeric_epsilon: float = NUMERIC_EPSILON

    def __post_init__(self):
        norm = srvf_norm(self.reference_point)
        if abs(norm ** 2 - 1.0) > UNIT_NORM_TOL:
            raise ValidationError(f"reference point must have unit norm, got {norm:.12g}")

    @classmethod
    def from_motions(cls, qs: Sequence[Srvf], tol: float = KARCHER_TOL,
                     max_iter: int = KARCHER_MAX_ITER,
                     numeric_epsilon: float = NUMERIC_EPSILON) -> "SphereConfig":
        """Reference point = Karcher mean of the given motions."""
        return cls(karcher_mean(qs, tol, max_iter, numeric_epsilon), numeric_epsilon)

    def log(self, q: Srvf) -> TangentVector:
        return log_map(self.reference_point, q, self.numeric_epsilon)

    def exp(self, v: TangentVector) -> Srvf:
        return exp_map(self.reference_point, v, self.numeric_epsilon)
