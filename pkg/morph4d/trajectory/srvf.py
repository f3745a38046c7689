"""
SRVF codec for landmark trajectories.

LOCATION: morph4d/trajectory/srvf.py
PURPOSE: Map landmark sequences to points of the unit SRVF sphere and back

TRACE POINTS:
    - NORMALIZE: per-frame centering and the single global scale
    - ENCODE: zero-velocity intervals and the discarded scale
    - DECODE: cumulative reconstruction from the initial frame

The discretization uses forward differences for encoding and an explicit
Euler cumulative sum for decoding, built as exact mutual inverses:

    q_i     = v_i / sqrt(|v_i|),   v_i = (frame_{i+1} - frame_i) / dt
    frame_{i+1} = frame_i + dt * |q_i| * q_i
"""

import numpy as np

from morph4d.errors import DegenerateFrameError, SequenceTooShortError, ShapeMismatchError, ZeroMotionError
from morph4d.trajectory.types import ArrayLike, LandmarkSequence, Srvf, as_frame
from morph4d.utils import get_logger, traceable

logger = get_logger(__name__)

# Relative size below which a centered frame counts as collapsed
_DEGENERATE_TOL = 1e-12


@traceable()
def center_normalize(seq: LandmarkSequence) -> LandmarkSequence:
    """
    Center every frame on its centroid and scale the whole sequence once.

    The scale makes the first centered frame unit Frobenius norm; one factor
    for all frames keeps the motion shape.

    Raises:
        DegenerateFrameError: a frame whose landmarks all coincide
    """
    frames = seq.frames
    centered = frames - frames.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(centered.reshape(seq.n_frames, -1), axis=1)
    magnitude = np.maximum(np.abs(frames).reshape(seq.n_frames, -1).max(axis=1), 1.0)
    collapsed = np.flatnonzero(norms <= _DEGENERATE_TOL * magnitude)
    if collapsed.size:
        raise DegenerateFrameError(
            f"degenerate frame: all landmarks coincide in frame {int(collapsed[0])}"
        )
    logger.trace("NORMALIZE", "global scale", scale=float(norms[0]))
    return LandmarkSequence(centered / norms[0], seq.dt)


@traceable()
def srvf_encode(seq: LandmarkSequence) -> Srvf:
    """
    Encode a landmark sequence as a unit-norm SRVF.

    Intervals without motion map to zero samples. The norm removed by the
    normalization is kept in ``Srvf.scale``.

    Raises:
        SequenceTooShortError: fewer than two frames
        ZeroMotionError: no interval moves, so the SRVF cannot be normalized
    """
    if seq.n_frames < 2:
        raise SequenceTooShortError(f"sequence too short: need at least 2 frames, got {seq.n_frames}")

    velocity = np.diff(seq.frames, axis=0).reshape(seq.n_frames - 1, -1) / seq.dt
    speed = np.linalg.norm(velocity, axis=1)
    moving = speed > 0
    samples = np.zeros_like(velocity)
    samples[moving] = velocity[moving] / np.sqrt(speed[moving])[:, None]

    norm = float(np.sqrt(np.sum(samples ** 2) * seq.dt))
    if norm == 0.0:
        raise ZeroMotionError("zero motion: every interval has zero velocity")
    if not moving.all():
        logger.trace("ENCODE", "zero-velocity intervals", count=int((~moving).sum()))
    return Srvf(samples / norm, seq.dt, scale=norm)


@traceable()
def srvf_decode(q: Srvf, init: ArrayLike, restore_scale: bool = False) -> LandmarkSequence:
    """
    Rebuild the landmark sequence of ``q`` starting from ``init``.

    Args:
        q: SRVF to decode
        init: k×3 configuration at t = 0
        restore_scale: multiply back the norm removed by ``srvf_encode``;
            without it the decoded curve has unit length

    Raises:
        ShapeMismatchError: ``init`` has a different landmark count than ``q``
    """
    init = as_frame(init)
    if init.shape[0] != q.n_landmarks:
        raise ShapeMismatchError(
            f"initial frame has {init.shape[0]} landmarks, SRVF encodes {q.n_landmarks}"
        )
    samples = q.samples
    speed = np.linalg.norm(samples, axis=1)
    velocity = speed[:, None] * samples
    if restore_scale:
        velocity = velocity * q.scale ** 2
    steps = (q.dt * velocity).reshape(q.n_samples, q.n_landmarks, 3)
    frames = np.empty((q.n_samples + 1, q.n_landmarks, 3))
    frames[0] = init
    frames[1:] = init + np.cumsum(steps, axis=0)
    return LandmarkSequence(frames, q.dt)
