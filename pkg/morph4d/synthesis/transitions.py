"""
Transition Synthesis - peak-to-peak motions on the SRVF sphere

LOCATION: morph4d/synthesis/transitions.py
PURPOSE: Build expression-to-expression landmark sequences from existing
    neutral-to-peak motions and chain them into long composed sequences

KEY FEATURES:
    1. PEAK SPLITTING: divide a neutral-peak-neutral sequence at its apex
    2. PEAK-PEAK SYNTHESIS: walk the geodesic between two onset motions and
       keep the last frame of every decoded interpolant
    3. PROTOTYPE FILTERING: keep the synthesized transitions whose endpoints
       lie closest to the average expression peaks
    4. COMPOSITION: chain transitions, each starting where the previous ended
    5. TRANSFER: replay a motion from another face's initial configuration

TRACE POINTS:
    - SPLIT: detected peak index
    - SYNTH: interpolation angle between the two onsets
    - SELECT: kept/total per label pair
    - COMPOSE: junction frames
"""

from dataclasses import dataclass
from itertools import permutations
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from morph4d.errors import (
    DiscontinuousChainError,
    IncoherentInitError,
    IncompatibleMotionError,
    MissingMotionError,
    MissingPrototypeError,
    NoInteriorPeakError,
    SequenceTooShortError,
    ShapeMismatchError,
    ValidationError,
)
from morph4d.synthesis.labels import ExpressionLabel
from morph4d.trajectory import (
    LandmarkSequence,
    Srvf,
    as_frame,
    geodesic_distance,
    geodesic_interpolate,
    srvf_decode,
    srvf_encode,
)
from morph4d.trajectory.types import ArrayLike, LandmarkFrame
from morph4d.utils import evaluate, get_logger, observe, traceable

logger = get_logger(__name__)

DEFAULT_N_STEPS = 30
INIT_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class LabeledMotion:
    """An SRVF motion with its start/end expressions and its α(0)."""
    motion: Srvf
    start: ExpressionLabel
    end: ExpressionLabel
    init: LandmarkFrame

    def __post_init__(self):
        init = as_frame(self.init)
        if init.shape[0] != self.motion.n_landmarks:
            raise ShapeMismatchError(
                f"initial frame has {init.shape[0]} landmarks, motion encodes {self.motion.n_landmarks}"
            )
        object.__setattr__(self, 'init', init)

    @property
    def is_onset(self) -> bool:
        return self.start.is_neutral and not self.end.is_neutral

    def decode(self, init: Optional[ArrayLike] = None) -> LandmarkSequence:
        """Decode at the recorded scale, from ``init`` or the motion's own α(0)."""
        return srvf_decode(self.motion, self.init if init is None else init, restore_scale=True)


@dataclass(frozen=True, eq=False)
class LabeledSequence:
    sequence: LandmarkSequence
    start: ExpressionLabel
    end: ExpressionLabel

    @property
    def pair(self) -> Tuple[int, int]:
        return self.start.id, self.end.id


@dataclass(frozen=True, eq=False)
class ExpressionPrototype:
    """Cross-subject average landmark configuration of one expression peak."""
    label: ExpressionLabel
    frame: LandmarkFrame


def motion_from_sequence(seq: LandmarkSequence, start: ExpressionLabel, end: ExpressionLabel) -> LabeledMotion:
    """Encode ``seq`` and keep its first frame as the decoding origin."""
    return LabeledMotion(srvf_encode(seq), start, end, seq.frames[0])


def resample_sequence(seq: LandmarkSequence, n_frames: int) -> LandmarkSequence:
    """
    Linearly resample ``seq`` to ``n_frames`` frames over the same time span.

    Onsets cut from recordings of different lengths must share a frame count
    before they can be interpolated on the sphere.
    """
    if n_frames < 2:
        raise ValidationError(f"n_frames must be at least 2, got {n_frames}")
    if seq.n_frames < 2:
        raise SequenceTooShortError(f"sequence too short: need at least 2 frames, got {seq.n_frames}")
    source_t = np.linspace(0.0, 1.0, seq.n_frames)
    target_t = np.linspace(0.0, 1.0, n_frames)
    flat = seq.frames.reshape(seq.n_frames, -1)
    resampled = np.stack([np.interp(target_t, source_t, flat[:, j]) for j in range(flat.shape[1])], axis=1)
    span = seq.dt * (seq.n_frames - 1)
    return LandmarkSequence(resampled.reshape(n_frames, seq.n_landmarks, 3), span / (n_frames - 1))


@traceable()
def split_at_peak(seq: LandmarkSequence,
                  peak_index: Optional[int] = None) -> Tuple[LandmarkSequence, LandmarkSequence]:
    """
    Split a neutral-peak-neutral sequence into onset and offset halves.

    The peak frame belongs to both halves. Without ``peak_index`` the peak is
    the frame with the largest mean landmark displacement from frame 0.

    Raises:
        SequenceTooShortError: fewer than three frames
        NoInteriorPeakError: the detected peak is the first or last frame
        ValidationError: an explicit index that leaves a half shorter than 2 frames
    """
    if seq.n_frames < 3:
        raise SequenceTooShortError(f"sequence too short: need at least 3 frames, got {seq.n_frames}")
    if peak_index is None:
        displacement = np.linalg.norm(seq.frames - seq.frames[0], axis=2).mean(axis=1)
        peak_index = int(np.argmax(displacement))
        if peak_index in (0, seq.n_frames - 1):
            raise NoInteriorPeakError(
                f"no interior peak: largest displacement at frame {peak_index} of {seq.n_frames}"
            )
        logger.trace("SPLIT", "detected peak", peak_index=peak_index)
    elif not 1 <= peak_index <= seq.n_frames - 2:
        raise ValidationError(f"peak_index must lie in [1, {seq.n_frames - 2}], got {peak_index}")
    onset = LandmarkSequence(seq.frames[:peak_index + 1], seq.dt)
    offset = LandmarkSequence(seq.frames[peak_index:], seq.dt)
    return onset, offset


@evaluate()
def synth_peak_transition(m1: LabeledMotion, m2: LabeledMotion,
                          n_steps: int = DEFAULT_N_STEPS,
                          init_tolerance: float = INIT_TOLERANCE) -> LabeledSequence:
    """
    Synthesize the transition from the peak of ``m1`` to the peak of ``m2``.

    Both onsets are interpolated along their geodesic at n_steps evenly spaced
    fractions; each interpolant is decoded from the shared neutral frame and
    its last frame becomes one frame of the output.

    Raises:
        IncompatibleMotionError: a motion is not neutral-to-peak
        IncoherentInitError: the two motions start from different configurations
        ValidationError: n_steps < 2
    """
    if n_steps < 2:
        raise ValidationError(f"n_steps must be at least 2, got {n_steps}")
    for motion in (m1, m2):
        if not motion.is_onset:
            raise IncompatibleMotionError(
                f"only onset (neutral-to-peak) motions can be interpolated, got {motion.start}->{motion.end}"
            )
    if m1.init.shape != m2.init.shape or not np.allclose(m1.init, m2.init, rtol=0.0, atol=init_tolerance):
        raise IncoherentInitError("incoherent initial configuration: onsets start from different frames")

    logger.trace("SYNTH", "geodesic", start=m1.end, end=m2.end,
                 theta=geodesic_distance(m1.motion, m2.motion))
    frames = np.empty((n_steps, m1.motion.n_landmarks, 3))
    for i, tau in enumerate(np.linspace(0.0, 1.0, n_steps)):
        q = geodesic_interpolate(m1.motion, m2.motion, float(tau))
        frames[i] = srvf_decode(q, m1.init, restore_scale=True).frames[-1]
    return LabeledSequence(LandmarkSequence(frames), m1.end, m2.end)


@observe("synthesize_transition_bank")
def synthesize_transition_bank(onsets: Sequence[LabeledMotion],
                               n_steps: int = DEFAULT_N_STEPS) -> List[LabeledSequence]:
    """
    Peak-peak transitions for every ordered pair of onsets with different
    end expressions.
    """
    bank = [
        synth_peak_transition(a, b, n_steps)
        for a, b in permutations(onsets, 2)
        if a.end.id != b.end.id
    ]
    logger.info("Synthesized transition bank", onsets=len(onsets), transitions=len(bank))
    return bank


def expression_prototype(peaks: Sequence[Tuple[object, ArrayLike]],
                         label: ExpressionLabel) -> ExpressionPrototype:
    """
    Coordinate-wise mean of per-subject peak frames.

    Raises:
        ValidationError: no peaks
        ShapeMismatchError: frames with different landmark counts
    """
    if not peaks:
        raise ValidationError(f"no peak frames given for '{label}'")
    frames = [as_frame(frame) for _, frame in peaks]
    if len({f.shape for f in frames}) > 1:
        raise ShapeMismatchError(f"peak frames for '{label}' have different landmark counts")
    return ExpressionPrototype(label, np.mean(frames, axis=0))


def _mean_landmark_distance(a: np.ndarray, b: np.ndarray) -> float:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"frame shapes differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(a - b, axis=1).mean())


def score_transition(transition: LabeledSequence,
                     prototypes: Dict[int, ExpressionPrototype]) -> float:
    """
    Mean landmark distance of the first frame to the start prototype plus that
    of the last frame to the end prototype.
    """
    for label in (transition.start, transition.end):
        if label.id not in prototypes:
            raise MissingPrototypeError(f"no prototype for expression '{label}'")
    seq = transition.sequence
    return (_mean_landmark_distance(seq.frames[0], prototypes[transition.start.id].frame)
            + _mean_landmark_distance(seq.frames[-1], prototypes[transition.end.id].frame))


@traceable()
def select_by_prototype(transitions: Iterable[LabeledSequence],
                        prototypes: Iterable[ExpressionPrototype],
                        top_k: int) -> List[LabeledSequence]:
    """
    Keep the ``top_k`` lowest-scoring transitions of every label pair.

    Kept transitions are returned in their input order; equal scores keep the
    earlier candidate.

    Raises:
        MissingPrototypeError: a start or end label without prototype
    """
    if top_k < 1:
        raise ValidationError(f"top_k must be at least 1, got {top_k}")
    by_label = {p.label.id: p for p in prototypes}
    transitions = list(transitions)

    groups: Dict[Tuple[int, int], List[Tuple[float, int]]] = {}
    for index, transition in enumerate(transitions):
        groups.setdefault(transition.pair, []).append((score_transition(transition, by_label), index))

    kept = set()
    for pair, scored in groups.items():
        best = sorted(scored)[:top_k]
        kept.update(index for _, index in best)
        logger.trace("SELECT", "label pair", pair=pair, kept=len(best), total=len(scored))
    return [t for i, t in enumerate(transitions) if i in kept]


def onset_prototypes(onsets: Sequence[LabeledMotion]) -> List[ExpressionPrototype]:
    """Prototype of every peak expression reached by ``onsets``, from their decoded last frames."""
    peaks: Dict[int, List[Tuple[int, LandmarkFrame]]] = {}
    labels: Dict[int, ExpressionLabel] = {}
    for i, onset in enumerate(onsets):
        peaks.setdefault(onset.end.id, []).append((i, onset.decode().frames[-1]))
        labels[onset.end.id] = onset.end
    return [expression_prototype(peaks[label_id], labels[label_id]) for label_id in sorted(peaks)]


def resolve_recipe(labels: Sequence[ExpressionLabel], bank: Sequence[LabeledMotion]) -> List[LabeledMotion]:
    """
    One motion per consecutive label pair of a recipe, the first match in
    ``bank`` order.

    Raises:
        ValidationError: fewer than two labels
        MissingMotionError: no motion in the bank goes from one label to the next
    """
    if len(labels) < 2:
        raise ValidationError(f"a recipe needs at least two labels, got {len(labels)}")
    by_pair: Dict[Tuple[int, int], LabeledMotion] = {}
    for motion in bank:
        by_pair.setdefault((motion.start.id, motion.end.id), motion)
    motions = []
    for a, b in zip(labels, labels[1:]):
        motion = by_pair.get((a.id, b.id))
        if motion is None:
            raise MissingMotionError(f"no motion from '{a}' to '{b}' in the bank ({len(bank)} motions)")
        motions.append(motion)
    return motions


@evaluate()
def compose_transitions(motions: Sequence[LabeledMotion], init: ArrayLike) -> LandmarkSequence:
    """
    Chain motions into one sequence, each decoded from the last frame of the
    previous one. The duplicated junction frames are dropped, so the output
    has sum(T_i) - (n - 1) frames.

    Raises:
        ValidationError: empty motion list
        DiscontinuousChainError: the end label of a motion differs from the
            start label of the next
    """
    motions = list(motions)
    if not motions:
        raise ValidationError("compose_transitions needs at least one motion")
    for i, (a, b) in enumerate(zip(motions, motions[1:])):
        if a.end.id != b.start.id:
            raise DiscontinuousChainError(
                f"discontinuous transition chain: motion {i} ends at '{a.end}', "
                f"motion {i + 1} starts at '{b.start}'"
            )

    parts = [motions[0].decode(init).frames]
    for motion in motions[1:]:
        decoded = motion.decode(parts[-1][-1]).frames
        logger.trace("COMPOSE", "junction", label=motion.start)
        parts.append(decoded[1:])
    return LandmarkSequence(np.concatenate(parts), motions[0].motion.dt)


@evaluate()
def transfer_motion(source: LandmarkSequence, target_init: ArrayLike) -> LandmarkSequence:
    """
    Replay the motion of ``source`` starting from ``target_init``.

    Raises:
        ShapeMismatchError: different landmark counts
        ZeroMotionError: ``source`` does not move
    """
    target_init = as_frame(target_init)
    if target_init.shape[0] != source.n_landmarks:
        raise ShapeMismatchError(
            f"target has {target_init.shape[0]} landmarks, source has {source.n_landmarks}"
        )
    return srvf_decode(srvf_encode(source), target_init, restore_scale=True)
