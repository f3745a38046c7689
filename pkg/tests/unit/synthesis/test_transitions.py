"""
Tests for transition synthesis, prototype filtering, composition and transfer

LOCATION: tests/unit/synthesis/test_transitions.py
"""
import numpy as np
import pytest

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
from morph4d.synthesis import (
    ExpressionPrototype,
    LabeledSequence,
    compose_transitions,
    expression_prototype,
    motion_from_sequence,
    onset_prototypes,
    resample_sequence,
    resolve_recipe,
    score_transition,
    select_by_prototype,
    split_at_peak,
    synth_peak_transition,
    synthesize_transition_bank,
    transfer_motion,
)
from morph4d.trajectory import LandmarkSequence
from tests.helpers.synthetic import linear_onset


def constant_transition(frame, start, end, n_frames=5):
    return LabeledSequence(LandmarkSequence(np.repeat(frame[None], n_frames, axis=0)), start, end)


class TestMotions:
    def test_motion_keeps_first_frame(self, make_trajectory, labels):
        seq = make_trajectory(n_landmarks=6)
        motion = motion_from_sequence(seq, labels.neutral, labels["eyebrow"])
        np.testing.assert_array_equal(motion.init, seq.frames[0])
        assert motion.is_onset
        np.testing.assert_allclose(motion.decode().frames, seq.frames, atol=1e-9)

    def test_offset_is_not_onset(self, make_trajectory, labels):
        motion = motion_from_sequence(make_trajectory(), labels["eyebrow"], labels.neutral)
        assert not motion.is_onset


class TestSplitAtPeak:
    def test_auto_peak(self, neutral_frame, rng):
        peak = neutral_frame + rng.normal(size=neutral_frame.shape)
        up = linear_onset(neutral_frame, peak, 8).frames
        seq = LandmarkSequence(np.concatenate([up, up[-2::-1]]))
        onset, offset = split_at_peak(seq)
        assert onset.n_frames == 8 and offset.n_frames == 8
        np.testing.assert_array_equal(onset.frames[-1], offset.frames[0])
        assert onset.dt == seq.dt

    def test_explicit_peak(self, make_trajectory):
        onset, offset = split_at_peak(make_trajectory(n_frames=10), peak_index=4)
        assert (onset.n_frames, offset.n_frames) == (5, 6)

    def test_monotone_sequence_has_no_interior_peak(self, neutral_frame, rng):
        seq = linear_onset(neutral_frame, neutral_frame + 1.0, 6)
        with pytest.raises(NoInteriorPeakError, match="no interior peak"):
            split_at_peak(seq)

    def test_too_short(self, make_trajectory):
        with pytest.raises(SequenceTooShortError):
            split_at_peak(LandmarkSequence(make_trajectory().frames[:2]))

    @pytest.mark.parametrize("index", [0, 9])
    def test_explicit_index_at_boundary(self, make_trajectory, index):
        with pytest.raises(ValidationError):
            split_at_peak(make_trajectory(n_frames=10), peak_index=index)


class TestResample:
    def test_linear_motion_stays_linear(self, neutral_frame):
        seq = linear_onset(neutral_frame, neutral_frame + 2.0, 7)
        out = resample_sequence(seq, 13)
        assert out.n_frames == 13
        np.testing.assert_allclose(out.frames, linear_onset(neutral_frame, neutral_frame + 2.0, 13).frames,
                                   atol=1e-12)
        assert out.dt * 12 == pytest.approx(seq.dt * 6)


class TestPeakTransition:
    def test_endpoints_match_peaks(self, make_onset):
        m1, p1 = make_onset("bareteeth")
        m2, p2 = make_onset("eyebrow")
        transition = synth_peak_transition(m1, m2, n_steps=30)
        assert transition.sequence.n_frames == 30
        assert (transition.start.name, transition.end.name) == ("bareteeth", "eyebrow")
        np.testing.assert_allclose(transition.sequence.frames[0], p1, atol=1e-6)
        np.testing.assert_allclose(transition.sequence.frames[-1], p2, atol=1e-6)

    def test_same_motion_gives_constant_sequence(self, make_onset):
        m1, p1 = make_onset("bareteeth")
        frames = synth_peak_transition(m1, m1, n_steps=10).sequence.frames
        np.testing.assert_allclose(frames, np.repeat(p1[None], 10, axis=0), atol=1e-9)

    def test_rejects_non_onset(self, make_onset, make_trajectory, labels):
        m1, _ = make_onset("bareteeth")
        offset = motion_from_sequence(make_trajectory(n_frames=10, n_landmarks=6), labels["eyebrow"], labels.neutral)
        with pytest.raises(IncompatibleMotionError):
            synth_peak_transition(m1, offset)

    def test_rejects_different_neutral(self, make_onset, labels, rng):
        m1, _ = make_onset("bareteeth")
        other = rng.normal(size=(6, 3))
        m2 = motion_from_sequence(linear_onset(other, other + 0.5, 10), labels.neutral, labels["eyebrow"])
        with pytest.raises(IncoherentInitError, match="incoherent initial configuration"):
            synth_peak_transition(m1, m2)

    def test_rejects_single_step(self, make_onset):
        m1, _ = make_onset("bareteeth")
        m2, _ = make_onset("eyebrow")
        with pytest.raises(ValidationError):
            synth_peak_transition(m1, m2, n_steps=1)

    def test_onset_prototypes_average_peaks(self, make_onset):
        (m1, p1), (m2, p2), (m3, p3) = make_onset("bareteeth"), make_onset("bareteeth"), make_onset("eyebrow")
        prototypes = {p.label.name: p.frame for p in onset_prototypes([m1, m2, m3])}
        assert sorted(prototypes) == ["bareteeth", "eyebrow"]
        np.testing.assert_allclose(prototypes["bareteeth"], (p1 + p2) / 2, atol=1e-8)
        np.testing.assert_allclose(prototypes["eyebrow"], p3, atol=1e-8)

    def test_bank_covers_ordered_pairs(self, make_onset):
        onsets = [make_onset(name)[0] for name in ("bareteeth", "eyebrow", "mouth_open")]
        bank = synthesize_transition_bank(onsets, n_steps=5)
        assert len(bank) == 6
        assert len({t.pair for t in bank}) == 6


class TestPrototypes:
    def test_prototype_is_mean(self, labels, rng):
        frames = [rng.normal(size=(4, 3)) for _ in range(3)]
        proto = expression_prototype([(i, f) for i, f in enumerate(frames)], labels["eyebrow"])
        np.testing.assert_allclose(proto.frame, np.mean(frames, axis=0))

    def test_prototype_needs_peaks(self, labels):
        with pytest.raises(ValidationError):
            expression_prototype([], labels["eyebrow"])

    def test_score_adds_both_endpoints(self, labels):
        a, b = labels["bareteeth"], labels["eyebrow"]
        frame = np.zeros((2, 3))
        prototypes = {a.id: ExpressionPrototype(a, frame + [1.0, 0, 0]), b.id: ExpressionPrototype(b, frame)}
        assert score_transition(constant_transition(frame, a, b), prototypes) == pytest.approx(1.0)

    def test_missing_prototype(self, labels):
        a, b = labels["bareteeth"], labels["eyebrow"]
        frame = np.zeros((2, 3))
        with pytest.raises(MissingPrototypeError):
            score_transition(constant_transition(frame, a, b), {a.id: ExpressionPrototype(a, frame)})

    def test_select_keeps_best_per_pair_in_input_order(self, labels):
        a, b, c = labels["bareteeth"], labels["eyebrow"], labels["mouth_up"]
        zero = np.zeros((2, 3))
        prototypes = [ExpressionPrototype(lab, zero) for lab in (a, b, c)]
        candidates = [constant_transition(zero + off, a, b) for off in (3.0, 1.0, 2.0)]
        candidates.append(constant_transition(zero + 5.0, a, c))
        kept = select_by_prototype(candidates, prototypes, top_k=2)
        assert kept == [candidates[1], candidates[2], candidates[3]]

    @pytest.mark.parametrize("top_k", [1, 3, 10])
    def test_dominated_candidate_leaves_selection_unchanged(self, labels, rng, top_k):
        a, b = labels["bareteeth"], labels["eyebrow"]
        zero = np.zeros((3, 3))
        prototypes = [ExpressionPrototype(a, zero), ExpressionPrototype(b, zero)]
        candidates = [
            LabeledSequence(LandmarkSequence([rng.normal(size=(3, 3)), rng.normal(size=(3, 3))]), a, b)
            for _ in range(10)
        ]
        kept = select_by_prototype(candidates, prototypes, top_k=top_k)
        far = max(np.abs(c.sequence.frames).max() for c in candidates) + 10.0
        dominated = constant_transition(zero + far, a, b, n_frames=2)
        for position in (0, 5, len(candidates)):
            extended = candidates[:position] + [dominated] + candidates[position:]
            assert select_by_prototype(extended, prototypes, top_k=top_k) == kept

    def test_select_rejects_zero_k(self, labels):
        with pytest.raises(ValidationError):
            select_by_prototype([], [], top_k=0)


class TestCompose:
    def _chain(self, make_trajectory, labels):
        names = [("neutral", "bareteeth"), ("bareteeth", "eyebrow"), ("eyebrow", "neutral")]
        return [motion_from_sequence(make_trajectory(n_frames=30, n_landmarks=6), labels[s], labels[e])
                for s, e in names]

    def test_three_transitions_give_88_frames(self, make_trajectory, labels, neutral_frame):
        motions = self._chain(make_trajectory, labels)
        out = compose_transitions(motions, neutral_frame)
        assert out.n_frames == 88
        first = motions[0].decode(neutral_frame).frames
        np.testing.assert_array_equal(out.frames[:30], first)
        second = motions[1].decode(out.frames[29]).frames
        np.testing.assert_array_equal(out.frames[29:59], second)

    def test_label_gap_rejected(self, make_trajectory, labels, neutral_frame):
        motions = self._chain(make_trajectory, labels)
        with pytest.raises(DiscontinuousChainError, match="discontinuous transition chain"):
            compose_transitions([motions[0], motions[2]], neutral_frame)

    def test_empty_rejected(self, neutral_frame):
        with pytest.raises(ValidationError):
            compose_transitions([], neutral_frame)

    def test_recipe_picks_first_matching_motion_per_pair(self, make_trajectory, labels):
        motions = self._chain(make_trajectory, labels)
        spare = motion_from_sequence(make_trajectory(n_frames=30, n_landmarks=6), labels["bareteeth"], labels["eyebrow"])
        bank = [motions[2], motions[1], spare, motions[0]]
        recipe = [labels[n] for n in ("neutral", "bareteeth", "eyebrow", "neutral")]
        assert resolve_recipe(recipe, bank) == motions

    def test_recipe_without_matching_motion(self, make_trajectory, labels):
        motions = self._chain(make_trajectory, labels)
        with pytest.raises(MissingMotionError, match="no motion from 'bareteeth' to 'neutral'"):
            resolve_recipe([labels.neutral, labels["bareteeth"], labels.neutral], motions)

    def test_recipe_needs_two_labels(self, labels):
        with pytest.raises(ValidationError):
            resolve_recipe([labels.neutral], [])


class TestTransfer:
    def test_translated_target_reproduces_shifted_motion(self, make_trajectory):
        source = make_trajectory(n_landmarks=6)
        offset = np.array([5.0, -1.0, 2.0])
        out = transfer_motion(source, source.frames[0] + offset)
        np.testing.assert_allclose(out.frames, source.frames + offset, atol=1e-9)

    def test_landmark_count_mismatch(self, make_trajectory):
        with pytest.raises(ShapeMismatchError):
            transfer_motion(make_trajectory(n_landmarks=6), np.zeros((5, 3)))
