"""
Transition synthesis: expression labels, peak-peak transitions, prototype
filtering, composed sequences and motion transfer.
"""

from morph4d.synthesis.labels import (
    DEFAULT_LABEL_NAMES,
    ExpressionLabel,
    LabelSet,
    sample_validation_pairs,
)
from morph4d.synthesis.transitions import (
    DEFAULT_N_STEPS,
    ExpressionPrototype,
    LabeledMotion,
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

__all__ = [
    'DEFAULT_LABEL_NAMES',
    'ExpressionLabel',
    'LabelSet',
    'sample_validation_pairs',
    'DEFAULT_N_STEPS',
    'ExpressionPrototype',
    'LabeledMotion',
    'LabeledSequence',
    'compose_transitions',
    'expression_prototype',
    'motion_from_sequence',
    'onset_prototypes',
    'resample_sequence',
    'resolve_recipe',
    'score_transition',
    'select_by_prototype',
    'split_at_peak',
    'synth_peak_transition',
    'synthesize_transition_bank',
    'transfer_motion',
]
