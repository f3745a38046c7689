"""Condition codes and loss algebra for the conditional motion generator."""

from morph4d.gan.conditions import NOISE_SIZE, ConditionCode, encode_condition, sample_noise
from morph4d.gan.losses import (
    LossWeights,
    adversarial_loss,
    generator_adversarial_loss,
    gp_interpolate,
    motion_total_loss,
    reconstruction_loss_tangent,
)

__all__ = [
    'NOISE_SIZE',
    'ConditionCode',
    'encode_condition',
    'sample_noise',
    'LossWeights',
    'adversarial_loss',
    'generator_adversarial_loss',
    'gp_interpolate',
    'motion_total_loss',
    'reconstruction_loss_tangent',
]
