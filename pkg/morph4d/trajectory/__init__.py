"""
Trajectory core: SRVF codec and sphere geometry of landmark motions.
"""

from morph4d.trajectory.types import LandmarkFrame, LandmarkSequence, Srvf, TangentVector, as_frame
from morph4d.trajectory.srvf import center_normalize, srvf_decode, srvf_encode
from morph4d.trajectory.sphere import (
    NUMERIC_EPSILON,
    SphereConfig,
    exp_map,
    geodesic_distance,
    geodesic_interpolate,
    inner_product,
    karcher_mean,
    log_map,
    srvf_norm,
)

__all__ = [
    'LandmarkFrame',
    'LandmarkSequence',
    'Srvf',
    'TangentVector',
    'as_frame',
    'center_normalize',
    'srvf_encode',
    'srvf_decode',
    'NUMERIC_EPSILON',
    'SphereConfig',
    'inner_product',
    'srvf_norm',
    'geodesic_distance',
    'exp_map',
    'log_map',
    'geodesic_interpolate',
    'karcher_mean',
]
