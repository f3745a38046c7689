"""
morph4d - SRVF-based 4D facial expression toolkit.

Landmark motions are encoded as square-root velocity functions on the unit
sphere, interpolated and composed into new expression transitions, and
carried onto dense meshes with a landmark-driven PCA deformation model.
"""

from morph4d.errors import DataIOError, Morph4DError, ValidationError
from morph4d.trajectory import (
    LandmarkSequence,
    Srvf,
    TangentVector,
    geodesic_distance,
    geodesic_interpolate,
    karcher_mean,
    srvf_decode,
    srvf_encode,
)

__version__ = "0.1.0"

__all__ = [
    '__version__',
    'DataIOError',
    'Morph4DError',
    'ValidationError',
    'LandmarkSequence',
    'Srvf',
    'TangentVector',
    'geodesic_distance',
    'geodesic_interpolate',
    'karcher_mean',
    'srvf_decode',
    'srvf_encode',
]
