"""Pydantic documents for the JSON artifacts read and written by the pipeline."""
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from morph4d.synthesis.labels import LabelSet
from morph4d.synthesis.transitions import LabeledMotion
from morph4d.trajectory.types import LandmarkSequence, Srvf

FORMAT_VERSION = 1

Frame = List[List[float]]


class _Document(BaseModel):
    model_config = ConfigDict(extra='forbid')


class SequenceDocument(_Document):
    """
    Landmark sequence: T frames of k×3 coordinates.

    ``k`` may be omitted on read; when present every frame must hold exactly
    ``k`` landmarks. It is always written.
    """
    k: Optional[int] = Field(default=None, ge=1)
    dt: Optional[float] = Field(default=None, gt=0.0)
    frames: List[Frame] = Field(..., min_length=1)

    @model_validator(mode='after')
    def frames_match_k(self) -> "SequenceDocument":
        counts = {len(frame) for frame in self.frames}
        if len(counts) > 1:
            raise ValueError(f'frames have different landmark counts: {sorted(counts)}')
        if any(len(point) != 3 for frame in self.frames for point in frame):
            raise ValueError('every landmark needs 3 coordinates')
        (n,) = counts
        if self.k is not None and self.k != n:
            raise ValueError(f'k={self.k} but frames hold {n} landmarks')
        return self

    @classmethod
    def from_sequence(cls, seq: LandmarkSequence) -> "SequenceDocument":
        return cls(k=seq.n_landmarks, dt=seq.dt, frames=seq.frames.tolist())

    def to_sequence(self) -> LandmarkSequence:
        return LandmarkSequence(self.frames, self.dt)


class SrvfDocument(_Document):
    """Unit-norm SRVF samples (M×3k) with their spacing and decoding scale."""
    samples: List[List[float]] = Field(..., min_length=1)
    dt: float = Field(..., gt=0.0)
    scale: float = Field(default=1.0, gt=0.0)

    @classmethod
    def from_srvf(cls, q: Srvf) -> "SrvfDocument":
        return cls(samples=q.samples.tolist(), dt=q.dt, scale=q.scale)

    def to_srvf(self) -> Srvf:
        return Srvf(self.samples, self.dt, scale=self.scale)


class SrvfPathDocument(_Document):
    """Sampled geodesic path: SRVFs at the listed interpolation parameters."""
    taus: List[float]
    points: List[SrvfDocument]

    @field_validator('taus')
    @classmethod
    def taus_in_unit_interval(cls, v: List[float]) -> List[float]:
        if any(not 0.0 <= t <= 1.0 for t in v):
            raise ValueError('taus must lie in [0, 1]')
        return v


class LabeledMotionDocument(_Document):
    """SRVF motion with start/end expression names and its initial frame."""
    start: str
    end: str
    motion: SrvfDocument
    init: Frame

    @classmethod
    def from_motion(cls, motion: LabeledMotion) -> "LabeledMotionDocument":
        return cls(
            start=motion.start.name,
            end=motion.end.name,
            motion=SrvfDocument.from_srvf(motion.motion),
            init=motion.init.tolist(),
        )

    def to_motion(self, label_set: LabelSet) -> LabeledMotion:
        return LabeledMotion(self.motion.to_srvf(), label_set[self.start], label_set[self.end], self.init)


class LabelSetDocument(_Document):
    labels: List[str] = Field(..., min_length=1)

    def to_label_set(self) -> LabelSet:
        return LabelSet(self.labels)


class RecipeDocument(_Document):
    """
    Composition recipe.

    Either ``labels``, expression names resolved pair by pair against a
    motion bank, or ``motions``, labeled-motion files chained in order and
    resolved relative to the recipe file. A bare JSON list is read as
    ``labels``. ``init`` defaults to the first motion's own initial frame.
    """
    labels: Optional[List[str]] = Field(default=None, min_length=2)
    motions: Optional[List[str]] = Field(default=None, min_length=1)
    init: Optional[Frame] = None

    @model_validator(mode='after')
    def labels_or_motions(self) -> "RecipeDocument":
        if (self.labels is None) == (self.motions is None):
            raise ValueError('a recipe holds exactly one of labels or motions')
        return self


class SpecificityEntryDocument(_Document):
    """One label pair of a specificity table; paths relative to the table file."""
    start: str
    end: str
    reference: str
    generated: List[str] = Field(..., min_length=1)


class SpecificityTableDocument(_Document):
    entries: List[SpecificityEntryDocument] = Field(..., min_length=1)


class PairSummary(_Document):
    start: str
    end: str
    mean_mm: float
    std_mm: float


class MetricReport(_Document):
    metric: str
    mean_mm: float
    std_mm: float
    curve: Optional[List[float]] = None
    pairs: Optional[List[PairSummary]] = None
    details: Dict[str, Any] = Field(default_factory=dict)


class ModelHeader(_Document):
    """Metadata stored next to the arrays of a deformation model container."""
    format_version: int = FORMAT_VERSION
    vertex_count: int = Field(..., ge=1)
    mode_count: int = Field(..., ge=1)
    n_landmarks: int = Field(..., ge=1)
    orthonormal: bool = True
    labels: List[str] = Field(default_factory=list)


__all__ = [
    'FORMAT_VERSION',
    'SequenceDocument',
    'SrvfDocument',
    'SrvfPathDocument',
    'LabeledMotionDocument',
    'LabelSetDocument',
    'RecipeDocument',
    'SpecificityEntryDocument',
    'SpecificityTableDocument',
    'PairSummary',
    'MetricReport',
    'ModelHeader',
]
