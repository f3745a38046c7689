"""
Expression labels.

LOCATION: morph4d/synthesis/labels.py
PURPOSE: Label sets naming the expressions that start and end a motion,
    and the validation-pair sampling used for specificity reports
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Tuple, Union

import numpy as np

from morph4d.errors import LabelError

NEUTRAL = "neutral"

# Neutral plus the twelve CoMA expressions
DEFAULT_LABEL_NAMES = (
    "neutral",
    "bareteeth",
    "cheeks_in",
    "eyebrow",
    "high_smile",
    "lips_back",
    "lips_up",
    "mouth_down",
    "mouth_extreme",
    "mouth_middle",
    "mouth_open",
    "mouth_side",
    "mouth_up",
)


@dataclass(frozen=True)
class ExpressionLabel:
    id: int
    name: str

    @property
    def is_neutral(self) -> bool:
        return self.name == NEUTRAL

    def __str__(self) -> str:
        return self.name


class LabelSet:
    """
    Ordered set of expression labels; ids are positions in the set.

    Example:
        >>> labels = LabelSet.default()
        >>> labels["bareteeth"].id
        1
        >>> len(labels)
        13
    """

    def __init__(self, names: Iterable[str]):
        names = [str(n) for n in names]
        if not names:
            raise LabelError("label set is empty")
        if len(set(names)) != len(names):
            raise LabelError(f"duplicate label names in {names}")
        self._labels = tuple(ExpressionLabel(i, n) for i, n in enumerate(names))
        self._by_name: Dict[str, ExpressionLabel] = {lab.name: lab for lab in self._labels}

    @classmethod
    def default(cls) -> "LabelSet":
        return cls(DEFAULT_LABEL_NAMES)

    def __len__(self) -> int:
        return len(self._labels)

    def __iter__(self):
        return iter(self._labels)

    def __contains__(self, item) -> bool:
        if isinstance(item, ExpressionLabel):
            return 0 <= item.id < len(self._labels) and self._labels[item.id] == item
        return item in self._by_name

    def __getitem__(self, key: Union[int, str]) -> ExpressionLabel:
        if isinstance(key, str):
            try:
                return self._by_name[key]
            except KeyError:
                raise LabelError(f"unknown expression label '{key}'") from None
        if not 0 <= key < len(self._labels):
            raise LabelError(f"label id {key} out of range [0, {len(self._labels) - 1}]")
        return self._labels[key]

    @property
    def names(self) -> List[str]:
        return [lab.name for lab in self._labels]

    @property
    def neutral(self) -> Optional[ExpressionLabel]:
        return self._by_name.get(NEUTRAL)

    def __repr__(self) -> str:
        return f"LabelSet({self.names})"


def sample_validation_pairs(label_set: LabelSet, per_start: int = 3,
                            seed: Optional[int] = None) -> List[Tuple[ExpressionLabel, ExpressionLabel]]:
    """
    Draw ``per_start`` distinct end expressions for every start expression.

    With the default 13 labels and ``per_start=3`` this yields 39 transitions.
    """
    if per_start < 1 or per_start > len(label_set) - 1:
        raise LabelError(f"per_start must lie in [1, {len(label_set) - 1}], got {per_start}")
    rng = np.random.default_rng(seed)
    pairs = []
    for start in label_set:
        candidates = [lab for lab in label_set if lab.id != start.id]
        chosen = rng.choice(len(candidates), size=per_start, replace=False)
        pairs.extend((start, candidates[i]) for i in sorted(chosen))
    return pairs
