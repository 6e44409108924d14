"""Multi-index bookkeeping and the truncated coefficient container.

Words are tuples of channel indices in {1, ..., d}. Coefficients live in
dense per-level arrays in lexicographic word order, which is also the
canonical CSV column order (``s_<i1>_..._<ik>``).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

Word = tuple[int, ...]


def enumerate_words(d: int, level: int) -> list[Word]:
    """All nonempty words up to the given level, grouped by length then lexicographic."""
    if d < 1 or level < 1:
        raise ValueError(f"enumerate_words requires d >= 1 and level >= 1, got ({d}, {level})")
    out: list[Word] = []
    for k in range(1, level + 1):
        out.extend(itertools.product(range(1, d + 1), repeat=k))
    return out


def word_index(word: Word, d: int) -> tuple[int, int]:
    """Map a word to its (level, offset) position in the dense per-level layout.

    The offset is the base-d expansion sum_j (i_j - 1) * d^(k-j), so the first
    channel is the most significant digit.
    """
    offset = 0
    for ch in word:
        if not 1 <= ch <= d:
            raise ValueError(f"channel {ch} out of range for dimension {d}")
        offset = offset * d + (ch - 1)
    return len(word), offset


def word_column_names(d: int, level: int) -> list[str]:
    """Canonical CSV column names in enumeration order."""
    return ["s_" + "_".join(map(str, w)) for w in enumerate_words(d, level)]


@dataclass
class TruncatedSignature:
    """Dense per-level coefficients of a signature truncated at a fixed level.

    ``levels[k]`` holds the d^k coefficients of the length-k words in
    lexicographic order; ``levels[0]`` is the scalar 1.
    """

    dimension: int
    level: int
    levels: list[np.ndarray] = field(default_factory=list)

    def __post_init__(self):
        if self.dimension < 1 or self.level < 1:
            raise ValueError("dimension and level must be >= 1")
        if not self.levels:
            self.levels = [np.ones(1)] + [
                np.zeros(self.dimension**k) for k in range(1, self.level + 1)
            ]
        if len(self.levels) != self.level + 1:
            raise ValueError("levels list does not match the truncation level")
        for k, arr in enumerate(self.levels):
            if arr.shape != (self.dimension**k,):
                raise ValueError(f"level {k} has shape {arr.shape}, expected ({self.dimension**k},)")
        if self.levels[0][0] != 1.0:
            raise ValueError("level-0 entry must be the scalar 1")

    @classmethod
    def identity(cls, d: int, level: int) -> "TruncatedSignature":
        return cls(d, level)

    def get(self, word: Word) -> float:
        if len(word) > self.level:
            raise ValueError(f"word {word} exceeds truncation level {self.level}")
        k, offset = word_index(word, self.dimension)
        return float(self.levels[k][offset])

    def flatten(self) -> np.ndarray:
        """Levels 1..L concatenated in canonical order (level-0 scalar excluded)."""
        return np.concatenate(self.levels[1:]) if self.level >= 1 else np.zeros(0)


def chen_product(left: TruncatedSignature, right: TruncatedSignature) -> TruncatedSignature:
    """Truncated concatenation (tensor) product of two signatures.

    (S1*S2)^(i1..ik) = sum_{r=0..k} S1^(i1..ir) * S2^(i_{r+1}..ik), truncated
    at the common level.
    """
    if left.dimension != right.dimension or left.level != right.level:
        raise ValueError(
            f"shape mismatch: ({left.dimension}, {left.level}) vs ({right.dimension}, {right.level})"
        )
    d, L = left.dimension, left.level
    out = [np.ones(1)]
    for k in range(1, L + 1):
        acc = left.levels[k].copy()
        acc += right.levels[k]
        for r in range(1, k):
            acc += np.multiply.outer(left.levels[r], right.levels[k - r]).reshape(d**k)
        out.append(acc)
    return TruncatedSignature(d, L, out)
