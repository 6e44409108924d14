"""Classical signature of piecewise-linear paths.

Linear segments have exact tensor-exponential signatures; a full path is the
Chen product of its segments. A nested left-Riemann oracle over the order
simplex backs the test suite.
"""

from __future__ import annotations

import math

import numpy as np

from .path import PiecewiseLinearPath, evaluate
from .words import TruncatedSignature, Word, chen_product

#: cost guard for the brute-force oracle (word length times grid size)
_ORACLE_BUDGET = 50_000_000


class BudgetError(RuntimeError):
    """A brute-force evaluation would exceed its cost budget."""


def increment_powers(delta: np.ndarray, level: int) -> list[np.ndarray]:
    """Flattened tensor powers [1, delta, delta@2, ...] up to the given level.

    Power k is laid out in lexicographic word order, so entry (i1..ik) is
    prod_j delta[i_j - 1]. Leading batch axes broadcast through.
    """
    powers = [np.ones(delta.shape[:-1] + (1,))]
    for _ in range(level):
        prev, cur = powers[-1], None
        cur = (prev[..., :, None] * delta[..., None, :]).reshape(
            delta.shape[:-1] + (prev.shape[-1] * delta.shape[-1],)
        )
        powers.append(cur)
    return powers


def segment_signature(delta: np.ndarray, level: int) -> TruncatedSignature:
    """Signature of a single linear segment with increment vector delta.

    Level k holds prod_j delta[i_j] / k! exactly (tensor exponential of a
    linear segment, no truncation error).
    """
    delta = np.asarray(delta, dtype=float)
    if delta.ndim != 1:
        raise ValueError("delta must be a vector")
    if level < 1:
        raise ValueError("level must be >= 1")
    powers = increment_powers(delta, level)
    levels = [powers[k] / math.factorial(k) for k in range(level + 1)]
    return TruncatedSignature(delta.shape[0], level, levels)


def signature(path: PiecewiseLinearPath, level: int) -> TruncatedSignature:
    """Truncated signature of the whole path: Chen product over its segments."""
    sig = segment_signature(path.knots[1] - path.knots[0], level)
    for i in range(1, path.n_segments):
        sig = chen_product(sig, segment_signature(path.knots[i + 1] - path.knots[i], level))
    return sig


def brute_force_iterated_integral(path: PiecewiseLinearPath, word: Word, grid_n: int) -> float:
    """Left-Riemann evaluation of the iterated integral over the order simplex.

    Discretizes [0, n-1] into grid_n uniform cells and sums over strictly
    increasing cell tuples; converges to the exact coefficient at first order
    in 1/grid_n. Kept independent of the tensor-product route on purpose.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    k = len(word)
    if k < 1:
        raise ValueError("word must be nonempty")
    if k * grid_n > _ORACLE_BUDGET:
        raise BudgetError(f"oracle cost {k}*{grid_n} exceeds budget {_ORACLE_BUDGET}")
    d = path.dimension
    if any(not 1 <= ch <= d for ch in word):
        raise ValueError(f"word {word} invalid for dimension {d}")
    ts = np.linspace(0.0, path.n_knots - 1.0, grid_n + 1)
    values = np.array([evaluate(path, t) for t in ts])
    dx = np.diff(values, axis=0)
    # running[m] = integral over j1 < ... < jl < m of the first l letters
    running = np.ones(grid_n + 1)
    for ch in word:
        partial = np.cumsum(running[:-1] * dx[:, ch - 1])
        running = np.concatenate([[0.0], partial])
    return float(running[-1])
