"""Piecewise-linear paths on integer-spaced knots.

A path is the linear interpolation of n knot points in R^d, with knot i
placed at time t = i, so the domain is [0, n-1]. Only the transforms needed
by the invariance tests live here (translation, integer time dilation).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PiecewiseLinearPath:
    """Knot matrix (n x d) defining X: [0, n-1] -> R^d with knot i at time i."""

    knots: np.ndarray

    def __post_init__(self):
        knots = np.asarray(self.knots, dtype=float)
        if knots.ndim != 2:
            raise ValueError(f"knots must be a 2-D matrix, got shape {knots.shape}")
        if knots.shape[0] < 2:
            raise ValueError("a path needs at least 2 knots")
        if not np.all(np.isfinite(knots)):
            raise ValueError("knot entries must be finite")
        object.__setattr__(self, "knots", knots)

    @property
    def n_knots(self) -> int:
        return self.knots.shape[0]

    @property
    def dimension(self) -> int:
        return self.knots.shape[1]

    @property
    def n_segments(self) -> int:
        return self.n_knots - 1

    def slopes(self) -> np.ndarray:
        """All segment slopes as an (n-1) x d matrix (unit time step)."""
        return np.diff(self.knots, axis=0)


def evaluate(path: PiecewiseLinearPath, t: float) -> np.ndarray:
    """Value of the path at time t in [0, n-1] by linear interpolation."""
    n = path.n_knots
    if not (0.0 <= t <= n - 1):
        raise ValueError(f"t={t} outside the path domain [0, {n - 1}]")
    i = min(int(np.floor(t)), n - 2)
    frac = t - i
    return path.knots[i] * (1.0 - frac) + path.knots[i + 1] * frac


def segment_slope(path: PiecewiseLinearPath, i: int) -> np.ndarray:
    """Slope A_{i+1} - A_i of segment i (time step is 1)."""
    if not 0 <= i <= path.n_segments - 1:
        raise ValueError(f"segment index {i} out of range [0, {path.n_segments - 1}]")
    return path.knots[i + 1] - path.knots[i]


def translate(path: PiecewiseLinearPath, c: np.ndarray) -> PiecewiseLinearPath:
    """Shift every knot by the vector c."""
    c = np.asarray(c, dtype=float)
    if c.shape != (path.dimension,):
        raise ValueError(f"translation vector shape {c.shape} does not match dimension {path.dimension}")
    return PiecewiseLinearPath(path.knots + c)


def time_dilate(path: PiecewiseLinearPath, factor: int) -> PiecewiseLinearPath:
    """Refine each segment into `factor` equal pieces; the image is unchanged.

    The result has factor*(n-1) + 1 knots and represents the reparametrized
    path Y_t = X_{t/factor} on [0, factor*(n-1)].
    """
    if not (isinstance(factor, (int, np.integer)) and factor >= 1):
        raise ValueError(f"dilation factor must be a positive integer, got {factor}")
    if factor == 1:
        return path
    n, d = path.knots.shape
    weights = np.arange(factor) / factor
    left = path.knots[:-1, None, :] * (1.0 - weights)[None, :, None]
    right = path.knots[1:, None, :] * weights[None, :, None]
    interior = (left + right).reshape((n - 1) * factor, d)
    return PiecewiseLinearPath(np.vstack([interior, path.knots[-1]]))
