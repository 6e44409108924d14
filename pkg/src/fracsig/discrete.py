"""Discrete fractional signature of piecewise-linear paths.

Single segments get a closed form built on the unregularized incomplete beta,
decorated by a horizon parameter; longer intervals split at the midpoint
ceiling and recombine with a Chen-style merge in which the full-left term
keeps the caller's horizon while the mixed left factors use the split-point
horizon. Horizons are always dyadic rationals, so memo keys compare them as
exact fractions, never as floats.

A plan/executor pair replays the recursion as a flat operation list so large
batches of equal-length paths (the image pipeline) run through numpy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .classical import BudgetError, increment_powers
from .path import PiecewiseLinearPath
from .specfun import incomplete_beta, ln_gamma
from .words import TruncatedSignature, Word


def _as_fraction(value) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, float):
        return Fraction(value)  # floats are dyadic, conversion is exact
    raise TypeError(f"horizon must be a real number, got {type(value).__name__}")


@dataclass(frozen=True)
class HorizonContext:
    """Integer subinterval [a, b] with the horizon parameter decorating it."""

    a: int
    b: int
    horizon: Fraction

    def __post_init__(self):
        if not (isinstance(self.a, int) and isinstance(self.b, int)):
            raise ValueError("interval endpoints must be integers")
        if not 0 <= self.a < self.b:
            raise ValueError(f"need 0 <= a < b, got [{self.a}, {self.b}]")
        if self.horizon < self.b:
            raise ValueError(f"horizon {self.horizon} must be >= b = {self.b}")


def _alpha_value(alpha) -> float:
    a = float(alpha)
    if not a > 0:
        raise ValueError(f"alpha must be positive, got {a}")
    return a


def horizon_level_factors(a: int, horizon: Fraction, alpha: float, level: int) -> np.ndarray:
    """Scalar factors g[k] such that the base case on [a, a+1] is
    prod_j delta[i_j] * g[k] for every length-k word.

    g[k] = (D^(alpha*k) / (Gamma(alpha) Gamma(1+(k-1)alpha))) * beta_{1/D}((k-1)alpha+1, alpha)
    with D = horizon - a (>= 1 since horizon >= a+1).
    """
    span = float(horizon - a)
    z = float(1 / (horizon - a)) if isinstance(horizon, Fraction) else 1.0 / span
    out = np.empty(level + 1)
    out[0] = 1.0
    for k in range(1, level + 1):
        scale = math.exp(alpha * k * math.log(span) - ln_gamma(alpha) - ln_gamma(1.0 + (k - 1) * alpha))
        out[k] = scale * incomplete_beta(z, (k - 1) * alpha + 1.0, alpha)
    return out


def base_case(path: PiecewiseLinearPath, a: int, horizon, word: Word, alpha) -> float:
    """Closed-form discrete-signature coefficient of the segment [a, a+1].

    At horizon == a+1 the incomplete beta is complete and the value collapses
    to the fractional closed form of that segment.
    """
    av = _alpha_value(alpha)
    hor = _as_fraction(horizon)
    if not 0 <= a <= path.n_segments - 1:
        raise ValueError(f"segment start {a} out of range [0, {path.n_segments - 1}]")
    if hor < a + 1:
        raise ValueError(f"horizon {hor} must be >= b = {a + 1}")
    k = len(word)
    if k < 1:
        raise ValueError("word must be nonempty")
    delta = path.knots[a + 1] - path.knots[a]
    if any(not 1 <= ch <= path.dimension for ch in word):
        raise ValueError(f"word {word} invalid for dimension {path.dimension}")
    prod = 1.0
    for ch in word:
        prod *= delta[ch - 1]
    return prod * horizon_level_factors(a, hor, av, k)[k]


def merge_levels(left_full: list, left_mid: list, right_full: list) -> list:
    """Chen-style combination of adjacent-interval coefficient arrays.

    Per word I of length k the output is left_full^I + right_full^I plus the
    mixed sum over proper splits, whose left factors come from left_mid (the
    split-point horizon). Arrays may carry leading batch axes; index 0 of each
    list is the implicit level-0 scalar 1 and is passed through as-is.
    """
    out = [left_full[0]]
    for k in range(1, len(left_full)):
        acc = left_full[k] + right_full[k]
        for r in range(1, k):
            lu, rd = left_mid[r], right_full[k - r]
            mixed = (lu[..., :, None] * rd[..., None, :]).reshape(acc.shape)
            acc = acc + mixed
        out.append(acc)
    return out


def _split_point(a: int, b: int) -> tuple[int, Fraction]:
    h = -((-a - b) // 2)  # ceil((a+b)/2)
    return h, Fraction(b + h, 2)


def _interval_levels(powers: list[np.ndarray], a: int, b: int, horizon: Fraction,
                     alpha: float, level: int, memo: dict | None) -> list:
    key = (a, b, horizon)
    if memo is not None and key in memo:
        return memo[key]
    if b == a + 1:
        g = horizon_level_factors(a, horizon, alpha, level)
        levels = [np.ones(powers[0].shape[:-2] + (1,))]
        levels += [powers[k][..., a, :] * g[k] for k in range(1, level + 1)]
    else:
        h, u = _split_point(a, b)
        left_full = _interval_levels(powers, a, h, horizon, alpha, level, memo)
        left_mid = _interval_levels(powers, a, h, u, alpha, level, memo)
        right_full = _interval_levels(powers, h, b, horizon, alpha, level, memo)
        levels = merge_levels(left_full, left_mid, right_full)
    if memo is not None:
        memo[key] = levels
    return levels


def _segment_powers(slopes: np.ndarray, level: int) -> list[np.ndarray]:
    """Tensor powers of every segment increment; index k gives (..., n_seg, d^k)."""
    return increment_powers(slopes, level)


def discrete_signature_interval(path: PiecewiseLinearPath, a: int, b: int, horizon,
                                alpha, level: int, memoize: bool = True) -> TruncatedSignature:
    """Discrete fractional signature of the integer subinterval [a, b]."""
    av = _alpha_value(alpha)
    if level < 1:
        raise ValueError("level must be >= 1")
    if not (isinstance(a, (int, np.integer)) and isinstance(b, (int, np.integer))):
        raise ValueError("interval endpoints must be integers")
    a, b = int(a), int(b)
    if not 0 <= a < b <= path.n_segments:
        raise ValueError(f"invalid interval [{a}, {b}] for a path with {path.n_segments} segments")
    ctx = HorizonContext(a, b, _as_fraction(horizon))
    powers = _segment_powers(path.slopes(), level)
    memo: dict | None = {} if memoize else None
    levels = _interval_levels(powers, ctx.a, ctx.b, ctx.horizon, av, level, memo)
    return TruncatedSignature(path.dimension, level, [lv.reshape(-1).copy() for lv in levels])


def discrete_signature(path: PiecewiseLinearPath, alpha, level: int) -> TruncatedSignature:
    """Discrete fractional signature of the whole path (horizon = n-1)."""
    n = path.n_segments
    return discrete_signature_interval(path, 0, n, n, alpha, level)


@dataclass
class DiscretePlan:
    """Flattened replay of the divide-and-conquer recursion for one (n, alpha, level).

    Plans depend only on the knot count, never on knot values, so one plan
    serves every equal-length path; executing it is a straight sweep of numpy
    ops over arbitrary leading batch axes.
    """

    n_segments: int
    alpha: float
    level: int
    ops: list[tuple]
    free_after: list[list[int]]
    root_slot: int
    n_slots: int
    peak_live: int


def build_plan(n_segments: int, alpha, level: int) -> DiscretePlan:
    """Enumerate the recursion's subproblems once, with memoized slots."""
    av = _alpha_value(alpha)
    if level < 1:
        raise ValueError("level must be >= 1")
    if n_segments < 1:
        raise ValueError("need at least one segment")
    ops: list[tuple] = []
    slot_of: dict[tuple, int] = {}
    uses: dict[int, int] = {}
    factor_cache: dict[tuple, np.ndarray] = {}

    def factors(a: int, horizon: Fraction) -> np.ndarray:
        key = (a, horizon)
        hit = factor_cache.get(key)
        if hit is None:
            hit = factor_cache[key] = horizon_level_factors(a, horizon, av, level)
        return hit

    def visit(a: int, b: int, horizon: Fraction) -> int:
        key = (a, b, horizon)
        slot = slot_of.get(key)
        if slot is not None:
            return slot
        if b == a + 1:
            slot = len(slot_of)
            slot_of[key] = slot
            ops.append(("base", slot, a, factors(a, horizon)))
        else:
            h, u = _split_point(a, b)
            ld = visit(a, h, horizon)
            lu = visit(a, h, u)
            rd = visit(h, b, horizon)
            slot = len(slot_of)
            slot_of[key] = slot
            ops.append(("merge", slot, ld, lu, rd))
            for s in (ld, lu, rd):
                uses[s] = len(ops) - 1
        return slot

    root = visit(0, n_segments, Fraction(n_segments))

    free_after: list[list[int]] = [[] for _ in ops]
    for slot, last_op in uses.items():
        if slot != root:
            free_after[last_op].append(slot)
    live = 0
    peak = 0
    freed = {s for lst in free_after for s in lst}
    for idx, op in enumerate(ops):
        live += 1
        peak = max(peak, live)
        live -= len(free_after[idx])
    # slots that are never freed (root plus any memo leftovers) stay live
    peak = max(peak, len(ops) - len(freed))
    return DiscretePlan(n_segments, av, level, ops, free_after, root, len(ops), peak)


def execute_plan(plan: DiscretePlan, slopes: np.ndarray) -> list[np.ndarray]:
    """Run a plan against segment slopes shaped (..., n_segments, d).

    Returns per-level coefficient arrays (..., d^k); index 0 is the level-0
    scalar 1. Produces bit-identical values to the memoized recursion.
    """
    slopes = np.asarray(slopes, dtype=float)
    if slopes.shape[-2] != plan.n_segments:
        raise ValueError(
            f"slopes have {slopes.shape[-2]} segments, plan expects {plan.n_segments}"
        )
    powers = increment_powers(slopes, plan.level)
    ones0 = np.ones(slopes.shape[:-2] + (1,))
    slots: list = [None] * plan.n_slots
    for idx, op in enumerate(plan.ops):
        if op[0] == "base":
            _, slot, seg, g = op
            slots[slot] = [ones0] + [powers[k][..., seg, :] * g[k] for k in range(1, plan.level + 1)]
        else:
            _, slot, ld, lu, rd = op
            slots[slot] = merge_levels(slots[ld], slots[lu], slots[rd])
        for f in plan.free_after[idx]:
            slots[f] = None
    return slots[plan.root_slot]


_PLAN_CACHE: dict[tuple, DiscretePlan] = {}
_PLAN_CACHE_LIMIT = 4


def get_plan(n_segments: int, alpha, level: int) -> DiscretePlan:
    key = (n_segments, float(alpha), level)
    hit = _PLAN_CACHE.get(key)
    if hit is None:
        if len(_PLAN_CACHE) >= _PLAN_CACHE_LIMIT:
            _PLAN_CACHE.pop(next(iter(_PLAN_CACHE)))
        hit = _PLAN_CACHE[key] = build_plan(n_segments, alpha, level)
    return hit


def base_case_simplex_oracle(path: PiecewiseLinearPath, a: int, horizon, word: Word,
                             alpha, grid_n: int) -> float:
    """Direct numerical evaluation of the weighted simplex integral

        prod_j delta[i_j] / Gamma(alpha)^k *
        int_{a<t_1<...<t_k<a+1} (horizon-t_k)^(alpha-1) prod (t_{j+1}-t_j)^(alpha-1) dt

    which the closed-form base case is derived to equal (checked by hand for
    k = 1 and k = 2). Nested sweeps approximate the accumulated inner
    integral as piecewise constant per cell while each kernel cell moment is
    integrated exactly, giving a first-order (O(1/grid_n)) independent check.
    """
    av = _alpha_value(alpha)
    hor = float(_as_fraction(horizon))
    k = len(word)
    if k < 1:
        raise ValueError("word must be nonempty")
    if k > 3:
        raise BudgetError("simplex oracle is restricted to words of length <= 3")
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    if not 0 <= a <= path.n_segments - 1:
        raise ValueError(f"segment start {a} out of range")
    if hor < a + 1:
        raise ValueError(f"horizon {hor} must be >= b = {a + 1}")
    delta = path.knots[a + 1] - path.knots[a]
    prod = 1.0
    for ch in word:
        if not 1 <= ch <= path.dimension:
            raise ValueError(f"word {word} invalid for dimension {path.dimension}")
        prod *= delta[ch - 1]

    h = 1.0 / grid_n
    # inner chain kernels on the uniform grid: cell_moment[q] is the exact
    # kernel integral over one cell whose left edge sits q cells from the target
    q = np.arange(grid_n + 1, dtype=float)
    powers = (q * h) ** av
    cell_moment = np.zeros(grid_n + 1)
    cell_moment[1:] = (powers[1:] - powers[:-1]) / av
    left_vals = np.ones(grid_n)  # accumulated inner integral at cell left nodes
    for _ in range(k - 1):
        left_vals = np.convolve(left_vals, cell_moment)[:grid_n]
    # outer weight uses the horizon: exact moment per cell
    ts = a + np.arange(grid_n + 1) * h
    outer_pow = (hor - ts) ** av
    outer_moment = (outer_pow[:-1] - outer_pow[1:]) / av
    total = float(np.dot(left_vals, outer_moment))
    return prod * math.exp(-k * ln_gamma(av)) * total
