"""Special functions used throughout the signature formulas.

Gamma-family helpers (``ln_gamma``, ``beta``), the unregularized incomplete
beta function, and a series Mittag-Leffler evaluator kept around as a test
oracle for the scalar Caputo equation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class ConvergenceError(RuntimeError):
    """A series or continued fraction failed to converge within its term cap."""


@dataclass(frozen=True)
class Tolerance:
    """Absolute/relative stopping tolerances for iterative evaluations."""

    abs_tol: float = 1e-12
    rel_tol: float = 1e-10

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be strictly positive")


def ln_gamma(x: float) -> float:
    """Natural log of the gamma function for x > 0.

    Thin wrapper over the C library lgamma, which is accurate to a few ulp
    across (0, 170].
    """
    if not x > 0:
        raise ValueError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def gamma(x: float) -> float:
    """Gamma function for x > 0."""
    if not x > 0:
        raise ValueError(f"gamma requires x > 0, got {x}")
    return math.gamma(x)


def beta(x: float, y: float) -> float:
    """Complete beta function B(x, y) = Gamma(x)Gamma(y)/Gamma(x+y), x, y > 0."""
    if not (x > 0 and y > 0):
        raise ValueError(f"beta requires positive arguments, got ({x}, {y})")
    return math.exp(math.lgamma(x) + math.lgamma(y) - math.lgamma(x + y))


def _betacf(a: float, b: float, x: float, max_iter: int = 300, eps: float = 3e-16) -> float:
    """Continued fraction for the regularized incomplete beta (modified Lentz)."""
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    tiny = 1e-300
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < tiny:
        d = tiny
    d = 1.0 / d
    h = d
    for m in range(1, max_iter + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < tiny:
            d = tiny
        c = 1.0 + aa / c
        if abs(c) < tiny:
            c = tiny
        d = 1.0 / d
        de = d * c
        h *= de
        if abs(de - 1.0) < eps:
            return h
    raise ConvergenceError(
        f"incomplete beta continued fraction failed to converge for a={a}, b={b}, x={x}"
    )


def _beta_series(z: float, x: float, y: float, max_terms: int = 500) -> float:
    """Power series for the unregularized incomplete beta, accurate for small z.

    beta_z(x, y) = z^x sum_m [prod_{l<m} (l+1-y)/(l+1)] z^m / (x+m).
    """
    term = 1.0
    total = 1.0 / x
    for m in range(1, max_terms + 1):
        term *= (m - y) * z / m
        delta = term / (x + m)
        total += delta
        if abs(delta) <= abs(total) * 1e-17:
            return z**x * total
    raise ConvergenceError(f"incomplete beta series failed to converge for z={z}, x={x}, y={y}")


def incomplete_beta(z: float, x: float, y: float) -> float:
    """Unregularized incomplete beta beta_z(x, y) = int_0^z t^(x-1)(1-t)^(y-1) dt.

    Defined for z in (0, 1]; at z = 1 it equals the complete beta(x, y).
    Evaluated through the standard continued fraction with the symmetry
    reduction at z >= (x+1)/(x+y+2), and a direct power series for small z.
    """
    if not (0.0 < z <= 1.0):
        raise ValueError(f"incomplete_beta requires z in (0, 1], got {z}")
    if not (x > 0 and y > 0):
        raise ValueError(f"incomplete_beta requires positive parameters, got ({x}, {y})")
    if z == 1.0:
        return beta(x, y)
    if z < 1e-3:
        return _beta_series(z, x, y)
    ln_front = x * math.log(z) + y * math.log1p(-z)
    if z < (x + 1.0) / (x + y + 2.0):
        return math.exp(ln_front) * _betacf(x, y, z) / x
    # beta_z(x, y) = B(x, y) - beta_{1-z}(y, x)
    complement = math.exp(ln_front) * _betacf(y, x, 1.0 - z) / y
    return beta(x, y) - complement


def mittag_leffler(alpha: float, z: float, tol: Tolerance = Tolerance(), max_terms: int = 5000) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z) = sum_k z^k / Gamma(1 + k*alpha).

    Plain series summation, intended for moderate |z| where double precision
    holds up; terms are formed in log space so large k does not overflow.
    Summation stops once a term past the series hump falls below abs_tol.
    """
    if not (0.0 < alpha <= 1.0):
        raise ValueError(f"mittag_leffler requires alpha in (0, 1], got {alpha}")
    if z == 0.0:
        return 1.0
    log_abs_z = math.log(abs(z))
    total = 1.0
    prev_mag = math.inf
    for k in range(1, max_terms + 1):
        log_mag = k * log_abs_z - math.lgamma(1.0 + k * alpha)
        mag = math.exp(log_mag)
        term = mag if z > 0 or k % 2 == 0 else -mag
        total += term
        if mag < tol.abs_tol and mag <= prev_mag:
            return total
        prev_mag = mag
    raise ConvergenceError(f"mittag_leffler series failed to converge for alpha={alpha}, z={z}")
