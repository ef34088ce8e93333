"""Special functions and log-normal moment-matching helpers.

Everything here is scalar, pure and allocation-free; the closed-form
outage expressions call these once per operating point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

__all__ = [
    "LogNormalParams",
    "reg_lower_gamma",
    "std_normal_cdf",
    "lognormal_from_moments",
    "lognormal_product",
    "lognormal_cdf",
]

_EPS = 1e-16
_MAX_ITER = 10_000
_TINY = 1e-300


def _check_finite(*values: float) -> None:
    for v in values:
        if not math.isfinite(v):
            raise ValueError(f"non-finite input: {v!r}")


def _gamma_series(a: float, x: float) -> float:
    # P(a, x) = x^a e^-x / Gamma(a+1) * sum_n x^n / ((a+1)...(a+n))
    term = 1.0 / a
    total = term
    ap = a
    for _ in range(_MAX_ITER):
        ap += 1.0
        term *= x / ap
        total += term
        if abs(term) < abs(total) * _EPS:
            break
    else:
        raise ArithmeticError(f"series for P({a}, {x}) did not converge")
    return total * math.exp(a * math.log(x) - x - math.lgamma(a))


def _gamma_cont_frac(a: float, x: float) -> float:
    """Upper regularized gamma Q(a, x) by modified Lentz on the Legendre fraction."""
    b = x + 1.0 - a
    c = 1.0 / _TINY
    d = 1.0 / b
    h = d
    for i in range(1, _MAX_ITER):
        an = -i * (i - a)
        b += 2.0
        d = an * d + b
        if abs(d) < _TINY:
            d = _TINY
        c = b + an / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            break
    else:
        raise ArithmeticError(f"continued fraction for Q({a}, {x}) did not converge")
    return h * math.exp(a * math.log(x) - x - math.lgamma(a))


def reg_lower_gamma(shape: float, x: float) -> float:
    """Regularized lower incomplete gamma function P(shape, x).

    This is the CDF of a unit-scale Gamma(shape) variable at ``x``. The
    power series is used below ``shape + 1`` and the continued fraction for
    the complement above it.

    Raises
    ------
    ValueError
        If ``shape <= 0``, ``x < 0`` or either argument is not finite.
    """
    shape = float(shape)
    x = float(x)
    _check_finite(shape, x)
    if shape <= 0.0:
        raise ValueError(f"shape must be > 0, got {shape}")
    if x < 0.0:
        raise ValueError(f"x must be >= 0, got {x}")
    if x == 0.0:
        return 0.0
    if x < shape + 1.0:
        return min(1.0, _gamma_series(shape, x))
    return max(0.0, 1.0 - _gamma_cont_frac(shape, x))


def std_normal_cdf(x: float) -> float:
    """Standard normal CDF via ``erfc`` so both tails keep full relative accuracy."""
    x = float(x)
    if math.isnan(x):
        raise ValueError("non-finite input: nan")
    # +-inf are legitimate limits here (log of a zero or infinite threshold)
    if x == math.inf:
        return 1.0
    if x == -math.inf:
        return 0.0
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


@dataclass(frozen=True)
class LogNormalParams:
    """Natural-log location ``mu`` and variance ``sigma2`` of a log-normal law."""

    mu: float
    sigma2: float

    def __post_init__(self):
        _check_finite(self.mu, self.sigma2)
        if self.sigma2 <= 0.0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")

    @property
    def sigma(self) -> float:
        return math.sqrt(self.sigma2)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma2)

    def variance(self) -> float:
        return math.expm1(self.sigma2) * math.exp(2.0 * self.mu + self.sigma2)


def lognormal_from_moments(mean: float, variance: float) -> LogNormalParams:
    """Log-normal sharing the first two moments of a positive variable."""
    _check_finite(mean, variance)
    if mean <= 0.0 or variance <= 0.0:
        raise ValueError(f"mean and variance must be > 0, got {mean}, {variance}")
    sigma2 = math.log1p(variance / mean**2)
    return LogNormalParams(mu=math.log(mean) - 0.5 * sigma2, sigma2=sigma2)


def lognormal_product(factors: Iterable[LogNormalParams]) -> LogNormalParams:
    """Law of a product of independent log-normal factors."""
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    return LogNormalParams(
        mu=math.fsum(f.mu for f in factors),
        sigma2=math.fsum(f.sigma2 for f in factors),
    )


def lognormal_cdf(params: LogNormalParams, t: float) -> float:
    """P(W < t) for W ~ LogNormal(params); t = 0 gives 0."""
    if t < 0.0 or math.isnan(t):
        raise ValueError(f"threshold must be >= 0, got {t}")
    if t == 0.0:
        return 0.0
    return std_normal_cdf((math.log(t) - params.mu) / params.sigma)
