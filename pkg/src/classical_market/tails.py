"""Fat-tail and volatility-clustering diagnostics for return series."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .errors import InsufficientData

__all__ = ["log_returns", "hill_estimator", "excess_kurtosis", "acf_abs", "max_drawdown"]


def log_returns(prices) -> np.ndarray:
    """``ln(p_t / p_{t-1})`` for consecutive prices, all of which must be positive."""
    p = np.asarray(prices, dtype=float)
    if p.size and (not np.all(np.isfinite(p)) or np.any(p <= 0)):
        raise ValueError("log returns need finite positive prices")
    return np.diff(np.log(p))


def hill_estimator(returns, k: int) -> float:
    """Hill estimate of the tail exponent of ``|returns|``.

    Uses the ``k`` largest absolute returns against the ``(k+1)``-th::

        alpha = k / sum_{i<=k} ln(x_(i) / x_(k+1))

    Raises:
        InsufficientData: if ``k`` is not in ``[1, n)``, if any of the
            ``k + 1`` largest absolute returns is zero, or if they are all
            equal.
    """
    x = np.sort(np.abs(np.asarray(returns, dtype=float)))[::-1]
    if not 1 <= k < x.size:
        raise InsufficientData(f"hill estimator needs 1 <= k < n, got k={k}, n={x.size}")
    if x[k] <= 0:
        raise InsufficientData("hill estimator needs the k+1 largest |returns| to be positive")
    total = np.sum(np.log(x[:k] / x[k]))
    if total == 0:
        raise InsufficientData("the k+1 largest |returns| are all equal")
    return float(k / total)


def excess_kurtosis(returns) -> float:
    """Sample excess kurtosis ``m4 / m2**2 - 3`` (moment form, no bias correction)."""
    r = np.asarray(returns, dtype=float)
    if r.size < 4:
        raise InsufficientData(f"kurtosis needs at least 4 returns, got {r.size}")
    if np.all(r == r[0]):
        raise InsufficientData("kurtosis is undefined for a constant series")
    return float(stats.kurtosis(r, fisher=True, bias=True))


def acf_abs(returns, lag: int) -> float:
    """Sample autocorrelation of ``|returns|`` at ``lag``.

    Uses the standard estimator with the full-sample mean and variance in
    the denominator, which keeps the value inside ``[-1, 1]``.
    """
    x = np.abs(np.asarray(returns, dtype=float))
    if not 0 <= lag < x.size:
        raise InsufficientData(f"lag must satisfy 0 <= lag < n, got lag={lag}, n={x.size}")
    d = x - x.mean()
    denom = np.dot(d, d)
    if denom == 0:
        raise InsufficientData("autocorrelation is undefined for constant |returns|")
    return float(np.dot(d[: x.size - lag], d[lag:]) / denom)


def max_drawdown(prices) -> float:
    """Largest peak-to-trough fall, as a fraction of the peak."""
    p = np.asarray(prices, dtype=float)
    if p.size == 0:
        return 0.0
    peak = np.maximum.accumulate(p)
    return float(np.max((peak - p) / peak))
