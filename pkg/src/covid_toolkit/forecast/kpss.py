"""KPSS level-stationarity test and differencing-degree selection.

Null hypothesis: the series is stationary around a constant level.  The
statistic is the scaled sum of squared partial sums of demeaned values,
normalized by a Bartlett-kernel long-run variance with lag truncation
floor(4 * (n/100)^0.25).  Decisions use the 5% critical value 0.463.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

CRITICAL_VALUE_5PCT = 0.463
MIN_LENGTH = 10


@dataclass(frozen=True)
class KpssResult:
    statistic: float
    lag_truncation: int
    critical_value_5pct: float = CRITICAL_VALUE_5PCT
    reject_stationarity: bool = field(init=False)

    def __post_init__(self):
        if self.statistic < 0:
            raise ValueError(f"KPSS statistic must be >= 0, got {self.statistic}")
        object.__setattr__(
            self, "reject_stationarity",
            self.statistic > self.critical_value_5pct,
        )


def bartlett_long_run_variance(residuals: np.ndarray, lags: int) -> float:
    """Newey-West long-run variance with Bartlett weights 1 - k/(lags+1).

    All autocovariances use the 1/n convention.
    """
    e = np.asarray(residuals, dtype=float)
    n = e.size
    variance = float(e @ e) / n
    for k in range(1, lags + 1):
        gamma_k = float(e[k:] @ e[:-k]) / n
        variance += 2.0 * (1.0 - k / (lags + 1.0)) * gamma_k
    return variance


def kpss_lag_truncation(n: int) -> int:
    return int(np.floor(4.0 * (n / 100.0) ** 0.25))


def kpss_test(values) -> KpssResult:
    """Level-stationarity KPSS test at the 5% level.

    A constant series has zero residual variance; its statistic is defined
    as 0 (never rejects).
    """
    y = np.asarray(values, dtype=float)
    n = y.size
    if n < MIN_LENGTH:
        raise ValueError(f"KPSS needs at least {MIN_LENGTH} observations, got {n}")
    lags = kpss_lag_truncation(n)
    residuals = y - y.mean()
    long_run_var = bartlett_long_run_variance(residuals, lags)
    if long_run_var <= 0.0:
        return KpssResult(statistic=0.0, lag_truncation=lags)
    partial_sums = np.cumsum(residuals)
    statistic = float(partial_sums @ partial_sums) / (n * n * long_run_var)
    return KpssResult(statistic=statistic, lag_truncation=lags)


def select_differencing(values, d_max: int = 2) -> int:
    """Smallest d in 0..d_max whose d-fold difference passes the KPSS test;
    d_max when every degree rejects."""
    y = np.asarray(values, dtype=float)
    if y.size < MIN_LENGTH + d_max:
        raise ValueError(
            f"need at least {MIN_LENGTH + d_max} observations, got {y.size}"
        )
    for d in range(d_max):
        if not kpss_test(np.diff(y, n=d)).reject_stationarity:
            return d
    return d_max
