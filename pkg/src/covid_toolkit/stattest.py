"""Classical hypothesis tests: F-test for variance equality, Welch's t-test,
chi-square test of independence, and QQ quantile pairs.

All p-values are computed through the distribution functions in
:mod:`covid_toolkit.special`; no statistics library is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .special import (
    incomplete_beta_reg,
    lower_gamma_reg,
    normal_cdf,
    normal_quantile,
    upper_gamma_reg,
)

DEFAULT_ALPHA = 0.05


@dataclass(frozen=True)
class SampleSummary:
    """Size, mean, and sample variance (n-1 divisor) of one sample."""

    n: int
    mean: float
    variance: float

    @classmethod
    def from_sample(cls, values) -> "SampleSummary":
        arr = np.asarray(values, dtype=float)
        if arr.size < 2:
            raise ValueError(f"need at least 2 observations, got {arr.size}")
        return cls(n=int(arr.size), mean=float(arr.mean()),
                   variance=float(arr.var(ddof=1)))


@dataclass(frozen=True)
class TestResult:
    """Outcome of one hypothesis test; `reject` is `p_value < alpha`."""

    test: str
    statistic: float
    df: float | tuple[float, float]
    p_value: float
    sidedness: str
    alpha: float = DEFAULT_ALPHA
    reject: bool = field(init=False)

    def __post_init__(self):
        if not 0.0 <= self.p_value <= 1.0:
            raise ValueError(f"p-value out of range: {self.p_value}")
        object.__setattr__(self, "reject", self.p_value < self.alpha)

    def to_dict(self) -> dict:
        df = list(self.df) if isinstance(self.df, tuple) else self.df
        return {
            "test": self.test,
            "statistic": self.statistic,
            "df": df,
            "p_value": self.p_value,
            "alpha": self.alpha,
            "reject": self.reject,
            "sidedness": self.sidedness,
        }


@dataclass(frozen=True)
class ContingencyTable:
    """r x c table of non-negative integer counts with derived marginals."""

    counts: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        arr = np.asarray(self.counts)
        if arr.ndim != 2 or arr.shape[0] < 2 or arr.shape[1] < 2:
            raise ValueError("contingency table must be at least 2x2")
        if np.any(arr < 0) or not np.issubdtype(arr.dtype, np.integer):
            raise ValueError("counts must be non-negative integers")
        object.__setattr__(
            self, "counts", tuple(tuple(int(v) for v in row) for row in arr)
        )

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.counts, dtype=float)

    @property
    def row_sums(self) -> np.ndarray:
        return self.array.sum(axis=1)

    @property
    def col_sums(self) -> np.ndarray:
        return self.array.sum(axis=0)

    @property
    def total(self) -> float:
        return float(self.array.sum())


def cdf(distribution: str, x: float, df=None) -> float:
    """Lower-tail probability of the named distribution at x.

    `df` is a single value for student_t and chi_square, a (df1, df2) pair
    for f, and ignored for normal.
    """
    if distribution == "normal":
        return normal_cdf(x)
    if distribution == "student_t":
        return student_t_cdf(x, _positive_df(df))
    if distribution == "chi_square":
        return chi_square_cdf(x, _positive_df(df))
    if distribution == "f":
        try:
            df1, df2 = df
        except (TypeError, ValueError):
            raise ValueError("f distribution needs df=(df1, df2)") from None
        return f_cdf(x, _positive_df(df1), _positive_df(df2))
    raise ValueError(f"unknown distribution: {distribution!r}")


def _positive_df(df) -> float:
    if df is None or not float(df) > 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    return float(df)


def student_t_cdf(x: float, df: float) -> float:
    if x == 0.0:
        return 0.5
    w = df / (df + x * x)
    tail = 0.5 * incomplete_beta_reg(0.5 * df, 0.5, w)
    return 1.0 - tail if x > 0 else tail


def chi_square_cdf(x: float, df: float) -> float:
    if x <= 0.0:
        return 0.0
    return lower_gamma_reg(0.5 * df, 0.5 * x)


def f_cdf(x: float, df1: float, df2: float) -> float:
    if x <= 0.0:
        return 0.0
    u = df1 * x
    return incomplete_beta_reg(0.5 * df1, 0.5 * df2, u / (u + df2))


def f_test_variance(x, y, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """F-test for equality of variances, two-sided via doubled minimum tail.

    The two tail probabilities are evaluated with swapped incomplete-beta
    arguments rather than complementation, so swapping the samples yields a
    bitwise-identical p-value.
    """
    sx = SampleSummary.from_sample(x)
    sy = SampleSummary.from_sample(y)
    if sx.variance == 0.0 or sy.variance == 0.0:
        raise ValueError("F-test undefined for a zero-variance sample")
    d1, d2 = float(sx.n - 1), float(sy.n - 1)
    f = sx.variance / sy.variance
    u = d1 * sx.variance
    v = d2 * sy.variance
    lower = incomplete_beta_reg(0.5 * d1, 0.5 * d2, u / (u + v))
    upper = incomplete_beta_reg(0.5 * d2, 0.5 * d1, v / (u + v))
    p = min(1.0, 2.0 * min(lower, upper))
    return TestResult(test="f_variance", statistic=f, df=(d1, d2),
                      p_value=p, sidedness="two-sided", alpha=alpha)


def welch_t_test(x, y, alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Two-sample t-test with unpooled variances and Welch-Satterthwaite df."""
    sx = SampleSummary.from_sample(x)
    sy = SampleSummary.from_sample(y)
    ax = sx.variance / sx.n
    ay = sy.variance / sy.n
    if ax + ay == 0.0:
        raise ValueError("Welch t-test undefined when both variances are zero")
    t = (sx.mean - sy.mean) / math.sqrt(ax + ay)
    df = (ax + ay) ** 2 / (ax * ax / (sx.n - 1) + ay * ay / (sy.n - 1))
    # two-sided p via the exact identity P(|T| > t) = I_{df/(df+t^2)}(df/2, 1/2)
    p = incomplete_beta_reg(0.5 * df, 0.5, df / (df + t * t))
    return TestResult(test="welch_t", statistic=t, df=df,
                      p_value=p, sidedness="two-sided", alpha=alpha)


def chi_square_independence(table: ContingencyTable,
                            alpha: float = DEFAULT_ALPHA) -> TestResult:
    """Chi-square test of independence, no continuity correction."""
    obs = table.array
    rows = table.row_sums
    cols = table.col_sums
    if np.any(rows == 0) or np.any(cols == 0):
        raise ValueError("every row and column sum must be positive")
    expected = np.outer(rows, cols) / table.total
    stat = float(((obs - expected) ** 2 / expected).sum())
    df = float((obs.shape[0] - 1) * (obs.shape[1] - 1))
    p = upper_gamma_reg(0.5 * df, 0.5 * stat) if stat > 0 else 1.0
    return TestResult(test="chi_square_independence", statistic=stat, df=df,
                      p_value=p, sidedness="upper", alpha=alpha)


def qq_points(sample) -> list[tuple[float, float]]:
    """Normal QQ pairs: theoretical quantiles at (i - 0.5)/n plotting positions
    against the sorted sample standardized by its mean and SD."""
    arr = np.sort(np.asarray(sample, dtype=float))
    n = arr.size
    if n < 3:
        raise ValueError(f"need at least 3 observations, got {n}")
    sd = arr.std(ddof=1)
    if sd == 0.0:
        raise ValueError("QQ points undefined for a zero-variance sample")
    mean = arr.mean()
    return [
        (normal_quantile((i + 0.5) / n), float((arr[i] - mean) / sd))
        for i in range(n)
    ]
