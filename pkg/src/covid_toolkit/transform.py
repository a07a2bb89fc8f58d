"""Deterministic series transforms: log scale, per-capita normalization,
threshold alignment, simple moving average, and daily increments."""

from __future__ import annotations

import datetime
import warnings
from dataclasses import dataclass

import numpy as np

VALID_METRICS = ("confirmed", "deaths", "recovered")


@dataclass(frozen=True)
class TimeSeries:
    """Dated, ordered counts for one (region, metric) pair.

    Dates must be consecutive calendar days; values must be finite and
    aligned one-to-one with the dates.
    """

    region: str
    metric: str
    dates: tuple[datetime.date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        values = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", values)
        if len(self.dates) != values.size:
            raise ValueError(
                f"{len(self.dates)} dates but {values.size} values"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("values must be finite")
        for prev, cur in zip(self.dates, self.dates[1:]):
            if (cur - prev).days != 1:
                raise ValueError(
                    f"dates must be consecutive days; gap between {prev} and {cur}"
                )

    def __len__(self) -> int:
        return len(self.dates)

    def replace_values(self, values, dates=None) -> "TimeSeries":
        return TimeSeries(self.region, self.metric,
                          self.dates if dates is None else dates, values)


@dataclass(frozen=True)
class AlignedSeries:
    """Series re-indexed to days since its value first crossed a threshold."""

    day_index: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "day_index", np.asarray(self.day_index, dtype=int))
        object.__setattr__(self, "values", np.asarray(self.values, dtype=float))
        if self.day_index.size != self.values.size:
            raise ValueError("day_index and values must align")
        if self.day_index.size and self.day_index[0] != 0:
            raise ValueError("day_index must start at 0")

    def __len__(self) -> int:
        return int(self.values.size)


def log10_transform(series: TimeSeries, policy: str = "strict") -> TimeSeries:
    """Pointwise log10. `policy="strict"` requires positive values;
    `policy="shift1"` maps x to log10(x + 1) so zero-heavy early series plot."""
    x = series.values
    if policy == "strict":
        if np.any(x <= 0):
            bad = float(x[x <= 0][0])
            raise ValueError(f"log10 domain error on value {bad}; "
                             "use policy='shift1' for series containing zeros")
        return series.replace_values(np.log10(x))
    if policy == "shift1":
        if np.any(x < 0):
            raise ValueError("shift1 policy still requires values >= 0")
        return series.replace_values(np.log10(x + 1.0))
    raise ValueError(f"unknown log policy: {policy!r}")


def per_capita(series: TimeSeries, population: int) -> TimeSeries:
    """Counts per million inhabitants: x / population * 1e6."""
    if population is None or population <= 0:
        raise ValueError(f"population must be positive, got {population}")
    return series.replace_values(series.values / population * 1e6)


def align_to_threshold(series: TimeSeries, threshold: float) -> AlignedSeries:
    """Re-index to days since the value first reached `threshold`.

    Returns an empty alignment when the threshold is never crossed.
    """
    if len(series) == 0:
        raise ValueError("cannot align an empty series")
    crossed = np.nonzero(series.values >= threshold)[0]
    if crossed.size == 0:
        return AlignedSeries(np.empty(0, dtype=int), np.empty(0))
    start = int(crossed[0])
    tail = series.values[start:]
    return AlignedSeries(np.arange(tail.size), tail)


def simple_moving_average(series: TimeSeries, window: int) -> TimeSeries:
    """Unweighted mean over a sliding window of `window` observations.

    Output keeps the dates of each window's last day, so it is
    `window - 1` entries shorter than the input.
    """
    n = len(series)
    if window < 1:
        raise ValueError("window must be at least 1")
    if window > n:
        raise ValueError(f"window {window} exceeds series length {n}")
    kernel = np.full(window, 1.0 / window)
    sma = np.convolve(series.values, kernel, mode="valid")
    return series.replace_values(sma, dates=series.dates[window - 1:])


def daily_increments(cumulative: TimeSeries) -> TimeSeries:
    """First difference of a cumulative series.

    Negative increments (upstream data corrections) are preserved; a
    warning is emitted so they are visible, never clamped away.
    """
    if len(cumulative) < 2:
        raise ValueError("need at least 2 observations to difference")
    inc = np.diff(cumulative.values)
    negatives = int((inc < 0).sum())
    if negatives:
        warnings.warn(
            f"{negatives} negative daily increment(s) in {cumulative.region}/"
            f"{cumulative.metric}; keeping them (likely data corrections)",
            stacklevel=2,
        )
    return cumulative.replace_values(inc, dates=cumulative.dates[1:])
