"""COVID-19 analytics toolkit.

A library (plus a small report CLI) covering the quantitative pipeline of a
pandemic tracker: CSSE-format data ingestion with cache fallback, series
transforms, from-scratch auto-ARIMA forecasting, n-gram symptom mining,
logistic-regression risk modeling, and classical hypothesis tests.
"""

from . import forecast, ingest, riskmodel, special, stattest, textmine, transform
from .transform import AlignedSeries, TimeSeries

__version__ = "0.1.0"

__all__ = [
    "AlignedSeries",
    "TimeSeries",
    "forecast",
    "ingest",
    "riskmodel",
    "special",
    "stattest",
    "textmine",
    "transform",
]
