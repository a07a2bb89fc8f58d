"""From-scratch ARIMA engine: KPSS stationarity testing, differencing
selection, exact-likelihood ARMA fitting, AIC-based order search, and
interval forecasts."""

from .arima import (
    ArimaModel,
    ArimaOrder,
    FitError,
    ForecastResult,
    arma_log_likelihood,
    compute_aic,
    difference,
    fit_arima,
    forecast,
    undifference,
)
from .kpss import KpssResult, kpss_test, select_differencing
from .search import AutoArimaSearch, CandidateFit, auto_arima, auto_arima_search

__all__ = [
    "ArimaModel",
    "ArimaOrder",
    "AutoArimaSearch",
    "CandidateFit",
    "FitError",
    "ForecastResult",
    "KpssResult",
    "arma_log_likelihood",
    "auto_arima",
    "auto_arima_search",
    "compute_aic",
    "difference",
    "fit_arima",
    "forecast",
    "kpss_test",
    "select_differencing",
    "undifference",
]
