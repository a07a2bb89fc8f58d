"""ARIMA(p, d, q) fitting by exact Gaussian maximum likelihood, plus
differencing utilities and interval forecasts.

Estimation works on the d-differenced series.  The optimizer searches an
unconstrained space that maps through partial autocorrelations onto the
stationary/invertible region, so every fitted model satisfies both
constraints by construction.  The innovation variance is concentrated out
of the likelihood; AIC is -2 ln L + 2 (p + q + k) with k = 1 when an
intercept is estimated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .kalman import (
    LOG_2PI,
    ar_with_differencing,
    concentrated_log_likelihood,
    harvey_matrices,
    pacf_to_ar,
    pacf_to_ma,
    psi_weights,
    run_filter,
    unconstrained_to_pacf,
)

MAX_P = 5
MAX_Q = 5
MAX_D = 2
MIN_IDENTIFIABILITY_MARGIN = 5
Z_95 = 1.96
_ROOT_TOLERANCE = 1e-6


class FitError(RuntimeError):
    """Maximum-likelihood estimation failed or the data cannot support it."""


@dataclass(frozen=True)
class ArimaOrder:
    """AR order p, differencing degree d, MA order q."""

    p: int
    d: int
    q: int

    def __post_init__(self):
        for name, bound in (("p", MAX_P), ("d", MAX_D), ("q", MAX_Q)):
            value = getattr(self, name)
            if not 0 <= value <= bound:
                raise ValueError(f"{name} must be in 0..{bound}, got {value}")


@dataclass(frozen=True)
class ArimaModel:
    """A fitted ARIMA model on the d-differenced scale.

    `intercept` is the constant c of the difference-equation form
    w_t = c + sum phi_i w_{t-i} + sum theta_j e_{t-j} + e_t (None when no
    intercept was estimated).  `aic` always equals
    compute_aic(log_likelihood, order, intercept is not None).
    """

    order: ArimaOrder
    ar_coefficients: tuple[float, ...]
    ma_coefficients: tuple[float, ...]
    intercept: float | None
    innovation_variance: float
    log_likelihood: float
    aic: float
    n_obs: int

    def __post_init__(self):
        object.__setattr__(self, "ar_coefficients",
                           tuple(float(v) for v in self.ar_coefficients))
        object.__setattr__(self, "ma_coefficients",
                           tuple(float(v) for v in self.ma_coefficients))
        if len(self.ar_coefficients) != self.order.p:
            raise ValueError("AR coefficient count does not match order")
        if len(self.ma_coefficients) != self.order.q:
            raise ValueError("MA coefficient count does not match order")
        if not self.innovation_variance > 0:
            raise ValueError(
                f"innovation variance must be positive, got {self.innovation_variance}"
            )
        expected_aic = compute_aic(self.log_likelihood, self.order,
                                   self.intercept is not None)
        if abs(self.aic - expected_aic) > 1e-9:
            raise ValueError("stored AIC inconsistent with log-likelihood and order")
        if not _roots_outside_unit_circle(self.ar_coefficients, ar_side=True):
            raise ValueError("AR polynomial is not stationary")
        if not _roots_outside_unit_circle(self.ma_coefficients, ar_side=False):
            raise ValueError("MA polynomial is not invertible")

    @property
    def mean(self) -> float:
        """Stationary mean of the differenced series implied by the intercept."""
        if self.intercept is None:
            return 0.0
        return self.intercept / (1.0 - sum(self.ar_coefficients))


@dataclass(frozen=True)
class ForecastResult:
    """h-step point forecasts with symmetric 95% bounds."""

    horizon: int
    point: np.ndarray
    lower95: np.ndarray
    upper95: np.ndarray

    def __post_init__(self):
        point = np.asarray(self.point, dtype=float)
        lower = np.asarray(self.lower95, dtype=float)
        upper = np.asarray(self.upper95, dtype=float)
        for name, arr in (("point", point), ("lower95", lower), ("upper95", upper)):
            if arr.size != self.horizon:
                raise ValueError(f"{name} must have length {self.horizon}")
            object.__setattr__(self, name, arr)
        if np.any(lower > point) or np.any(point > upper):
            raise ValueError("bounds must bracket the point forecast")
        widths = upper - lower
        if np.any(np.diff(widths) < -1e-9):
            raise ValueError("interval width must be nondecreasing in horizon")


def _roots_outside_unit_circle(coefficients, ar_side: bool) -> bool:
    coeffs = np.asarray(coefficients, dtype=float)
    if coeffs.size == 0:
        return True
    # AR: 1 - phi_1 z - ... ; MA: 1 + theta_1 z + ...
    poly = np.concatenate(([1.0], -coeffs if ar_side else coeffs))
    roots = np.roots(poly[::-1])
    return bool(np.all(np.abs(roots) > 1.0 - _ROOT_TOLERANCE))


def difference(values, d: int):
    """d-fold first difference; output is d entries shorter."""
    arr = np.asarray(values, dtype=float)
    if d < 0:
        raise ValueError(f"differencing degree must be >= 0, got {d}")
    if arr.size <= d:
        raise ValueError(f"series of length {arr.size} cannot be differenced {d} times")
    return np.diff(arr, n=d) if d else arr.copy()


def undifference(diffed, initial_values, d: int | None = None):
    """Invert d-fold differencing, continuing from the d original values that
    immediately precede the reconstructed segment.

    For x and w = difference(x, d): undifference(w, x[:d]) == x[d:], and a
    forecast on the differenced scale is undifferenced with the last d
    observations of the history.
    """
    init = np.asarray(initial_values, dtype=float)
    if d is None:
        d = init.size
    if init.size != d:
        raise ValueError(f"expected {d} initial values, got {init.size}")
    out = np.asarray(diffed, dtype=float).copy()
    for level in range(d - 1, -1, -1):
        seed = float(np.diff(init, n=level)[-1]) if level else float(init[-1])
        out = seed + np.cumsum(out)
    return out


def compute_aic(log_likelihood: float, order: ArimaOrder,
                intercept_included: bool) -> float:
    """-2 ln L + 2 (p + q + k), k = 1 when an intercept is estimated."""
    if not np.isfinite(log_likelihood):
        raise ValueError(f"log-likelihood must be finite, got {log_likelihood}")
    k = 1 if intercept_included else 0
    return -2.0 * log_likelihood + 2.0 * (order.p + order.q + k)


def arma_log_likelihood(w, ar, ma, mean: float = 0.0) -> tuple[float, float]:
    """Exact Gaussian log-likelihood of a stationary, invertible ARMA at the
    given coefficients, with sigma^2 profiled out.

    Returns (log_likelihood, sigma2_hat).  -inf signals unusable parameters.
    """
    return concentrated_log_likelihood(np.asarray(w, dtype=float), ar, ma, mean)


def _unpack_parameters(x: np.ndarray, p: int, q: int, include_intercept: bool):
    offset = 1 if include_intercept else 0
    mean = x[0] if include_intercept else 0.0
    ar = pacf_to_ar(unconstrained_to_pacf(x[offset:offset + p]))
    ma = pacf_to_ma(unconstrained_to_pacf(x[offset + p:offset + p + q]))
    return mean, ar, ma


def fit_arima(values, order: ArimaOrder,
              include_intercept: bool = False) -> ArimaModel:
    """Fit an ARIMA(p, d, q) by exact maximum likelihood.

    Raises FitError when the differenced series is too short or degenerate,
    or when the optimizer fails to converge.
    """
    arr = np.asarray(values, dtype=float)
    p, d, q = order.p, order.d, order.q
    if arr.size - d < p + q + MIN_IDENTIFIABILITY_MARGIN:
        raise FitError(
            f"series too short: need at least {d + p + q + MIN_IDENTIFIABILITY_MARGIN}"
            f" observations for {order}, got {arr.size}"
        )
    w = difference(arr, d)
    n = w.size
    if np.ptp(w) == 0.0:
        raise FitError("differenced series has zero variance")

    if p == 0 and q == 0:
        mean = float(w.mean()) if include_intercept else 0.0
        sigma2 = float(np.mean((w - mean) ** 2))
        if sigma2 <= 0.0:
            raise FitError("differenced series has zero variance")
        ll = -0.5 * n * (LOG_2PI + 1.0 + np.log(sigma2))
        return _build_model(order, np.empty(0), np.empty(0), mean,
                            include_intercept, sigma2, float(ll), n)

    def objective(x):
        mean, ar, ma = _unpack_parameters(x, p, q, include_intercept)
        ll, _ = concentrated_log_likelihood(w, ar, ma, mean)
        return 1e12 if not np.isfinite(ll) else -ll

    x0 = np.zeros(p + q + (1 if include_intercept else 0))
    if include_intercept:
        x0[0] = w.mean()
    result = minimize(objective, x0, method="Nelder-Mead",
                      options={"xatol": 1e-8, "fatol": 1e-10,
                               "maxiter": 5000, "maxfev": 5000})
    # restart once from the solution; a fresh simplex polishes stalls
    result = minimize(objective, result.x, method="Nelder-Mead",
                      options={"xatol": 1e-8, "fatol": 1e-10,
                               "maxiter": 5000, "maxfev": 5000})
    if not result.success or not np.isfinite(result.fun) or result.fun >= 1e12:
        raise FitError(f"optimizer did not converge for {order}: {result.message}")

    mean, ar, ma = _unpack_parameters(result.x, p, q, include_intercept)
    ll, sigma2 = concentrated_log_likelihood(w, ar, ma, mean)
    if not np.isfinite(ll) or not sigma2 > 0:
        raise FitError(f"likelihood degenerate at optimum for {order}")
    return _build_model(order, ar, ma, mean, include_intercept,
                        float(sigma2), float(ll), n)


def _build_model(order, ar, ma, mean, include_intercept, sigma2, ll, n_obs):
    intercept = None
    if include_intercept:
        intercept = float(mean * (1.0 - np.sum(ar)))
    return ArimaModel(
        order=order,
        ar_coefficients=tuple(ar),
        ma_coefficients=tuple(ma),
        intercept=intercept,
        innovation_variance=sigma2,
        log_likelihood=ll,
        aic=compute_aic(ll, order, include_intercept),
        n_obs=n_obs,
    )


def forecast(model: ArimaModel, history, horizon: int) -> ForecastResult:
    """h-step forecasts with symmetric 95% bounds.

    Point forecasts iterate the state-space recursion from the filtered
    state on the differenced scale, then undifference.  The forecast-error
    variance is sigma^2 times the cumulative squared psi-weights of the full
    (undifferenced) operator, and bounds are point +/- 1.96 sqrt(variance).
    """
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    arr = np.asarray(history, dtype=float)
    d = model.order.d
    w = difference(arr, d)
    if w.size != model.n_obs:
        raise ValueError(
            f"history of length {arr.size} does not match the fitted sample"
            f" size {model.n_obs} (after {d} difference(s))"
        )
    ar = np.asarray(model.ar_coefficients)
    ma = np.asarray(model.ma_coefficients)
    mean = model.mean

    _, _, state, _ = run_filter(w - mean, ar, ma)
    T, _ = harvey_matrices(ar, ma)
    point_diffed = np.empty(horizon)
    for h in range(horizon):
        point_diffed[h] = state[0] + mean
        state = T @ state
    point = undifference(point_diffed, arr[-d:], d) if d else point_diffed

    psi = psi_weights(ar_with_differencing(ar, d), ma, horizon)
    variance = model.innovation_variance * np.cumsum(psi ** 2)
    half_width = Z_95 * np.sqrt(variance)
    return ForecastResult(horizon=horizon, point=point,
                          lower95=point - half_width,
                          upper95=point + half_width)
