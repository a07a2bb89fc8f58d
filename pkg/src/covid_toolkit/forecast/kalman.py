"""Exact Gaussian ARMA likelihood via the state-space innovations recursion.

The ARMA(p, q) process is put in the Harvey state-space form with state
dimension r = max(p, q + 1): the transition matrix carries the AR
coefficients in its first column and a shifted identity, the disturbance
loading carries [1, theta_1, ..., theta_{r-1}].  Running the Kalman filter
from the exact stationary initial covariance yields the prediction-error
decomposition of the likelihood, with the innovation variance concentrated
out analytically.

The per-observation loop is JIT-compiled with numba when available and falls
back to plain Python otherwise.
"""

from __future__ import annotations

import math

import numpy as np

try:
    from numba import njit
except ImportError:  # pragma: no cover - numba is a normal dependency
    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]

        def wrap(func):
            return func

        return wrap


LOG_2PI = math.log(2.0 * math.pi)
_MIN_PREDICTION_VAR = 1e-12


def unconstrained_to_pacf(x: np.ndarray) -> np.ndarray:
    """Map unconstrained reals into (-1, 1) partial autocorrelations."""
    return np.tanh(np.asarray(x, dtype=float))


def pacf_to_ar(pacf: np.ndarray) -> np.ndarray:
    """Durbin-Levinson map from partial autocorrelations in (-1, 1) to AR
    coefficients whose polynomial has all roots outside the unit circle."""
    phi = np.array(pacf, dtype=float)
    for j in range(1, phi.size):
        prev = phi[:j].copy()
        phi[:j] = prev - pacf[j] * prev[::-1]
    return phi


def pacf_to_ma(pacf: np.ndarray) -> np.ndarray:
    """Same recursion with flipped sign, yielding MA coefficients of an
    invertible polynomial 1 + theta_1 B + ... + theta_q B^q."""
    theta = np.array(pacf, dtype=float)
    for j in range(1, theta.size):
        prev = theta[:j].copy()
        theta[:j] = prev + pacf[j] * prev[::-1]
    return theta


def harvey_matrices(ar: np.ndarray, ma: np.ndarray):
    """Transition matrix T and disturbance outer product R R' for the
    state-space form of a zero-mean ARMA(p, q)."""
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    p, q = ar.size, ma.size
    r = max(p, q + 1)
    T = np.zeros((r, r))
    T[:p, 0] = ar
    for i in range(r - 1):
        T[i, i + 1] = 1.0
    R = np.zeros(r)
    R[0] = 1.0
    R[1:q + 1] = ma
    return T, np.outer(R, R)


def stationary_initial_cov(T: np.ndarray, RRt: np.ndarray) -> np.ndarray:
    """Solve the discrete Lyapunov equation P = T P T' + R R' for the exact
    stationary state covariance (unit innovation variance)."""
    r = T.shape[0]
    lhs = np.eye(r * r) - np.kron(T, T)
    vec_p = np.linalg.solve(lhs, RRt.ravel())
    P = vec_p.reshape(r, r)
    return 0.5 * (P + P.T)


@njit(cache=True)
def _filter_core(w, T, Tt, RRt, P0):  # pragma: no cover - exercised via wrapper
    n = w.shape[0]
    r = T.shape[0]
    a = np.zeros(r)
    P = P0.copy()
    sum_log_f = 0.0
    sum_v2_f = 0.0
    for t in range(n):
        f = P[0, 0]
        if not np.isfinite(f) or f < _MIN_PREDICTION_VAR:
            return np.nan, np.nan, a, P
        v = w[t] - a[0]
        sum_log_f += np.log(f)
        sum_v2_f += v * v / f
        M = T @ P
        K = M[:, 0].copy() / f
        a = T @ a + K * v
        P = M @ Tt + RRt - np.outer(K, K) * f
        P = 0.5 * (P + P.T)
    return sum_log_f, sum_v2_f, a, P


def run_filter(w: np.ndarray, ar: np.ndarray, ma: np.ndarray):
    """Kalman filter pass over a zero-mean series with unit innovation
    variance.

    Returns (sum_log_f, sum_v2_f, a_next, P_next) where a_next is the
    predicted state E[alpha_{n+1} | data]; the first two terms are the
    prediction-error sums the concentrated likelihood needs.  Returns NaNs
    in the sums when the recursion breaks down numerically.
    """
    w = np.ascontiguousarray(w, dtype=float)
    T, RRt = harvey_matrices(ar, ma)
    try:
        P0 = stationary_initial_cov(T, RRt)
    except np.linalg.LinAlgError:
        r = T.shape[0]
        return np.nan, np.nan, np.zeros(r), np.eye(r)
    Tt = np.ascontiguousarray(T.T)
    return _filter_core(w, T, Tt, RRt, P0)


def concentrated_log_likelihood(w: np.ndarray, ar, ma, mean: float = 0.0):
    """Exact Gaussian ARMA log-likelihood with sigma^2 profiled out.

    Returns (log_likelihood, sigma2_hat); (-inf, nan) when the parameters
    are numerically unusable.
    """
    w = np.asarray(w, dtype=float)
    n = w.size
    sum_log_f, sum_v2_f, _, _ = run_filter(w - mean, ar, ma)
    if not (np.isfinite(sum_log_f) and np.isfinite(sum_v2_f)) or sum_v2_f <= 0:
        return -np.inf, np.nan
    sigma2 = sum_v2_f / n
    ll = -0.5 * n * (LOG_2PI + 1.0 + math.log(sigma2)) - 0.5 * sum_log_f
    return ll, sigma2


def psi_weights(ar, ma, count: int) -> np.ndarray:
    """First `count` coefficients of the MA(inf) representation
    psi(B) = theta(B) / phi(B), starting at psi_0 = 1."""
    ar = np.asarray(ar, dtype=float)
    ma = np.asarray(ma, dtype=float)
    psi = np.zeros(count)
    if count == 0:
        return psi
    psi[0] = 1.0
    for j in range(1, count):
        value = ma[j - 1] if j <= ma.size else 0.0
        upper = min(j, ar.size)
        for i in range(1, upper + 1):
            value += ar[i - 1] * psi[j - i]
        psi[j] = value
    return psi


def ar_with_differencing(ar, d: int) -> np.ndarray:
    """AR-side coefficients of phi(B) (1 - B)^d, i.e. of the full operator
    a differenced model applies to the undifferenced series."""
    # represent phi(B) as [1, -phi_1, ..., -phi_p] and multiply by (1-B)^d
    phi_poly = np.concatenate(([1.0], -np.asarray(ar, dtype=float)))
    for _ in range(d):
        phi_poly = np.convolve(phi_poly, [1.0, -1.0])
    return -phi_poly[1:]
