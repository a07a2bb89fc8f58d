"""Automatic ARIMA order selection: KPSS-driven differencing followed by a
stepwise AIC search over (p, q), with an exhaustive-grid mode for oracles.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .arima import MAX_P, MAX_Q, ArimaModel, ArimaOrder, FitError, fit_arima
from .kpss import select_differencing

logger = logging.getLogger(__name__)

MIN_SERIES_LENGTH = 20
_STEPWISE_STARTS = ((0, 0), (1, 0), (0, 1), (2, 2))
_NEIGHBOR_MOVES = ((-1, 0), (1, 0), (0, -1), (0, 1),
                   (-1, -1), (-1, 1), (1, -1), (1, 1))


@dataclass(frozen=True)
class CandidateFit:
    """One (p, q) evaluation during the search; aic is None when skipped."""

    order: ArimaOrder
    intercept: bool
    aic: float | None
    error: str | None = None


@dataclass(frozen=True)
class AutoArimaSearch:
    """Selected model plus the full candidate log, in evaluation order."""

    model: ArimaModel
    candidates: tuple[CandidateFit, ...]
    d: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "candidates", tuple(self.candidates))
        object.__setattr__(self, "d", self.model.order.d)

    @property
    def n_skipped(self) -> int:
        return sum(1 for c in self.candidates if c.aic is None)


def auto_arima_search(values, max_p: int = MAX_P, max_q: int = MAX_Q,
                      d_max: int = 2, d: int | None = None,
                      stepwise: bool = True) -> AutoArimaSearch:
    """Select the minimum-AIC ARIMA for a series.

    The differencing degree comes from KPSS unless `d` is given.  An
    intercept is included exactly when d = 0.  Candidates that fail to fit
    are skipped silently but kept in the candidate log.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size < MIN_SERIES_LENGTH:
        raise ValueError(
            f"need at least {MIN_SERIES_LENGTH} observations, got {arr.size}"
        )
    if d is None:
        d = select_differencing(arr, d_max=d_max)
    include_intercept = d == 0

    evaluated: dict[tuple[int, int], float | None] = {}
    models: dict[tuple[int, int], ArimaModel] = {}
    log: list[CandidateFit] = []

    def evaluate(p: int, q: int) -> float | None:
        key = (p, q)
        if key in evaluated:
            return evaluated[key]
        order = ArimaOrder(p=p, d=d, q=q)
        try:
            model = fit_arima(arr, order, include_intercept=include_intercept)
        except FitError as exc:
            evaluated[key] = None
            log.append(CandidateFit(order, include_intercept, None, str(exc)))
            logger.debug("candidate %s skipped: %s", order, exc)
            return None
        evaluated[key] = model.aic
        models[key] = model
        log.append(CandidateFit(order, include_intercept, model.aic))
        return model.aic

    if stepwise:
        _stepwise_search(evaluate, max_p, max_q)
    else:
        for p in range(max_p + 1):
            for q in range(max_q + 1):
                evaluate(p, q)

    converged = {k: v for k, v in evaluated.items() if v is not None}
    if not converged:
        raise FitError("no ARIMA candidate converged")
    best_key = min(converged, key=lambda k: (converged[k], k))
    return AutoArimaSearch(model=models[best_key], candidates=tuple(log))


def _stepwise_search(evaluate, max_p: int, max_q: int) -> None:
    best_aic = np.inf
    incumbent = None
    for p, q in _STEPWISE_STARTS:
        if p > max_p or q > max_q:
            continue
        aic = evaluate(p, q)
        if aic is not None and aic < best_aic:
            best_aic, incumbent = aic, (p, q)
    if incumbent is None:
        return
    improved = True
    while improved:
        improved = False
        p, q = incumbent
        for dp, dq in _NEIGHBOR_MOVES:
            np_, nq = p + dp, q + dq
            if not (0 <= np_ <= max_p and 0 <= nq <= max_q):
                continue
            aic = evaluate(np_, nq)
            if aic is not None and aic < best_aic:
                best_aic, incumbent = aic, (np_, nq)
                improved = True
        # all neighbors of the new incumbent are explored on the next pass


def auto_arima(values, max_p: int = MAX_P, max_q: int = MAX_Q,
               d_max: int = 2, d: int | None = None,
               stepwise: bool = True) -> ArimaModel:
    """Minimum-AIC model from `auto_arima_search` (candidate log dropped)."""
    return auto_arima_search(values, max_p=max_p, max_q=max_q, d_max=d_max,
                             d=d, stepwise=stepwise).model
