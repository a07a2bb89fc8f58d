"""Logistic-regression risk-factor modeling: Newton-Raphson maximum
likelihood with step halving, Wald coefficient tests, stratified k-fold
cross-validation, and ROC/AUROC.

Quasi-complete separation (a symptom that perfectly predicts the outcome in
the fitted sample) drives coefficients toward infinity with exploding
standard errors; the fitter flags such columns instead of erroring, since
real line-list fits exhibit exactly that signature.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .stattest import TestResult, normal_cdf
from .textmine import (
    OUTCOME_DIED,
    IndicatorMatrix,
    PatientRecord,
)

MAX_NEWTON_ITERATIONS = 50
SCORE_TOLERANCE = 1e-8
SEPARATION_COEF_THRESHOLD = 15.0
SEPARATION_SE_THRESHOLD = 100.0
BASE_COLUMNS = ("intercept", "age", "sex_female", "chronic_disease")


@dataclass(frozen=True)
class DesignMatrix:
    """Complete-case predictor matrix with intercept column and binary
    outcome (1 = died)."""

    X: np.ndarray
    y: np.ndarray
    columns: tuple[str, ...]
    n_excluded: int = 0
    exclusions: dict = field(default_factory=dict)

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=int)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        if X.ndim != 2 or X.shape[1] != len(self.columns):
            raise ValueError("X shape does not match column names")
        if X.shape[0] != y.size:
            raise ValueError("X and y row counts differ")
        if not np.all(np.isfinite(X)):
            raise ValueError("design matrix entries must be finite")
        if X.size and not np.all(X[:, 0] == 1.0):
            raise ValueError("first column must be the all-ones intercept")
        if y.size and not np.isin(y, (0, 1)).all():
            raise ValueError("outcome must be binary 0/1")

    @property
    def n_rows(self) -> int:
        return int(self.X.shape[0])

    @property
    def has_both_classes(self) -> bool:
        return bool(0 < self.y.sum() < self.y.size)


@dataclass(frozen=True)
class GlmFit:
    """Fitted coefficients with Wald machinery; z = beta / SE exactly."""

    columns: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    z_values: np.ndarray
    p_values: np.ndarray
    log_likelihood: float
    iterations: int
    converged: bool
    separation_flags: np.ndarray

    def coefficient_table(self) -> list[dict]:
        """Rows mirroring a GLM summary: Estimate, Std. Error, z value,
        Pr(>|z|), plus the separation flag."""
        return [
            {
                "variable": name,
                "estimate": float(self.coefficients[j]),
                "std_error": float(self.standard_errors[j]),
                "z_value": float(self.z_values[j]),
                "p_value": float(self.p_values[j]),
                "separation_flag": bool(self.separation_flags[j]),
            }
            for j, name in enumerate(self.columns)
        ]


@dataclass(frozen=True)
class CvSummary:
    """Stratified k-fold accuracy plus the pooled held-out ROC."""

    k: int
    fold_accuracies: tuple[float, ...]
    mean_accuracy: float
    accuracy_std: float
    roc_points: tuple[tuple[float, float], ...]
    auroc: float

    def __post_init__(self):
        if any(not 0.0 <= a <= 1.0 for a in self.fold_accuracies):
            raise ValueError("fold accuracies must lie in [0, 1]")
        if not 0.0 <= self.auroc <= 1.0:
            raise ValueError(f"AUROC out of [0, 1]: {self.auroc}")


def build_design_matrix(records: list[PatientRecord],
                        indicators: IndicatorMatrix) -> DesignMatrix:
    """Complete-case design matrix: intercept, age, sex (female = 1),
    chronic-disease indicator, then one column per dictionary symptom.

    `indicators` rows must align one-to-one with `records` (build them with
    include_missing_text=True).  Records missing age, sex, or outcome are
    excluded and counted; a missing chronic-disease field is encoded 0.
    """
    if len(records) != indicators.n_rows:
        raise ValueError(
            f"{len(records)} records but {indicators.n_rows} indicator rows;"
            " build indicators with include_missing_text=True"
        )
    rows, outcomes = [], []
    exclusions = {"missing_age": 0, "missing_sex": 0, "missing_outcome": 0}
    for record, indicator_row in zip(records, indicators.rows):
        if record.age is None:
            exclusions["missing_age"] += 1
            continue
        if record.sex is None:
            exclusions["missing_sex"] += 1
            continue
        if record.outcome is None:
            exclusions["missing_outcome"] += 1
            continue
        base = [1.0, record.age, float(record.sex == "female"),
                float(bool(record.chronic_disease))]
        rows.append(base + [float(v) for v in indicator_row])
        outcomes.append(int(record.outcome == OUTCOME_DIED))
    if not rows:
        raise ValueError("no usable rows: every record lacks age, sex, or outcome")
    design = DesignMatrix(
        X=np.asarray(rows), y=np.asarray(outcomes),
        columns=BASE_COLUMNS + indicators.columns,
        n_excluded=sum(exclusions.values()), exclusions=exclusions,
    )
    if not design.has_both_classes:
        warnings.warn("outcome has a single class; the fit will fail",
                      stacklevel=2)
    return design


def logistic(eta: float) -> float:
    """P(y = 1) = e^eta / (1 + e^eta), evaluated without overflow."""
    if eta >= 0:
        return 1.0 / (1.0 + math.exp(-eta))
    e = math.exp(eta)
    return e / (1.0 + e)


def _probabilities(X: np.ndarray, beta: np.ndarray) -> np.ndarray:
    eta = X @ beta
    out = np.empty_like(eta)
    pos = eta >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-eta[pos]))
    e = np.exp(eta[~pos])
    out[~pos] = e / (1.0 + e)
    return out


def log_likelihood(X: np.ndarray, y: np.ndarray, beta: np.ndarray,
                   ridge: float = 0.0) -> float:
    """Bernoulli log-likelihood sum y*eta - log(1 + e^eta), optionally with a
    ridge penalty on the non-intercept coefficients."""
    eta = X @ beta
    ll = float(y @ eta - np.logaddexp(0.0, eta).sum())
    if ridge:
        ll -= 0.5 * ridge * float(beta[1:] @ beta[1:])
    return ll


def score_vector(X: np.ndarray, y: np.ndarray, beta: np.ndarray,
                 ridge: float = 0.0) -> np.ndarray:
    """Gradient of the log-likelihood: X' (y - p)."""
    grad = X.T @ (y - _probabilities(X, beta))
    if ridge:
        grad = grad.copy()
        grad[1:] -= ridge * beta[1:]
    return grad


def _information(X: np.ndarray, beta: np.ndarray, ridge: float) -> np.ndarray:
    p = _probabilities(X, beta)
    w = p * (1.0 - p)
    info = (X * w[:, None]).T @ X
    if ridge:
        info = info + ridge * np.diag([0.0] + [1.0] * (X.shape[1] - 1))
    return info


def fit_logistic(design: DesignMatrix, ridge: float = 0.0,
                 max_iterations: int = MAX_NEWTON_ITERATIONS,
                 tolerance: float = SCORE_TOLERANCE) -> GlmFit:
    """Newton-Raphson MLE with step halving on likelihood decrease.

    Stops when every score component is below `tolerance` in absolute value
    or the iteration cap is hit (converged=False).  Standard errors come
    from the inverse observed information; columns whose estimate or SE
    blows past the separation thresholds are flagged, not errored.
    """
    X, y = design.X, design.y
    n, k = X.shape
    if n <= k:
        raise ValueError(f"need more rows ({n}) than columns ({k})")
    if not design.has_both_classes:
        raise ValueError("outcome must contain both classes")

    beta = np.zeros(k)
    ll = log_likelihood(X, y, beta, ridge)
    converged = np.max(np.abs(score_vector(X, y, beta, ridge))) < tolerance
    iterations = 0
    while not converged and iterations < max_iterations:
        iterations += 1
        grad = score_vector(X, y, beta, ridge)
        info = _information(X, beta, ridge)
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)):
            break
        # step halving keeps the likelihood nondecreasing
        scale = 1.0
        candidate = beta + step
        candidate_ll = log_likelihood(X, y, candidate, ridge)
        while candidate_ll < ll - 1e-12 and scale > 1e-10:
            scale *= 0.5
            candidate = beta + scale * step
            candidate_ll = log_likelihood(X, y, candidate, ridge)
        beta, ll = candidate, candidate_ll
        converged = np.max(np.abs(score_vector(X, y, beta, ridge))) < tolerance

    info = _information(X, beta, ridge)
    try:
        covariance = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        covariance = np.linalg.pinv(info)
    diag = np.diag(covariance)
    se = np.where(diag > 0, np.sqrt(np.abs(diag)), np.inf)
    z = beta / se
    p_values = np.array([2.0 * normal_cdf(-abs(v)) for v in z])
    flags = (np.abs(beta) > SEPARATION_COEF_THRESHOLD) | \
            (se > SEPARATION_SE_THRESHOLD)
    return GlmFit(
        columns=design.columns,
        coefficients=beta,
        standard_errors=se,
        z_values=z,
        p_values=p_values,
        log_likelihood=log_likelihood(X, y, beta),
        iterations=iterations,
        converged=converged,
        separation_flags=flags,
    )


def wald_test(fit: GlmFit, j: int, alpha: float = 0.05) -> TestResult:
    """Two-sided Wald test of the j-th coefficient against zero.

    A separation-flagged column still yields a result, but with a warning:
    its Wald p-value is meaningless.
    """
    if not 0 <= j < len(fit.columns):
        raise IndexError(f"no coefficient {j}; fit has {len(fit.columns)}")
    if fit.separation_flags[j]:
        warnings.warn(
            f"column {fit.columns[j]!r} is separation-flagged; "
            "its Wald p-value is unreliable",
            stacklevel=2,
        )
    z = float(fit.z_values[j])
    return TestResult(test="wald", statistic=z, df=math.inf,
                      p_value=2.0 * normal_cdf(-abs(z)),
                      sidedness="two-sided", alpha=alpha)


def predict_probability(fit: GlmFit, x) -> float:
    """Death probability logistic(beta' x) for one predictor row (including
    the leading 1 for the intercept)."""
    row = np.asarray(x, dtype=float)
    if row.shape != (len(fit.columns),):
        raise ValueError(
            f"predictor row has shape {row.shape}, expected ({len(fit.columns)},)"
        )
    return logistic(float(row @ fit.coefficients))


def stratified_folds(y: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Fold label per row: each class is shuffled with the seeded generator
    and dealt round-robin, so class ratios match within one element."""
    y = np.asarray(y)
    class_counts = [int((y == c).sum()) for c in (0, 1)]
    if min(class_counts) < k:
        raise ValueError(
            f"smallest class has {min(class_counts)} rows; cannot stratify"
            f" into {k} folds"
        )
    rng = np.random.default_rng(seed)
    fold_of = np.empty(y.size, dtype=int)
    for cls in (0, 1):
        indices = np.flatnonzero(y == cls)
        shuffled = rng.permutation(indices)
        fold_of[shuffled] = np.arange(shuffled.size) % k
    return fold_of


def kfold_cross_validate(design: DesignMatrix, k: int = 5, seed: int = 0,
                         ridge: float = 0.0,
                         threshold: float = 0.5) -> CvSummary:
    """Stratified k-fold CV: accuracy at the fixed threshold per held-out
    fold, pooled held-out scores feeding one ROC."""
    fold_of = stratified_folds(design.y, k, seed)
    accuracies = []
    pooled_scores: list[float] = []
    pooled_labels: list[int] = []
    for fold in range(k):
        holdout = fold_of == fold
        train = DesignMatrix(X=design.X[~holdout], y=design.y[~holdout],
                             columns=design.columns)
        fit = fit_logistic(train, ridge=ridge)
        probs = _probabilities(design.X[holdout], fit.coefficients)
        predictions = (probs >= threshold).astype(int)
        accuracies.append(float((predictions == design.y[holdout]).mean()))
        pooled_scores.extend(probs.tolist())
        pooled_labels.extend(design.y[holdout].tolist())
    points, auroc = roc_curve(pooled_scores, pooled_labels)
    accuracies_arr = np.asarray(accuracies)
    return CvSummary(
        k=k,
        fold_accuracies=tuple(accuracies),
        mean_accuracy=float(accuracies_arr.mean()),
        accuracy_std=float(accuracies_arr.std(ddof=1)) if k > 1 else 0.0,
        roc_points=points,
        auroc=auroc,
    )


def roc_curve(scores, labels) -> tuple[tuple[tuple[float, float], ...], float]:
    """ROC points from a sweep over unique score thresholds, and AUROC by
    the Mann-Whitney pairwise formula with ties counted one half.

    The trapezoidal area under the returned points equals the pairwise
    AUROC; tests hold the two routes against each other.
    """
    s = np.asarray(scores, dtype=float)
    y = np.asarray(labels, dtype=int)
    if s.size != y.size:
        raise ValueError("scores and labels must align")
    n_pos = int((y == 1).sum())
    n_neg = int((y == 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both classes present")

    order = np.argsort(-s, kind="stable")
    sorted_scores = s[order]
    sorted_labels = y[order]
    points = [(0.0, 0.0)]
    tp = fp = 0
    for i in range(s.size):
        tp += int(sorted_labels[i] == 1)
        fp += int(sorted_labels[i] == 0)
        last_of_tie = i == s.size - 1 or sorted_scores[i + 1] != sorted_scores[i]
        if last_of_tie:
            points.append((fp / n_neg, tp / n_pos))

    ranks = rankdata(s, method="average")
    u = float(ranks[y == 1].sum()) - n_pos * (n_pos + 1) / 2.0
    auroc = u / (n_pos * n_neg)
    return tuple(points), auroc
