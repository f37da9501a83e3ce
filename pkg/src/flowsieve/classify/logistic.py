"""Logistic regression trained by full-batch gradient descent."""

from dataclasses import dataclass, field

import numpy as np

from ..tabular import Table
from .base import ClassifyError, schema_fingerprint, training_arrays
from .params import LogisticParams

THRESHOLD_SWEEP = [round(0.05 * i, 2) for i in range(1, 20)]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass(frozen=True)
class LogisticModel:
    feature_names: tuple[str, ...]
    coefficients: np.ndarray  # intercept first, then one weight per feature
    decision_threshold: float
    kind: str = field(default="logistic_regression", init=False)

    @property
    def fingerprint(self) -> str:
        return schema_fingerprint(self.feature_names)

    def scores(self, X: np.ndarray) -> np.ndarray:
        z = self.coefficients[0] + X @ self.coefficients[1:]
        return _sigmoid(z)

    def decide(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = self.scores(X)
        return (s > self.decision_threshold).astype(np.int64), s


def _mean_cross_entropy(z: np.ndarray, y: np.ndarray) -> float:
    # log(1 + e^z) - y*z, computed without overflow
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def _f1(pred: np.ndarray, truth: np.ndarray) -> float:
    tp = int(((pred == 1) & (truth == 1)).sum())
    fp = int(((pred == 1) & (truth == 0)).sum())
    fn = int(((pred == 0) & (truth == 1)).sum())
    if tp == 0:
        return 0.0
    p = tp / (tp + fp)
    r = tp / (tp + fn)
    return 2 * p * r / (p + r)


def train_logistic(train: Table, params: LogisticParams) -> LogisticModel:
    """Minimize mean cross-entropy from a zero start for `epochs` full-batch steps."""
    X, y = training_arrays(train)
    n, d = X.shape
    yf = y.astype(np.float64)
    coef = np.zeros(d + 1)
    with np.errstate(over="ignore", invalid="ignore"):  # divergence is caught below
        for _ in range(params.epochs):
            z = coef[0] + X @ coef[1:]
            loss = _mean_cross_entropy(z, yf)
            if not np.isfinite(loss):
                raise ClassifyError(
                    f"training loss became non-finite; lower learning_rate="
                    f"{params.learning_rate}")
            resid = _sigmoid(z) - yf
            coef[0] -= params.learning_rate * resid.mean()
            coef[1:] -= params.learning_rate * (X.T @ resid) / n
    if not np.isfinite(coef).all():
        raise ClassifyError("coefficients became non-finite; lower the learning rate")

    threshold = params.decision_threshold
    if params.tune_threshold:
        probe = LogisticModel(train.feature_names, coef, 0.5)
        s = probe.scores(X)
        best = (-1.0, threshold)
        for h in THRESHOLD_SWEEP:
            f1 = _f1((s > h).astype(np.int64), y)
            if f1 > best[0]:
                best = (f1, h)
        threshold = best[1]
    return LogisticModel(train.feature_names, coef, threshold)
