"""Gaussian naive Bayes with class priors from relative frequencies."""

from dataclasses import dataclass, field

import numpy as np

from ..tabular import Table
from .base import ClassifyError, schema_fingerprint, training_arrays
from .params import NaiveBayesParams

_LOG_SQRT_2PI = 0.5 * np.log(2.0 * np.pi)


@dataclass(frozen=True)
class BayesModel:
    feature_names: tuple[str, ...]
    priors: np.ndarray      # (2,) class prior probabilities
    means: np.ndarray       # (2, n_features)
    sigmas: np.ndarray      # (2, n_features), floored standard deviations
    kind: str = field(default="naive_bayes", init=False)

    @property
    def fingerprint(self) -> str:
        return schema_fingerprint(self.feature_names)

    def log_posteriors(self, X: np.ndarray) -> np.ndarray:
        """Unnormalized log posterior per class: log prior + sum of log densities."""
        out = np.empty((X.shape[0], 2))
        for c in (0, 1):
            mu = self.means[c]
            sig = self.sigmas[c]
            ll = -np.log(sig) - _LOG_SQRT_2PI - (X - mu) ** 2 / (2.0 * sig ** 2)
            out[:, c] = np.log(self.priors[c]) + ll.sum(axis=1)
        return out

    def decide(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        lp = self.log_posteriors(X)
        labels = (lp[:, 1] > lp[:, 0]).astype(np.int64)  # tie goes to class 0
        shifted = lp - lp.max(axis=1, keepdims=True)
        post = np.exp(shifted)
        post /= post.sum(axis=1, keepdims=True)
        return labels, post[:, 1]


def train_naive_bayes(train: Table, params: NaiveBayesParams) -> BayesModel:
    X, y = training_arrays(train)
    n, d = X.shape
    priors = np.empty(2)
    means = np.empty((2, d))
    sigmas = np.empty((2, d))
    for c in (0, 1):
        rows = X[y == c]
        if len(rows) < 2:
            raise ClassifyError(
                f"class {c} has {len(rows)} rows; need at least 2 to estimate a variance")
        priors[c] = len(rows) / n
        means[c] = rows.mean(axis=0)
        sigmas[c] = np.maximum(rows.std(axis=0, ddof=1), params.variance_floor)
    return BayesModel(train.feature_names, priors, means, sigmas)
