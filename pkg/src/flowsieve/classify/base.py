"""Shared classifier plumbing: predictions, feature manifests, dispatch."""

import hashlib
from dataclasses import dataclass

import numpy as np

from ..tabular import Table


class ClassifyError(ValueError):
    pass


class ManifestMismatchError(ClassifyError):
    """Prediction input does not match the model's feature manifest."""


@dataclass(frozen=True)
class Prediction:
    label: int          # 0 benign, 1 attack
    score: float        # attack-leaning score in [0, 1]

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ClassifyError(f"label must be 0 or 1, got {self.label}")
        if not 0.0 <= self.score <= 1.0:
            raise ClassifyError(f"score must lie in [0, 1], got {self.score}")


def schema_fingerprint(feature_names) -> str:
    joined = "\x1f".join(feature_names)
    return hashlib.sha256(joined.encode("utf-8")).hexdigest()


def training_arrays(train: Table) -> tuple[np.ndarray, np.ndarray]:
    """Feature matrix and 0/1 integer labels; rejects non-binarized labels."""
    X = train.feature_matrix()
    y = train.labels()
    values = set(np.unique(y).tolist())
    if not values <= {0.0, 1.0}:
        raise ClassifyError(f"labels must be binarized to 0/1, found {sorted(values)}")
    if X.shape[1] == 0:
        raise ClassifyError("table has no feature columns")
    return X, y.astype(np.int64)


def check_manifest(model, t: Table) -> np.ndarray:
    """Validate the table against the model's manifest; return its feature matrix."""
    if t.feature_names != model.feature_names:
        raise ManifestMismatchError(
            f"feature columns {list(t.feature_names)} do not match the model's "
            f"manifest {list(model.feature_names)}")
    if schema_fingerprint(t.feature_names) != model.fingerprint:
        raise ManifestMismatchError("schema fingerprint mismatch")
    return t.feature_matrix()


def predict_arrays(model, t: Table) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise (labels, scores) for any trained model variant."""
    X = check_manifest(model, t)
    return model.decide(X)


def predict(model, t: Table) -> list[Prediction]:
    labels, scores = predict_arrays(model, t)
    return [Prediction(int(l), float(s)) for l, s in zip(labels, scores)]
