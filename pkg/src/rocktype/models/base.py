"""Shared pieces for the classifiers: schema checks, imputation, scaling, persistence."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .. import _io
from ..core import ConfigError, TrainingError

PROBA_CLIP = 1e-12


def sigmoid(z):
    z = np.asarray(z, dtype=float)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(y, p, weights=None):
    """Mean negative log-likelihood; probabilities are clipped to [1e-12, 1-1e-12]."""
    p = np.clip(p, PROBA_CLIP, 1 - PROBA_CLIP)
    losses = -(y * np.log(p) + (1 - y) * np.log1p(-p))
    if weights is None:
        return float(losses.mean())
    return float((weights * losses).sum() / len(y))


def training_arrays(matrix):
    """(X, y) from a FeatureMatrix, checking both classes are present."""
    y = np.asarray(matrix.target, dtype=float)
    if len(y) == 0 or y.min() == y.max():
        raise TrainingError("training data must contain both classes")
    return np.asarray(matrix.X, dtype=float), y


def design(model_columns, data):
    """Return the feature array of ``data`` ordered like ``model_columns``.

    ``data`` is a FeatureMatrix (checked by column name) or a bare array
    (checked by width only).
    """
    if hasattr(data, "columns"):
        cols = list(data.columns)
        missing = [c for c in model_columns if c not in cols]
        extra = [c for c in cols if c not in model_columns]
        if missing or extra:
            raise ConfigError(f"feature schema mismatch; missing columns: {missing}, extra columns: {extra}")
        X = np.asarray(data.X, dtype=float)
        if cols != list(model_columns):
            X = X[:, [cols.index(c) for c in model_columns]]
        return X
    X = np.asarray(data, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.shape[1] != len(model_columns):
        raise ConfigError(f"expected {len(model_columns)} feature columns, got {X.shape[1]}")
    return X


class Preprocessor:
    """Mean imputation with missing-indicator columns, then standardization.

    Indicator columns are added for every feature that had a missing value
    in the training rows.
    """

    def __init__(self, fill=None, indicator=None, mean=None, scale=None):
        self.fill = fill
        self.indicator = indicator
        self.mean = mean
        self.scale = scale

    def fit(self, X):
        X = np.asarray(X, dtype=float)
        miss = np.isnan(X)
        counts = (~miss).sum(axis=0)
        sums = np.where(miss, 0.0, X).sum(axis=0)
        self.fill = np.where(counts > 0, sums / np.maximum(counts, 1), 0.0)
        self.indicator = np.flatnonzero(miss.any(axis=0)).astype(np.int64)
        Z = self._impute(X)
        self.mean = Z.mean(axis=0) if len(Z) else np.zeros(Z.shape[1])
        sd = Z.std(axis=0) if len(Z) else np.ones(Z.shape[1])
        self.scale = np.where(sd > 0, sd, 1.0)
        return self

    def _impute(self, X):
        miss = np.isnan(X)
        Z = np.where(miss, self.fill, X)
        return np.hstack([Z, miss[:, self.indicator].astype(float)])

    def transform(self, X):
        return (self._impute(np.asarray(X, dtype=float)) - self.mean) / self.scale

    @property
    def n_out(self):
        return len(self.mean)

    def state(self, prefix="pre"):
        return {f"{prefix}/fill": self.fill, f"{prefix}/indicator": self.indicator,
                f"{prefix}/mean": self.mean, f"{prefix}/scale": self.scale}

    @classmethod
    def from_state(cls, arrays, prefix="pre"):
        return cls(arrays[f"{prefix}/fill"], arrays[f"{prefix}/indicator"],
                   arrays[f"{prefix}/mean"], arrays[f"{prefix}/scale"])


class PriorModel:
    """Constant predictor returning the training share of class 1."""

    family = "prior"

    def __init__(self, columns, prior):
        self.columns = list(columns)
        self.prior = float(prior)
        self.params = {}

    def predict_proba(self, data):
        X = design(self.columns, data)
        return np.full(len(X), self.prior)

    def state(self):
        return {"prior": self.prior}, {}

    @classmethod
    def from_state(cls, columns, params, meta, arrays):
        return cls(columns, meta["prior"])


def fit_prior(matrix):
    _, y = training_arrays(matrix)
    return PriorModel(matrix.columns, y.mean())


class MajorityModel(PriorModel):
    """Always predicts the training majority class (score 0 or 1)."""

    family = "majority"


def fit_majority(matrix):
    y = np.asarray(matrix.target, dtype=float)
    if len(y) == 0:
        raise TrainingError("no training rows")
    return MajorityModel(matrix.columns, float(y.mean() > 0.5))


# ---------------------------------------------------------------- persistence

def _registry():
    from .gbdt import GbdtModel
    from .logistic import LogisticModel
    from .mlp import MlpModel
    return {"prior": PriorModel, "majority": MajorityModel, "logistic": LogisticModel, "gbdt": GbdtModel, "mlp": MlpModel}


def save_model(model, path):
    """Write ``path`` (JSON header) and a sibling ``.bin`` weight blob."""
    path = Path(path)
    meta, arrays = model.state()
    table, blob = _io.array_table(arrays)
    blob_path = path.with_suffix(".bin")
    header = {"format": "rocktype-model/1", "family": model.family, "columns": list(model.columns),
              "params": model.params, "meta": meta, "arrays": table, "blob": blob_path.name,
              "blob_sha256": _io.digest_bytes(blob)}
    blob_path.write_bytes(blob)
    path.write_text(json.dumps(header, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_model(path):
    path = Path(path)
    header = json.loads(path.read_text(encoding="utf-8"))
    blob = (path.parent / header["blob"]).read_bytes()
    if _io.digest_bytes(blob) != header["blob_sha256"]:
        raise ValueError(f"{path}: weight blob digest mismatch")
    arrays = _io.arrays_from_table(header["arrays"], blob)
    cls = _registry()[header["family"]]
    return cls.from_state(header["columns"], header["params"], header["meta"], arrays)
