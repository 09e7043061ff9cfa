"""Classifiers behind one contract: fit on a FeatureMatrix, predict P(class 1)."""

from ..core import ConfigError
from .base import MajorityModel, PriorModel, fit_majority, fit_prior, load_model, save_model
from .gbdt import DecisionTree, GbdtModel, GbdtParams, fit_gbdt
from .logistic import LogisticModel, fit_logistic
from .mlp import MlpModel, fit_mlp

FAMILIES = ("majority", "prior", "logistic", "gbdt", "mlp")


def fit_model(family, matrix, params=None):
    """Dispatch to the fitter for ``family`` with keyword ``params``."""
    params = dict(params or {})
    if family == "majority":
        return fit_majority(matrix)
    if family == "prior":
        return fit_prior(matrix)
    if family == "logistic":
        return fit_logistic(matrix, **params)
    if family == "gbdt":
        return fit_gbdt(matrix, GbdtParams(**params))
    if family == "mlp":
        if "hidden" in params:
            params["hidden"] = tuple(params["hidden"])
        return fit_mlp(matrix, **params)
    raise ConfigError(f"unknown model family {family!r}; expected one of {FAMILIES}")


def predict_proba(model, data):
    """Per-row probability of shale / hard rock."""
    return model.predict_proba(data)


__all__ = [
    "FAMILIES", "DecisionTree", "GbdtModel", "GbdtParams", "LogisticModel", "MajorityModel",
    "MlpModel", "PriorModel", "fit_gbdt", "fit_logistic", "fit_majority", "fit_mlp", "fit_model",
    "fit_prior",
    "load_model", "predict_proba", "save_model",
]
