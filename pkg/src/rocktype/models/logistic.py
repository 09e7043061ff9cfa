"""L2-penalized logistic regression fitted by full-batch gradient descent."""

from __future__ import annotations

import logging

import numpy as np

from .base import Preprocessor, design, sigmoid, training_arrays

log = logging.getLogger(__name__)


class LogisticModel:
    family = "logistic"

    def __init__(self, columns, weights, bias, pre, params, n_iter=0, converged=False):
        self.columns = list(columns)
        self.weights = np.asarray(weights, dtype=float)
        self.bias = float(bias)
        self.pre = pre
        self.params = dict(params)
        self.n_iter = n_iter
        self.converged = converged

    def decision_function(self, data):
        Z = self.pre.transform(design(self.columns, data))
        return Z @ self.weights + self.bias

    def predict_proba(self, data):
        return sigmoid(self.decision_function(data))

    def state(self):
        arrays = self.pre.state()
        arrays["weights"] = self.weights
        return {"bias": self.bias, "n_iter": self.n_iter, "converged": self.converged}, arrays

    @classmethod
    def from_state(cls, columns, params, meta, arrays):
        return cls(columns, arrays["weights"], meta["bias"], Preprocessor.from_state(arrays), params,
                   meta["n_iter"], meta["converged"])


def _objective(Z, y, theta, l2):
    eta = Z @ theta[:-1] + theta[-1]
    w = theta[:-1]
    return float(np.mean(np.logaddexp(0.0, eta) - y * eta) + 0.5 * l2 * w @ w)


def _gradient(Z, y, theta, l2):
    r = sigmoid(Z @ theta[:-1] + theta[-1]) - y
    g = np.empty_like(theta)
    g[:-1] = Z.T @ r / len(y) + l2 * theta[:-1]
    g[-1] = r.mean()
    return g


def fit_logistic(matrix, l2_penalty=0.0, max_iter=10000, tol=1e-6):
    """Maximum-likelihood logistic regression.

    Minimizes mean negative log-likelihood plus ``l2_penalty * |w|^2 / 2``
    (bias unpenalized) by gradient descent with Armijo backtracking; each
    line search starts from the Barzilai-Borwein step. Stops
    when the gradient max-norm drops below ``tol`` or after ``max_iter``
    iterations. Missing values are mean-imputed with indicator columns and
    all inputs are standardized on the training rows.
    """
    if l2_penalty < 0:
        raise ValueError("l2_penalty must be non-negative")
    X, y = training_arrays(matrix)
    pre = Preprocessor().fit(X)
    Z = pre.transform(X)
    theta = np.zeros(Z.shape[1] + 1)
    f = _objective(Z, y, theta, l2_penalty)
    step = 1.0
    converged = False
    it = 0
    prev = None
    for it in range(1, max_iter + 1):
        g = _gradient(Z, y, theta, l2_penalty)
        if np.max(np.abs(g)) < tol:
            converged = True
            break
        gg = g @ g
        if prev is not None:
            s, dg = theta - prev[0], g - prev[1]
            sy = s @ dg
            step = min(s @ s / sy, 1e6) if sy > 0 else min(step * 2.0, 1e6)
        prev = (theta, g)
        while True:
            cand = theta - step * g
            fc = _objective(Z, y, cand, l2_penalty)
            if fc <= f - 0.5 * step * gg or step < 1e-14:
                break
            step *= 0.5
        if fc > f:
            # no descent left at machine precision
            break
        theta, f = cand, fc
    if not converged:
        log.debug("logistic regression stopped after %d iterations without reaching tol", it)
    params = {"l2_penalty": l2_penalty, "max_iter": max_iter, "tol": tol}
    return LogisticModel(matrix.columns, theta[:-1], theta[-1], pre, params, it, converged)
