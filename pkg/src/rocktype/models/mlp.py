"""Feed-forward network: ReLU hidden layers, sigmoid output, SGD with momentum."""

from __future__ import annotations

import numpy as np

from ..core import TrainingError
from .base import Preprocessor, design, log_loss, sigmoid, training_arrays


def init_params(sizes, rng, zero_output=False):
    """Uniform symmetric init: He scale on ReLU layers, Glorot on the output layer."""
    params = []
    for i, (fan_in, fan_out) in enumerate(zip(sizes[:-1], sizes[1:])):
        last = i == len(sizes) - 2
        s = np.sqrt(6.0 / (fan_in + fan_out)) if last else np.sqrt(6.0 / fan_in)
        W = rng.uniform(-s, s, size=(fan_in, fan_out))
        if last and zero_output:
            W[:] = 0.0
        params.append((W, np.zeros(fan_out)))
    return params


def forward(params, X):
    """Return (output logits, cached activations per layer)."""
    acts = [X]
    a = X
    for W, b in params[:-1]:
        a = np.maximum(a @ W + b, 0.0)
        acts.append(a)
    W, b = params[-1]
    return (a @ W + b)[:, 0], acts


def loss_and_grad(params, X, y):
    """Mean log-loss and its gradient with respect to every (W, b)."""
    z, acts = forward(params, X)
    n = len(y)
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    delta = ((sigmoid(z) - y) / n)[:, None]
    grads = [None] * len(params)
    for i in range(len(params) - 1, -1, -1):
        W, _ = params[i]
        grads[i] = (acts[i].T @ delta, delta.sum(axis=0))
        if i:
            delta = (delta @ W.T) * (acts[i] > 0)
    return loss, grads


class MlpModel:
    family = "mlp"

    def __init__(self, columns, layers, pre, params, loss_history=()):
        self.columns = list(columns)
        self.layers = [(np.asarray(W, float), np.asarray(b, float)) for W, b in layers]
        self.pre = pre
        self.params = dict(params)
        self.loss_history = list(loss_history)

    @property
    def sizes(self):
        return [self.layers[0][0].shape[0]] + [W.shape[1] for W, _ in self.layers]

    def predict_proba(self, data):
        z, _ = forward(self.layers, self.pre.transform(design(self.columns, data)))
        return sigmoid(z)

    def state(self):
        arrays = self.pre.state()
        for i, (W, b) in enumerate(self.layers):
            arrays[f"layer{i}/W"] = W
            arrays[f"layer{i}/b"] = b
        arrays["loss_history"] = np.asarray(self.loss_history, dtype=float)
        return {"n_layers": len(self.layers)}, arrays

    @classmethod
    def from_state(cls, columns, params, meta, arrays):
        layers = [(arrays[f"layer{i}/W"], arrays[f"layer{i}/b"]) for i in range(meta["n_layers"])]
        return cls(columns, layers, Preprocessor.from_state(arrays), params,
                   arrays["loss_history"].tolist())


def fit_mlp(matrix, hidden=(100, 500), epochs=200, batch_size=256, step_size=0.01,
            momentum=0.9, seed=0, zero_init_output=False):
    """Train a feed-forward classifier by mini-batch SGD with momentum.

    Inputs are mean-imputed (with missing indicators) and standardized as for
    logistic regression. Raises TrainingError if the loss becomes non-finite.
    """
    X, y = training_arrays(matrix)
    pre = Preprocessor().fit(X)
    Z = pre.transform(X)
    rng = np.random.default_rng(seed)
    sizes = [Z.shape[1], *hidden, 1]
    layers = init_params(sizes, rng, zero_init_output)
    velocity = [(np.zeros_like(W), np.zeros_like(b)) for W, b in layers]
    history = []
    n = len(y)
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(epochs):
            order = rng.permutation(n)
            for start in range(0, n, batch_size):
                idx = order[start:start + batch_size]
                loss, grads = loss_and_grad(layers, Z[idx], y[idx])
                if not np.isfinite(loss):
                    raise TrainingError("MLP loss became non-finite; try a smaller step_size")
                new_layers, new_vel = [], []
                for (W, b), (vW, vb), (gW, gb) in zip(layers, velocity, grads):
                    vW = momentum * vW - step_size * gW
                    vb = momentum * vb - step_size * gb
                    new_layers.append((W + vW, b + vb))
                    new_vel.append((vW, vb))
                layers, velocity = new_layers, new_vel
            z, _ = forward(layers, Z)
            epoch_loss = log_loss(y, sigmoid(z))
            if not np.isfinite(z).all():
                raise TrainingError("MLP diverged (non-finite outputs); try a smaller step_size")
            history.append(epoch_loss)
    params = {"hidden": list(hidden), "epochs": epochs, "batch_size": batch_size,
              "step_size": step_size, "momentum": momentum, "seed": seed,
              "zero_init_output": zero_init_output}
    return MlpModel(matrix.columns, layers, pre, params, history)
