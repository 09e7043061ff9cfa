"""Gradient boosting on decision trees for the logistic loss.

Each stage fits a regression tree to the gradient / hessian of the current
ensemble on a row subsample and a feature subsample. Splits maximize the
second-order gain ``GL^2/HL + GR^2/HR - G^2/H`` over histogram thresholds;
leaves take the Newton value ``-G/H``. Rows with a missing feature follow
the default branch learned at each split.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ..core import ConfigError
from .base import design, log_loss, sigmoid, training_arrays

GAIN_EPS = 1e-12


@dataclass(frozen=True)
class GbdtParams:
    learning_rate: float = 0.1
    n_trees: int = 100
    max_depth: int = 3
    subspace_share: float = 1.0
    subsample_rate: float = 1.0
    min_leaf: int = 20
    class_weighting: bool = False
    seed: int = 0
    max_bins: int = 255

    def __post_init__(self):
        problems = []
        if not self.learning_rate > 0:
            problems.append("learning_rate must be > 0")
        if self.n_trees < 0:
            problems.append("n_trees must be >= 0")
        if self.max_depth < 1:
            problems.append("max_depth must be >= 1")
        if not 0 < self.subspace_share <= 1:
            problems.append("subspace_share must be in (0, 1]")
        if not 0 < self.subsample_rate <= 1:
            problems.append("subsample_rate must be in (0, 1]")
        if self.min_leaf < 1:
            problems.append("min_leaf must be >= 1")
        if not 2 <= self.max_bins <= 65000:
            problems.append("max_bins must be in [2, 65000]")
        if problems:
            raise ConfigError("invalid boosting parameters: " + "; ".join(problems))

    def to_dict(self):
        return asdict(self)


class DecisionTree:
    """Array-encoded binary tree. Node 0 is the root; ``feature == -1`` marks a leaf."""

    def __init__(self, feature, threshold, left, right, default_left, value):
        self.feature = np.asarray(feature, dtype=np.int64)
        self.threshold = np.asarray(threshold, dtype=float)
        self.left = np.asarray(left, dtype=np.int64)
        self.right = np.asarray(right, dtype=np.int64)
        self.default_left = np.asarray(default_left, dtype=bool)
        self.value = np.asarray(value, dtype=float)

    @property
    def n_nodes(self):
        return len(self.feature)

    @property
    def depth(self):
        d = np.zeros(self.n_nodes, dtype=np.int64)
        for i in range(self.n_nodes):
            if self.feature[i] >= 0:
                d[self.left[i]] = d[self.right[i]] = d[i] + 1
        return int(d.max())

    def apply(self, X):
        node = np.zeros(len(X), dtype=np.int64)
        rows = np.arange(len(X))
        while True:
            f = self.feature[node]
            internal = f >= 0
            if not internal.any():
                return node
            x = X[rows, np.maximum(f, 0)]
            go_left = np.where(np.isnan(x), self.default_left[node], x <= self.threshold[node])
            node = np.where(internal, np.where(go_left, self.left[node], self.right[node]), node)

    def predict(self, X):
        return self.value[self.apply(X)]


class _Binner:
    """Per-feature split thresholds and integer codes; missing gets the last code."""

    def __init__(self, X, max_bins):
        self.thresholds = []
        for j in range(X.shape[1]):
            x = X[:, j]
            u = np.unique(x[~np.isnan(x)])
            if len(u) <= max_bins:
                t = (u[:-1] + u[1:]) / 2.0
            else:
                q = np.quantile(u, np.linspace(0, 1, max_bins + 1)[1:-1], method="lower")
                t = np.unique(q)
            self.thresholds.append(t)
        self.n_thr = np.array([len(t) for t in self.thresholds], dtype=np.int64)
        self.n_codes = int(self.n_thr.max(initial=0)) + 2
        self.missing_code = self.n_codes - 1

    def codes(self, X):
        C = np.empty(X.shape, dtype=np.int32)
        for j, t in enumerate(self.thresholds):
            x = X[:, j]
            c = np.searchsorted(t, x, side="left")
            c[np.isnan(x)] = self.missing_code
            C[:, j] = c
        return C


def _grow_tree(C, g, h, rows, feats, binner, params):
    feature, threshold, left, right, default_left, value = [], [], [], [], [], []
    nb = binner.n_codes
    mc = binner.missing_code
    n_thr = binner.n_thr[feats]
    valid_thr = np.arange(nb - 1)[None, :] < n_thr[:, None]

    def new_node():
        for lst, v in ((feature, -1), (threshold, np.nan), (left, -1), (right, -1),
                       (default_left, True), (value, 0.0)):
            lst.append(v)
        return len(feature) - 1

    def build(node, idx, depth):
        G, H = g[idx].sum(), h[idx].sum()
        value[node] = -G / H if H > 0 else 0.0
        if depth >= params.max_depth or len(idx) < 2 * params.min_leaf or len(feats) == 0:
            return
        Cn = C[np.ix_(idx, feats)]
        k = len(feats)
        flat = (Cn + (np.arange(k) * nb)[None, :]).ravel()
        size = k * nb
        hg = np.bincount(flat, weights=np.repeat(g[idx], k), minlength=size).reshape(k, nb)
        hh = np.bincount(flat, weights=np.repeat(h[idx], k), minlength=size).reshape(k, nb)
        hc = np.bincount(flat, minlength=size).reshape(k, nb)
        mg, mh, mcnt = hg[:, mc], hh[:, mc], hc[:, mc]
        cg = np.cumsum(hg[:, :nb - 1], axis=1)
        ch = np.cumsum(hh[:, :nb - 1], axis=1)
        cc = np.cumsum(hc[:, :nb - 1], axis=1)
        tg, th, tc = cg[:, -1:], ch[:, -1:], cc[:, -1:]
        parent = G * G / H if H > 0 else 0.0
        best = (GAIN_EPS, None)
        with np.errstate(divide="ignore", invalid="ignore"):
            for miss_left in (True, False):
                gl = cg + (mg[:, None] if miss_left else 0.0)
                hl = ch + (mh[:, None] if miss_left else 0.0)
                nl = cc + (mcnt[:, None] if miss_left else 0)
                gr, hr, nr = G - gl, H - hl, len(idx) - nl
                ok = valid_thr & (nl >= params.min_leaf) & (nr >= params.min_leaf) & (hl > 0) & (hr > 0)
                if not miss_left:
                    # without missing rows both directions are the same split
                    ok &= (mcnt > 0)[:, None]
                gain = np.where(ok, gl * gl / hl + gr * gr / hr - parent, -np.inf)
                flat_best = int(np.argmax(gain))
                if gain.flat[flat_best] > best[0]:
                    fi, ti = divmod(flat_best, nb - 1)
                    best = (gain.flat[flat_best], (fi, ti, miss_left,
                                                   int(nl[fi, ti]), int(nr[fi, ti]), mcnt[fi] > 0))
        if best[1] is None:
            return
        fi, ti, miss_left, nl_best, nr_best, has_missing = best[1]
        f = feats[fi]
        codes = C[idx, f]
        nonmiss_left = codes <= ti
        is_miss = codes == mc
        go_left = np.where(is_miss, miss_left, nonmiss_left)
        feature[node] = int(f)
        threshold[node] = float(binner.thresholds[f][ti])
        default_left[node] = bool(miss_left) if has_missing else bool(nl_best >= nr_best)
        left[node] = new_node()
        right[node] = new_node()
        build(left[node], idx[go_left], depth + 1)
        build(right[node], idx[~go_left], depth + 1)

    build(new_node(), rows, 0)
    return DecisionTree(feature, threshold, left, right, default_left, value)


class GbdtModel:
    family = "gbdt"

    def __init__(self, columns, init_score, trees, params, train_loss=()):
        self.columns = list(columns)
        self.init_score = float(init_score)
        self.trees = list(trees)
        self.params = dict(params)
        self.train_loss = list(train_loss)

    @property
    def learning_rate(self):
        return self.params["learning_rate"]

    def decision_function(self, data):
        X = design(self.columns, data)
        score = np.full(len(X), self.init_score)
        for tree in self.trees:
            score += self.learning_rate * tree.predict(X)
        return score

    def predict_proba(self, data):
        return sigmoid(self.decision_function(data))

    def split_counts(self):
        """Number of splits per feature across the ensemble."""
        counts = np.zeros(len(self.columns), dtype=np.int64)
        for t in self.trees:
            f = t.feature[t.feature >= 0]
            np.add.at(counts, f, 1)
        return dict(zip(self.columns, counts.tolist()))

    def state(self):
        arrays = {}
        for i, t in enumerate(self.trees):
            for name in ("feature", "threshold", "left", "right", "default_left", "value"):
                arrays[f"tree{i:05d}/{name}"] = getattr(t, name)
        arrays["train_loss"] = np.asarray(self.train_loss, dtype=float)
        return {"init_score": self.init_score, "n_trees": len(self.trees)}, arrays

    @classmethod
    def from_state(cls, columns, params, meta, arrays):
        trees = []
        for i in range(meta["n_trees"]):
            p = f"tree{i:05d}/"
            trees.append(DecisionTree(*(arrays[p + n] for n in
                                        ("feature", "threshold", "left", "right", "default_left", "value"))))
        return cls(columns, meta["init_score"], trees, params, arrays["train_loss"].tolist())


def fit_gbdt(matrix, params=None, **overrides):
    """Fit a boosted tree ensemble on a FeatureMatrix.

    Parameters
    ----------
    matrix : FeatureMatrix
    params : GbdtParams or dict, optional
    **overrides
        Individual GbdtParams fields.

    Returns
    -------
    GbdtModel
        ``train_loss`` holds the (weighted) training log-loss after the
        initial score and after every stage.
    """
    if params is None:
        params = GbdtParams(**overrides)
    elif isinstance(params, dict):
        params = GbdtParams(**{**params, **overrides})
    elif overrides:
        params = GbdtParams(**{**params.to_dict(), **overrides})
    X, y = training_arrays(matrix)
    n, p = X.shape
    rng = np.random.default_rng(params.seed)
    prior = y.mean()
    init = float(np.log(prior / (1 - prior)))
    weights = np.ones(n)
    if params.class_weighting:
        n1 = y.sum()
        n0 = n - n1
        if n1 < n0:
            weights[y == 1] = n0 / n1
        elif n0 < n1:
            weights[y == 0] = n1 / n0
    binner = _Binner(X, params.max_bins)
    C = binner.codes(X)
    score = np.full(n, init)
    losses = [log_loss(y, sigmoid(score), weights)]
    trees = []
    n_rows = max(1, int(round(params.subsample_rate * n)))
    n_feats = max(1, int(round(params.subspace_share * p))) if p else 0
    for _ in range(params.n_trees):
        prob = sigmoid(score)
        g = weights * (prob - y)
        h = weights * prob * (1 - prob)
        rows = np.arange(n) if n_rows == n else np.sort(rng.choice(n, n_rows, replace=False))
        feats = np.arange(p) if n_feats == p else np.sort(rng.choice(p, n_feats, replace=False))
        tree = _grow_tree(C, g, h, rows, feats, binner, params)
        trees.append(tree)
        score = score + params.learning_rate * tree.predict(X)
        losses.append(log_loss(y, sigmoid(score), weights))
    return GbdtModel(matrix.columns, init, trees, params.to_dict(), losses)
