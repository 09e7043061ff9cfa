"""Quality metrics and the leave-one-well-out experimental protocol."""

from __future__ import annotations

import csv
import itertools
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .core import DataError, LabeledBins, TrainingError
from .models import fit_model

log = logging.getLogger(__name__)

GREEDY_TOL = 1e-4


# ---------------------------------------------------------------- metrics

@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class CurvePoint:
    threshold: float
    tpr: float
    fpr: float
    precision: float
    recall: float


def confusion_counts(y, scores, threshold=0.5):
    y = np.asarray(y).astype(bool)
    pred = np.asarray(scores, dtype=float) >= threshold
    return ConfusionCounts(int(np.sum(pred & y)), int(np.sum(pred & ~y)),
                           int(np.sum(~pred & ~y)), int(np.sum(~pred & y)))


def _sweep(y, scores):
    """Cumulative (tp, fp) counts after each distinct score, highest first."""
    y = np.asarray(y).astype(np.int64)
    s = np.asarray(scores, dtype=float)
    if y.shape != s.shape:
        raise ValueError("y and scores must have the same shape")
    order = np.argsort(-s, kind="mergesort")
    s, y = s[order], y[order]
    last = np.r_[np.flatnonzero(np.diff(s) != 0), len(s) - 1]
    tp = np.cumsum(y)[last]
    fp = (last + 1) - tp
    return s[last], tp, fp


def roc_curve(y, scores):
    """Thresholds (descending, led by +inf), FPR and TPR of the score sweep."""
    thr, tp, fp = _sweep(y, scores)
    P, N = tp[-1], fp[-1]
    if P == 0 or N == 0:
        raise ValueError("ROC curve needs both classes present")
    return np.r_[np.inf, thr], np.r_[0.0, fp / N], np.r_[0.0, tp / P]


def roc_auc(y, scores):
    """Area under the ROC curve by trapezoidal integration over grouped ties.

    The area is accumulated in integer half-units, so the result equals the
    pairwise (Mann-Whitney, half credit for ties) estimate exactly.
    """
    _, tp, fp = _sweep(y, scores)
    if len(tp) == 0 or tp[-1] == 0 or fp[-1] == 0:
        raise ValueError("ROC AUC needs both classes present")
    tp0 = np.r_[0, tp[:-1]]
    fp0 = np.r_[0, fp[:-1]]
    twice_area = int(np.sum((fp - fp0) * (tp + tp0)))
    return twice_area / (2 * int(tp[-1]) * int(fp[-1]))


def pr_curve(y, scores):
    """Thresholds (descending), recall and precision of the score sweep."""
    thr, tp, fp = _sweep(y, scores)
    if len(tp) == 0 or tp[-1] == 0:
        raise ValueError("PR curve needs at least one positive")
    return thr, tp / tp[-1], tp / (tp + fp)


def pr_auc(y, scores):
    """Average precision: sum of recall increments times precision."""
    _, recall, precision = pr_curve(y, scores)
    return float(np.sum(np.diff(np.r_[0.0, recall]) * precision))


def curve_points(y, scores):
    thr, tp, fp = _sweep(y, scores)
    P, N = tp[-1], fp[-1]
    return [CurvePoint(float(t), float(a / P) if P else 0.0, float(b / N) if N else 0.0,
                       float(a / (a + b)), float(a / P) if P else 0.0)
            for t, a, b in zip(thr, tp, fp)]


def accuracy_l(bins, threshold=0.5):
    """Length-weighted accuracy of thresholded scores."""
    if not isinstance(bins, LabeledBins):
        bins = LabeledBins(*bins)
    if len(bins) == 0:
        raise ValueError("accuracy_l of an empty set")
    pred = (bins.scores >= threshold).astype(np.int64)
    correct = bins.lengths[pred == bins.y].sum()
    return float(correct / bins.lengths.sum())


# ---------------------------------------------------------------- folds

@dataclass(frozen=True)
class Fold:
    train_wells: tuple
    test_well: str


def lowo_folds(matrix):
    """One fold per well; laterals of a well always move together."""
    ids = matrix.well_id if hasattr(matrix, "well_id") else matrix
    wells = sorted(set(np.asarray(ids, dtype=object).tolist()))
    if len(wells) < 2:
        raise DataError(f"leave-one-well-out needs at least 2 wells, got {len(wells)}")
    return [Fold(tuple(w for w in wells if w != test), test) for test in wells]


# ---------------------------------------------------------------- cross-validation

@dataclass
class EvaluationReport:
    family: str
    params: dict
    columns: list
    folds: list
    pooled: dict
    shale_share: float
    runtime: float = 0.0
    curves: dict = field(default_factory=dict)
    selection: dict = None
    grid: list = None

    def to_dict(self):
        d = {"family": self.family, "params": self.params, "columns": self.columns,
             "folds": self.folds, "pooled": self.pooled, "shale_share": self.shale_share}
        if self.selection is not None:
            d["selection"] = self.selection
        if self.grid is not None:
            d["grid"] = self.grid
        return d

    def write(self, out_dir, extra=None, timestamp=None):
        """Write report.json, roc.csv, pr.csv and wells.csv into ``out_dir``."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        d = self.to_dict()
        if extra:
            d.update(extra)
        if timestamp is not None:
            d["timestamp"] = timestamp
        (out / "report.json").write_text(json.dumps(d, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        with open(out / "roc.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["threshold", "fpr", "tpr"])
            for t, a, b in zip(*self.curves.get("roc", ([], [], []))):
                w.writerow([repr(float(t)), repr(float(a)), repr(float(b))])
        with open(out / "pr.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["threshold", "recall", "precision"])
            for t, r, p in zip(*self.curves.get("pr", ([], [], []))):
                w.writerow([repr(float(t)), repr(float(r)), repr(float(p))])
        with open(out / "wells.csv", "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well_id", "shale_share", "accl_model", "accl_major", "improvement"])
            for f in self.folds:
                if f["flagged"]:
                    continue
                w.writerow([f["test_well"], repr(f["shale_share"]), repr(f["accuracy_l"]),
                            repr(f["accuracy_l_major"]), repr(f["accuracy_l"] - f["accuracy_l_major"])])
        return out / "report.json"


def _safe_metric(fn, y, s):
    try:
        return fn(y, s)
    except ValueError:
        return None


def _fit_and_score(family, params, train, test):
    try:
        model = fit_model(family, train, params)
    except TrainingError as exc:
        return None, str(exc)
    return model.predict_proba(test), None


def evaluate_cv(matrix, family, params=None, folds=None, jobs=1, threshold=0.5):
    """Leave-one-well-out evaluation of one model configuration.

    Each fold is fit on its training wells and scored on the held-out well.
    Pooled metrics are computed on the concatenated test predictions of all
    folds that could be trained. Rows are put in canonical
    (well, hole, depth) order first, so the result does not depend on the
    incoming row order.

    Returns
    -------
    EvaluationReport
    """
    t0 = time.perf_counter()
    params = dict(params or {})
    matrix = matrix.sorted()
    folds = lowo_folds(matrix) if folds is None else list(folds)
    tasks = []
    for fold in folds:
        if fold.test_well in fold.train_wells:
            raise DataError(f"fold for {fold.test_well} trains on its own test well")
        train = matrix.rows(np.isin(matrix.well_id, list(fold.train_wells)))
        test = matrix.rows(matrix.well_id == fold.test_well)
        tasks.append((family, params, train, test))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_fit_and_score, *zip(*tasks)))
    else:
        results = [_fit_and_score(*t) for t in tasks]

    fold_rows = []
    ys, ss, ls, ms = [], [], [], []
    for fold, (_, _, train, test), (scores, err) in zip(folds, tasks, results):
        row = {"test_well": fold.test_well, "n_test": len(test), "flagged": err is not None}
        row["shale_share"] = float(test.target.mean()) if len(test) else None
        if err is not None:
            row["error"] = err
            log.warning("fold %s excluded: %s", fold.test_well, err)
            fold_rows.append(row)
            continue
        if len(test) == 0:
            row["flagged"] = True
            row["error"] = "no labeled rows in test well"
            fold_rows.append(row)
            continue
        major = float(train.target.mean() > 0.5)
        row.update({
            "roc_auc": _safe_metric(roc_auc, test.target, scores),
            "pr_auc": _safe_metric(pr_auc, test.target, scores),
            "accuracy_l": accuracy_l(LabeledBins(test.row_lengths, test.target, scores), threshold),
            "accuracy_l_major": accuracy_l(LabeledBins(test.row_lengths, test.target,
                                                       np.full(len(test), major)), threshold),
        })
        fold_rows.append(row)
        ys.append(test.target)
        ss.append(scores)
        ls.append(test.row_lengths)
        ms.append(np.full(len(test), major))
    if not ys:
        raise TrainingError("every fold failed to train")
    y = np.concatenate(ys)
    s = np.concatenate(ss)
    lengths = np.concatenate(ls)
    pooled = {
        "roc_auc": _safe_metric(roc_auc, y, s),
        "pr_auc": _safe_metric(pr_auc, y, s),
        "accuracy_l": accuracy_l(LabeledBins(lengths, y, s), threshold),
        "accuracy_l_major": accuracy_l(LabeledBins(lengths, y, np.concatenate(ms)), threshold),
        "n_rows": int(len(y)),
        "n_folds": int(sum(not f["flagged"] for f in fold_rows)),
    }
    pooled["confusion"] = confusion_counts(y, s, threshold).__dict__
    means = {k: [f[k] for f in fold_rows if not f["flagged"] and f.get(k) is not None]
             for k in ("roc_auc", "pr_auc", "accuracy_l")}
    pooled["fold_mean"] = {k: (float(np.mean(v)) if v else None) for k, v in means.items()}
    curves = {}
    try:
        curves["roc"] = roc_curve(y, s)
        curves["pr"] = pr_curve(y, s)
    except ValueError:
        pass
    return EvaluationReport(family, params, list(matrix.columns), fold_rows, pooled,
                            float(y.mean()), time.perf_counter() - t0, curves)


# ---------------------------------------------------------------- selection / tuning

@dataclass
class SelectionResult:
    selected: list
    trace: list  # [{"feature": name, "roc_auc": score}, ...]
    baseline: float

    def to_dict(self):
        return {"selected": self.selected, "trace": self.trace, "baseline": self.baseline}


def greedy_select(matrix, pool, family, params=None, folds=None, tol=GREEDY_TOL, jobs=1,
                  max_features=None):
    """Forward selection from the empty set by pooled LOWO-CV ROC AUC.

    Adds the candidate with the best score at each step (first in pool
    order on ties) and stops once the best improvement is below ``tol``
    or the pool is exhausted. The empty set scores as the constant
    majority predictor.
    """
    pool = list(dict.fromkeys(pool))
    if not pool:
        raise ValueError("candidate pool is empty")
    folds = lowo_folds(matrix) if folds is None else folds
    baseline = evaluate_cv(matrix.select([]), "majority", {}, folds).pooled["roc_auc"]
    current = baseline
    selected, trace = [], []
    remaining = list(pool)
    while remaining and (max_features is None or len(selected) < max_features):
        scores = []
        for cand in remaining:
            rep = evaluate_cv(matrix.select(selected + [cand]), family, params, folds, jobs)
            auc = rep.pooled["roc_auc"]
            scores.append(-np.inf if auc is None else auc)
            log.info("greedy step %d: %s -> %.5f", len(selected) + 1, cand, scores[-1])
        best = int(np.argmax(scores))
        if scores[best] - current < tol:
            break
        current = scores[best]
        selected.append(remaining.pop(best))
        trace.append({"feature": selected[-1], "roc_auc": current})
    return SelectionResult(selected, trace, baseline)


def _tie_key(params):
    return (params.get("n_trees", 0), params.get("max_depth", 0))


def grid_search(matrix, family, grid, folds=None, base_params=None, jobs=1):
    """Exhaustive LOWO-CV over ``grid`` (name -> list of values).

    The best point maximizes pooled ROC AUC; ties prefer fewer trees, then
    smaller depth, then earlier grid order.

    Returns
    -------
    best : dict
    table : list of dict
        One entry per grid point with its params and pooled metrics.
    """
    names = list(grid)
    if not names or any(len(grid[n]) == 0 for n in names):
        raise ValueError("grid must be non-empty")
    folds = lowo_folds(matrix) if folds is None else folds
    table = []
    for values in itertools.product(*(grid[n] for n in names)):
        p = {**(base_params or {}), **dict(zip(names, values))}
        rep = evaluate_cv(matrix, family, p, folds, jobs)
        table.append({"params": p, **{k: rep.pooled[k] for k in ("roc_auc", "pr_auc", "accuracy_l")}})
    best = None
    for row in table:
        auc = -np.inf if row["roc_auc"] is None else row["roc_auc"]
        if best is None:
            best = (auc, row)
            continue
        b_auc = best[0]
        if auc > b_auc or (auc == b_auc and _tie_key(row["params"]) < _tie_key(best[1]["params"])):
            best = (auc, row)
    return dict(best[1]["params"]), table
