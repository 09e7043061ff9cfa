import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rocktype.core import DataError, LabeledBins
from rocktype.evaluation import (Fold, accuracy_l, confusion_counts, curve_points, evaluate_cv,
                                 greedy_select, grid_search, lowo_folds, pr_auc, roc_auc, roc_curve)
from rocktype.features import FeatureSpec, assemble_matrix

from conftest import make_matrix


def brute_auc(y, s):
    y, s = np.asarray(y), np.asarray(s)
    pos, neg = s[y == 1], s[y == 0]
    wins = 2 * (pos[:, None] > neg[None, :]).sum() + (pos[:, None] == neg[None, :]).sum()
    return wins / (2 * len(pos) * len(neg))


labeled_scores = st.integers(2, 200).flatmap(lambda n: st.tuples(
    st.lists(st.integers(0, 1), min_size=n, max_size=n).filter(lambda y: 0 < sum(y) < len(y)),
    st.lists(st.sampled_from([0.0, 0.1, 0.25, 0.5, 0.7, 1.0]) | st.floats(0, 1), min_size=n, max_size=n)))


@given(labeled_scores)
@settings(max_examples=300, deadline=None)
def test_roc_matches_pairwise_oracle(data):
    y, s = data
    assert roc_auc(y, s) == brute_auc(y, s)


@given(labeled_scores)
@settings(max_examples=100, deadline=None)
def test_roc_monotone_invariance(data):
    y, s = data
    s = np.asarray(s)
    ranks = np.unique(s, return_inverse=True)[1]
    assert roc_auc(y, s) == roc_auc(y, 8.0 * s) == roc_auc(y, ranks ** 3 + 0.5)


@given(st.lists(st.integers(0, 1), min_size=1, max_size=200).filter(lambda y: sum(y) > 0),
       st.floats(0, 1))
@settings(max_examples=200, deadline=None)
def test_pr_constant_predictor_is_share(y, c):
    assert pr_auc(y, np.full(len(y), c)) == sum(y) / len(y)


def test_metric_examples():
    y, s = [0, 0, 1, 1], [0.1, 0.4, 0.35, 0.8]
    assert roc_auc(y, s) == 0.75
    assert pr_auc(y, s) == pytest.approx(0.5 + 0.5 * 2 / 3, abs=1e-15)
    assert roc_auc([0, 1], [0.2, 0.9]) == 1.0 and pr_auc([0, 1, 1], [0.1, 0.5, 0.9]) == 1.0
    assert roc_auc([0, 1, 0, 1], [0.3] * 4) == 0.5
    with pytest.raises(ValueError):
        roc_auc([1, 1], [0.1, 0.2])
    with pytest.raises(ValueError):
        pr_auc([0, 0], [0.1, 0.2])


def test_accuracy_l_examples():
    assert accuracy_l(LabeledBins([2.0, 1.0, 1.0], [1, 0, 1], [0.9, 0.8, 0.7])) == 0.75
    assert accuracy_l(LabeledBins([1.0, 1.0], [1, 0], [0.9, 0.1])) == 1.0
    n = 1000
    y = np.r_[np.zeros(865, int), np.ones(135, int)]
    assert accuracy_l(LabeledBins(np.full(n, 0.1), y, np.zeros(n))) == pytest.approx(0.865, abs=1e-12)
    with pytest.raises(ValueError):
        accuracy_l(LabeledBins([], [], []))


@given(labeled_scores)
@settings(max_examples=100, deadline=None)
def test_accuracy_l_equal_lengths_is_accuracy(data):
    y, s = map(np.asarray, data)
    acc = accuracy_l(LabeledBins(np.full(len(y), 0.1), y, s))
    assert acc == pytest.approx(np.mean((s >= 0.5) == y), abs=1e-12)


@given(labeled_scores)
@settings(max_examples=100, deadline=None)
def test_confusion_and_curves_consistent(data):
    y, s = data
    c = confusion_counts(y, s)
    assert c.total == len(y)
    for p in curve_points(y, s):
        assert 0 <= p.tpr <= 1 and 0 <= p.fpr <= 1 and 0 <= p.precision <= 1
    _, fpr, tpr = roc_curve(y, s)
    assert fpr[0] == tpr[0] == 0 and fpr[-1] == tpr[-1] == 1


# ---------------------------------------------------------------- folds and protocol

def test_lowo_folds():
    wells = ["A", "A", "B", "C", "C", "C"]
    folds = lowo_folds(wells)
    assert [f.test_well for f in folds] == ["A", "B", "C"]
    for f in folds:
        assert f.test_well not in f.train_wells
        assert set(f.train_wells) | {f.test_well} == {"A", "B", "C"}
    a, b = lowo_folds(["X", "Y"])
    assert a.train_wells == ("Y",) and b.train_wells == ("X",)
    with pytest.raises(DataError):
        lowo_folds(["X", "X"])


def test_laterals_share_a_fold(small_bench):
    import dataclasses
    frames = list(small_bench)
    frames.append(dataclasses.replace(frames[0], hole_id="H2"))
    m = assemble_matrix(frames, FeatureSpec.parse("B"))
    folds = lowo_folds(m)
    assert len(folds) == 4
    rep = evaluate_cv(m, "majority", {}, folds)
    counts = {f["test_well"]: f["n_test"] for f in rep.folds}
    assert counts["W01"] == 2 * int((~np.isnan(frames[0].labels)).sum())
    assert sum(counts.values()) == len(m)


def bench_matrix(small_bench, families="B"):
    return assemble_matrix(small_bench, FeatureSpec.parse(families))


def test_majority_baseline(small_bench):
    m = bench_matrix(small_bench)
    rep = evaluate_cv(m, "majority")
    assert rep.pooled["roc_auc"] == 0.5
    assert rep.pooled["accuracy_l"] == pytest.approx(1 - m.target.mean(), abs=1e-12)
    assert rep.pooled["accuracy_l"] == rep.pooled["accuracy_l_major"]


def test_prior_model_is_uninformative_per_fold(small_bench):
    # pooled, the per-fold priors are anti-correlated with the held-out share,
    # so only the per-fold scores are exactly at chance
    rep = evaluate_cv(bench_matrix(small_bench), "prior")
    assert all(f["roc_auc"] == 0.5 for f in rep.folds)


def test_oracle_feature_is_perfect(small_bench):
    m = bench_matrix(small_bench)
    m = m.select([]).with_column("oracle", m.target.astype(float))
    rep = evaluate_cv(m, "gbdt", {"n_trees": 3})
    assert rep.pooled["roc_auc"] == 1.0


def test_row_order_does_not_matter(small_bench):
    m = bench_matrix(small_bench)
    perm = np.random.default_rng(1).permutation(len(m))
    params = {"n_trees": 10, "subsample_rate": 0.5, "seed": 2}
    a = evaluate_cv(m, "gbdt", params).pooled
    b = evaluate_cv(m.rows(perm), "gbdt", params).pooled
    assert a == b


def test_parallel_matches_serial(small_bench):
    m = bench_matrix(small_bench)
    a = evaluate_cv(m, "gbdt", {"n_trees": 5}, jobs=1).pooled
    b = evaluate_cv(m, "gbdt", {"n_trees": 5}, jobs=2).pooled
    assert a == b


def test_single_class_fold_flagged():
    X = np.arange(12.0)
    y = np.array([0, 0, 0, 0, 1, 0, 1, 0, 0, 0, 0, 0])
    wells = ["A"] * 4 + ["B"] * 4 + ["C"] * 4
    m = make_matrix(X, y, wells)
    rep = evaluate_cv(m, "logistic")
    flagged = {f["test_well"]: f["flagged"] for f in rep.folds}
    assert flagged == {"A": False, "B": True, "C": False}
    assert "error" in rep.folds[1]
    assert rep.pooled["n_rows"] == 8


def test_report_files(tmp_path, small_bench):
    rep = evaluate_cv(bench_matrix(small_bench), "gbdt", {"n_trees": 5})
    rep.write(tmp_path, timestamp="t0")
    for name in ("report.json", "roc.csv", "pr.csv", "wells.csv"):
        assert (tmp_path / name).exists()
    data = json.loads((tmp_path / "report.json").read_text())
    assert data["timestamp"] == "t0"
    assert data["pooled"]["roc_auc"] == rep.pooled["roc_auc"]
    first = (tmp_path / "report.json").read_bytes()
    evaluate_cv(bench_matrix(small_bench), "gbdt", {"n_trees": 5}).write(tmp_path, timestamp="t0")
    assert (tmp_path / "report.json").read_bytes() == first


# ---------------------------------------------------------------- selection and grid

def test_greedy_oracle_first(small_bench):
    m = bench_matrix(small_bench)
    rng = np.random.default_rng(0)
    m = m.select(["B:ROP"]).with_column("noise", rng.standard_normal(len(m)))
    m = m.with_column("oracle", m.target.astype(float))
    res = greedy_select(m, ["noise", "B:ROP", "oracle"], "gbdt", {"n_trees": 5})
    assert res.baseline == 0.5
    assert res.selected[0] == "oracle" and res.trace[0]["roc_auc"] == 1.0
    assert res.selected == ["oracle"]


def test_greedy_identical_columns(small_bench):
    m = bench_matrix(small_bench).select(["B:TRQ"])
    for k in range(2):
        m = m.with_column(f"copy{k}", m.column("B:TRQ"))
    res = greedy_select(m, ["B:TRQ", "copy0", "copy1"], "gbdt", {"n_trees": 5})
    assert res.selected == ["B:TRQ"]


def test_grid_singleton_and_ties(small_bench):
    m = bench_matrix(small_bench)
    best, table = grid_search(m, "gbdt", {"n_trees": [5]})
    assert best["n_trees"] == 5 and len(table) == 1
    m0 = m.select([]).with_column("oracle", m.target.astype(float))
    best, table = grid_search(m0, "gbdt", {"n_trees": [7, 3, 3], "max_depth": [2, 1]})
    assert all(r["roc_auc"] == 1.0 for r in table)
    assert (best["n_trees"], best["max_depth"]) == (3, 1)
    with pytest.raises(ValueError):
        grid_search(m, "gbdt", {"n_trees": []})


def test_learning_rate_ordering(small_bench):
    m = bench_matrix(small_bench, "B+D")
    _, table = grid_search(m, "gbdt", {"learning_rate": [0.01, 0.1]}, base_params={"n_trees": 10})
    tiny, moderate = table
    assert tiny["accuracy_l"] < moderate["accuracy_l"]
    assert tiny["pr_auc"] <= moderate["pr_auc"] + 0.01
