"""Leave-one-well-out comparison of the model families on a synthetic benchmark.

Takes a few minutes on one CPU. Run: python demos/03_compare_models.py
"""
from rocktype import FeatureSpec, assemble_matrix, evaluate_cv, gen_benchmark

frames = gen_benchmark(6, seed=7)
m = assemble_matrix(frames, FeatureSpec.parse("B+D+L"))
print(f"{len(m.wells)} wells, {len(m)} bins, {len(m.columns)} features")

configs = [
    ("majority", {}),
    ("logistic", {}),
    ("gbdt", {"n_trees": 100, "learning_rate": 0.05, "max_depth": 3,
              "subspace_share": 0.8, "subsample_rate": 0.55, "seed": 7}),
]
print(f"{'model':<10}{'AccL':>8}{'ROC AUC':>10}{'PR AUC':>9}")
for family, params in configs:
    p = evaluate_cv(m, family, params).pooled
    print(f"{family:<10}{p['accuracy_l']:>8.3f}{p['roc_auc']:>10.3f}{p['pr_auc']:>9.3f}")
