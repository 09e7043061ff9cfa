"""Greedy forward feature selection with a small boosted-tree model.

Run: python demos/04_greedy_selection.py
"""
from rocktype import FeatureSpec, assemble_matrix, gen_benchmark, greedy_select

frames = gen_benchmark(4, seed=5)
m = assemble_matrix(frames, FeatureSpec.parse("B+D"))
pool = [c for c in m.columns if c.startswith(("B:", "D:ROP", "D:APR"))][:8]
res = greedy_select(m, pool, "gbdt", {"n_trees": 20, "learning_rate": 0.1, "max_depth": 3, "seed": 0},
                    max_features=3)
print(f"no-feature baseline ROC AUC {res.baseline:.3f}")
for step in res.trace:
    print(f"  + {step['feature']:<20} ROC AUC {step['roc_auc']:.3f}")
print("selected:", res.selected)
