import numpy as np
import pytest

from rocktype.core import CHANNELS, DepthGrid, WellFrame
from rocktype.features import FeatureMatrix
from rocktype.synth import SynthWellSpec, gen_benchmark


def make_frame(n=50, start=1000.0, well="W1", hole="H1", seed=0, labels=None, area=0.05):
    rng = np.random.default_rng(seed)
    chans = {c: rng.uniform(1.0, 10.0, n) for c in CHANNELS}
    stds = {c: rng.uniform(0.0, 1.0, n) for c in CHANNELS}
    if labels is None:
        labels = (rng.random(n) < 0.3).astype(float)
    return WellFrame(well, hole, DepthGrid(start, n), chans, stds, np.asarray(labels, float), area)


def make_matrix(X, y, wells=None, columns=None):
    X = np.asarray(X, float)
    if X.ndim == 1:
        X = X[:, None]
    n = len(y)
    if wells is None:
        wells = ["W1"] * n
    columns = columns or [f"x{j}" for j in range(X.shape[1])]
    return FeatureMatrix(columns, X, np.asarray(y), wells, ["H1"] * n, np.arange(n) * 0.1)


@pytest.fixture(scope="session")
def small_bench():
    """Four short synthetic wells; cheap enough for unit tests."""
    return gen_benchmark(4, SynthWellSpec(n_bins=400, missing_rate=0.02), seed=11)


ACCEPTANCE = {}
"""criterion number -> (passed, message); filled by test_acceptance.py"""


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, msg = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k}: {msg}")
