"""Feature engineering on depth-gridded telemetry.

Column names carry their family tag as a prefix, e.g. ``B:ROP``,
``D:WOB_diff_1m``, ``L:TRQ_lag_0.5m``, ``F:ROP_fluct``,
``E:label_lag_20m``, ``M:b1``, ``FM:b1_std_1m``. Every window is trailing,
so a feature at depth ``d`` only sees data at depths ``<= d``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .core import BIN_SIZE, CHANNELS, ChannelId, ConfigError

EPS = 1e-9
COND_LIMIT = 1e12
MIN_EXTRA_LAG = 15.0
"""LWD sensors sit at least this many meters behind the bit."""

FAMILIES = ("G", "B", "D", "L", "F", "E", "M", "FM")
BASIC = tuple(c.value for c in CHANNELS) + ("APR", "SED")


def _m(d):
    return f"{d:g}m"


def _steps(d, what="distance"):
    k = d / BIN_SIZE
    if d <= 0 or abs(k - round(k)) > 1e-6:
        raise ConfigError(f"{what} {d} m is not a positive multiple of {BIN_SIZE} m")
    return int(round(k))


# the greedy-selected set, in selection order
GREEDY_COLUMNS = (
    "B:ROP",
    "B:HL",
    "D:WOB_diff_1m",
    "D:ROP_std_1m",
    "D:TRQ_std_1m",
    "D:ROP_mean_1m",
    "L:TRQ_lag_0.5m",
    "L:QOUT_lag_10m",
    "L:QIN_lag_10m",
    "L:HL_lag_10m",
    "L:TRQ_lag_10m",
)


@dataclass(frozen=True)
class FeatureSpec:
    """Which feature families to build and their window / lag settings."""

    families: tuple = ("B",)
    lag_distances: tuple = (0.1, 0.5, 1.0, 10.0)
    rolling_window: float = 1.0
    extra_lags: tuple = (20.0, 50.0)
    math_window: int = 5
    columns: tuple = ()

    def __post_init__(self):
        fams = tuple(self.families)
        for f in fams:
            if f not in FAMILIES:
                raise ConfigError(f"unknown feature family {f!r}; expected one of {FAMILIES}")
        object.__setattr__(self, "families", fams)
        object.__setattr__(self, "lag_distances", tuple(float(d) for d in self.lag_distances))
        object.__setattr__(self, "extra_lags", tuple(float(d) for d in self.extra_lags))
        object.__setattr__(self, "columns", tuple(self.columns))
        for d in self.lag_distances:
            _steps(d, "lag")
        if _steps(self.rolling_window, "rolling window") < 2:
            raise ConfigError("rolling window must span at least two bins")
        for d in self.extra_lags:
            _steps(d, "extra lag")
            if d < MIN_EXTRA_LAG:
                raise ConfigError(f"extra lag {d} m is below the {MIN_EXTRA_LAG:g} m sensor offset; "
                                  "it would leak at-bit lithology")
        if self.math_window < 3:
            raise ConfigError("math_window must be >= 3 (three unknowns per window)")

    @classmethod
    def parse(cls, families, **kw):
        """Build from a string like ``"B+D+L"`` (``"-"`` means no features)."""
        if isinstance(families, str):
            families = () if families.strip() in ("", "-") else tuple(
                f.strip() for f in families.replace(",", "+").split("+") if f.strip())
        return cls(families=families, **kw)

    def to_dict(self):
        return {"families": list(self.families), "lag_distances": list(self.lag_distances),
                "rolling_window": self.rolling_window, "extra_lags": list(self.extra_lags),
                "math_window": self.math_window, "columns": list(self.columns)}


# ---------------------------------------------------------------- derived channels

def compute_apr(rop, wob, trq):
    """Adjusted penetration rate ``ROP / (WOB * sqrt(TRQ))``.

    Missing (NaN) where WOB or TRQ is not above ``1e-9``.
    """
    rop, wob, trq = (np.asarray(v, dtype=float) for v in (rop, wob, trq))
    bad = ~(wob > EPS) | ~(trq > EPS)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(bad, np.nan, rop / (np.where(bad, 1.0, wob) * np.sqrt(np.where(bad, 1.0, trq))))
    return out[()] if out.ndim == 0 else out


def compute_sed(wob, rpm, trq, rop, area):
    """Specific energy of drilling in Pa.

    ``WOB/A + 2*pi*RPM*TRQ / (A*ROP)`` with RPM in rev/s; missing where
    ROP is not above ``1e-9``.
    """
    if not area > 0:
        raise ValueError(f"cross-section area must be positive, got {area}")
    wob, rpm, trq, rop = (np.asarray(v, dtype=float) for v in (wob, rpm, trq, rop))
    bad = ~(rop > EPS)
    with np.errstate(invalid="ignore", divide="ignore"):
        out = wob / area + (2.0 * math.pi * rpm * trq) / (area * np.where(bad, 1.0, rop))
    out = np.where(bad, np.nan, out)
    return out[()] if out.ndim == 0 else out


# ---------------------------------------------------------------- window features

def rolling_features(values, window=1.0):
    """Trailing rolling mean, population std and border difference.

    The window at bin ``i`` covers bins ``[i-k+1, i]`` with ``k = window / 0.1``.
    The border difference is newest minus oldest value. Any missing value in
    the window, or a window running past the series start, gives NaN.
    """
    x = np.asarray(values, dtype=float)
    k = _steps(window, "rolling window")
    n = len(x)
    mean = np.full(n, np.nan)
    std = np.full(n, np.nan)
    diff = np.full(n, np.nan)
    if n >= k:
        w = sliding_window_view(x, k)
        mean[k - 1:] = w.mean(axis=1)
        std[k - 1:] = w.std(axis=1)
        diff[k - 1:] = w[:, -1] - w[:, 0]
        bad = np.isnan(w).any(axis=1)
        for a in (mean, std, diff):
            a[k - 1:][bad] = np.nan
    return mean, std, diff


def _shift(x, k):
    out = np.full(len(x), np.nan)
    if k < len(x):
        out[k:] = x[:len(x) - k]
    return out


def lag_features(values, lags=(0.1, 0.5, 1.0, 10.0)):
    """Values ``d`` meters above each bin, keyed by lag distance."""
    x = np.asarray(values, dtype=float)
    return {float(d): _shift(x, _steps(d, "lag")) for d in lags}


def extra_features(labels, lags=(20.0, 50.0)):
    """True lithology ``d`` meters above each bin, keyed by lag distance.

    Raises ConfigError for lags below 15 m.
    """
    y = np.asarray(labels, dtype=float)
    out = {}
    for d in lags:
        if d < MIN_EXTRA_LAG:
            raise ConfigError(f"extra lag {d} m is below the {MIN_EXTRA_LAG:g} m sensor offset")
        out[float(d)] = _shift(y, _steps(d, "extra lag"))
    return out


# ---------------------------------------------------------------- bit-rock model

@dataclass(frozen=True)
class BitRockFit:
    """Least-squares fit of ``TOB = (b1 + b2*WOB)/Omega + b3`` on one window."""

    b1: float
    b2: float
    b3: float
    residual_rms: float
    window_ok: bool

    @property
    def b(self):
        return np.array([self.b1, self.b2, self.b3])


def _fit_windows(W, T, O):
    """Solve the 3-parameter problem on a stack of windows (shape ``(n, m)``).

    Columns are equilibrated before forming the normal equations; the
    condition limit applies to that scaled Gram matrix. One step of
    iterative refinement follows the first solve.
    """
    n, m = W.shape
    b = np.full((n, 3), np.nan)
    rms = np.full(n, np.nan)
    valid = ~(np.isnan(W).any(1) | np.isnan(T).any(1)) & (O > EPS).all(1)
    ok = np.zeros(n, dtype=bool)
    if not valid.any():
        return b, rms, ok
    Wv, Tv, Ov = W[valid], T[valid], O[valid]
    X = np.stack([1.0 / Ov, Wv / Ov, np.ones_like(Ov)], axis=2)
    scale = np.sqrt((X ** 2).sum(axis=1))
    scale[scale == 0] = 1.0
    Xs = X / scale[:, None, :]
    G = np.einsum("nij,nik->njk", Xs, Xs)
    with np.errstate(all="ignore"):
        cond = np.linalg.cond(G)
    good = np.isfinite(cond) & (cond <= COND_LIMIT)
    idx = np.flatnonzero(valid)[good]
    ok[idx] = True
    if good.any():
        Xg, Gg, Tg, sg = Xs[good], G[good], Tv[good], scale[good]
        z = np.linalg.solve(Gg, np.einsum("nij,ni->nj", Xg, Tg)[..., None])[..., 0]
        r = Tg - np.einsum("nij,nj->ni", Xg, z)
        z = z + np.linalg.solve(Gg, np.einsum("nij,ni->nj", Xg, r)[..., None])[..., 0]
        coef = z / sg
        b[idx] = coef
        resid = Tg - np.einsum("nij,nj->ni", X[good], coef)
        rms[idx] = np.sqrt((resid ** 2).mean(axis=1))
    return b, rms, ok


def fit_bit_rock_model(wob, tob, omega, m=None):
    """Fit ``(b1, b2, b3)`` on one window of ``m`` consecutive bins.

    Parameters
    ----------
    wob, tob, omega : array_like
        Weight on bit (N), torque (N*m) and rotary speed (rev/s).
    m : int, optional
        Window length; defaults to the length of the inputs, which must match.

    Returns
    -------
    BitRockFit
        ``window_ok`` is False (and coefficients NaN) when the window has
        missing inputs, a non-positive speed, or a scaled Gram matrix with
        condition number above 1e12.
    """
    wob, tob, omega = (np.asarray(v, dtype=float).ravel() for v in (wob, tob, omega))
    m = len(wob) if m is None else int(m)
    if m < 3:
        raise ValueError("window length must be >= 3")
    if not (len(wob) == len(tob) == len(omega) == m):
        raise ValueError("wob, tob and omega must all have length m")
    b, rms, ok = _fit_windows(wob[None], tob[None], omega[None])
    return BitRockFit(float(b[0, 0]), float(b[0, 1]), float(b[0, 2]), float(rms[0]), bool(ok[0]))


def fit_bit_rock_series(wob, tob, omega, m=5):
    """Trailing-window fits along a whole series.

    Returns ``b`` of shape ``(n, 3)``, ``residual_rms`` and ``window_ok``;
    the first ``m-1`` bins and failed windows are NaN.
    """
    wob, tob, omega = (np.asarray(v, dtype=float) for v in (wob, tob, omega))
    n = len(wob)
    b = np.full((n, 3), np.nan)
    rms = np.full(n, np.nan)
    ok = np.zeros(n, dtype=bool)
    if m < 3:
        raise ValueError("window length must be >= 3")
    if n >= m:
        bw, rw, okw = _fit_windows(sliding_window_view(wob, m), sliding_window_view(tob, m),
                                   sliding_window_view(omega, m))
        b[m - 1:], rms[m - 1:], ok[m - 1:] = bw, rw, okw
    return b, rms, ok


def math_features(frame, spec):
    """Windowed bit-rock coefficients (family M) and their rolling std (family FM).

    Surface torque stands in for torque on bit.
    """
    b, _, _ = fit_bit_rock_series(frame[ChannelId.WOB], frame[ChannelId.TRQ],
                                  frame[ChannelId.RPM], spec.math_window)
    out = {}
    w = _m(spec.rolling_window)
    for j in range(3):
        out[f"M:b{j + 1}"] = b[:, j]
    for j in range(3):
        out[f"FM:b{j + 1}_std_{w}"] = rolling_features(b[:, j], spec.rolling_window)[1]
    return out


# ---------------------------------------------------------------- assembly

def basic_series(frame):
    """The eight channels plus APR and SED, keyed by name."""
    s = {c.value: frame[c] for c in CHANNELS}
    s["APR"] = compute_apr(s["ROP"], s["WOB"], s["TRQ"])
    s["SED"] = compute_sed(s["WOB"], s["RPM"], s["TRQ"], s["ROP"], frame.bit_area)
    return s


def family_columns(family, spec):
    """Ordered column names produced by one family under ``spec``."""
    w = _m(spec.rolling_window)
    if family == "G":
        return list(GREEDY_COLUMNS)
    if family == "B":
        return [f"B:{s}" for s in BASIC]
    if family == "D":
        return [f"D:{s}_{kind}_{w}" for s in BASIC for kind in ("mean", "std", "diff")]
    if family == "L":
        return [f"L:{s}_lag_{_m(d)}" for s in BASIC for d in spec.lag_distances]
    if family == "F":
        return [f"F:{c.value}_fluct" for c in CHANNELS]
    if family == "E":
        return [f"E:label_lag_{_m(d)}" for d in spec.extra_lags]
    if family == "M":
        return ["M:b1", "M:b2", "M:b3"]
    if family == "FM":
        return [f"FM:b{j}_std_{w}" for j in (1, 2, 3)]
    raise ConfigError(f"unknown feature family {family!r}")


def feature_columns(spec):
    cols = []
    for fam in sorted(spec.families, key=FAMILIES.index):
        cols += family_columns(fam, spec)
    cols += list(spec.columns)
    seen = set()
    return [c for c in cols if not (c in seen or seen.add(c))]


def _parse_column(name):
    """Split ``"FAM:rest"`` into its family tag and the remainder."""
    fam, _, rest = name.partition(":")
    return fam, rest


def frame_features(frame, columns, spec):
    """Compute the requested columns for one frame; returns ``{name: array}``."""
    basic = None
    rolled = {}
    out = {}
    mathcols = None
    for name in columns:
        fam, rest = _parse_column(name)
        if fam in ("B", "D", "L") and basic is None:
            basic = basic_series(frame)
        try:
            if fam == "B":
                out[name] = basic[rest]
            elif fam == "D":
                series, kind, win = rest.rsplit("_", 2)
                window = float(win[:-1])
                key = (series, window)
                if key not in rolled:
                    rolled[key] = rolling_features(basic[series], window)
                out[name] = rolled[key][("mean", "std", "diff").index(kind)]
            elif fam == "L":
                series, _, dist = rest.rsplit("_", 2)
                out[name] = _shift(basic[series], _steps(float(dist[:-1]), "lag"))
            elif fam == "F":
                series = rest[: -len("_fluct")]
                if not rest.endswith("_fluct"):
                    raise KeyError(rest)
                out[name] = frame.within_bin_std[ChannelId(series)]
            elif fam == "E":
                dist = float(rest.rsplit("_", 1)[1][:-1])
                out[name] = extra_features(frame.labels, [dist])[dist]
            elif fam in ("M", "FM"):
                if mathcols is None:
                    mathcols = math_features(frame, spec)
                out[name] = mathcols[name]
            else:
                raise KeyError(fam)
        except (KeyError, ValueError, IndexError):
            raise ConfigError(f"unknown feature {name!r}") from None
    return out


@dataclass
class FeatureMatrix:
    """Row-per-bin feature table.

    ``X`` holds NaN for missing feature values. Rows keep the well, lateral
    and depth they came from so cross-validation can group by well.
    """

    columns: list
    X: np.ndarray
    target: np.ndarray
    well_id: np.ndarray
    hole_id: np.ndarray
    depth: np.ndarray
    row_lengths: np.ndarray = None
    spec: dict = field(default_factory=dict)

    def __post_init__(self):
        self.columns = list(self.columns)
        self.X = np.asarray(self.X, dtype=float).reshape(len(self.target), len(self.columns))
        self.target = np.asarray(self.target, dtype=np.int64)
        self.well_id = np.asarray(self.well_id, dtype=object)
        self.hole_id = np.asarray(self.hole_id, dtype=object)
        self.depth = np.asarray(self.depth, dtype=float)
        if self.row_lengths is None:
            self.row_lengths = np.full(len(self.target), BIN_SIZE)
        self.row_lengths = np.asarray(self.row_lengths, dtype=float)
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate feature column names")

    def __len__(self):
        return len(self.target)

    @property
    def wells(self):
        return sorted(set(self.well_id.tolist()))

    def column(self, name):
        return self.X[:, self.columns.index(name)]

    def select(self, columns):
        columns = list(columns)
        missing = [c for c in columns if c not in self.columns]
        if missing:
            raise ConfigError(f"unknown feature columns: {missing}")
        idx = [self.columns.index(c) for c in columns]
        return FeatureMatrix(columns, self.X[:, idx], self.target, self.well_id, self.hole_id,
                             self.depth, self.row_lengths, self.spec)

    def rows(self, index):
        return FeatureMatrix(self.columns, self.X[index], self.target[index], self.well_id[index],
                             self.hole_id[index], self.depth[index], self.row_lengths[index], self.spec)

    def with_column(self, name, values):
        return FeatureMatrix(self.columns + [name], np.column_stack([self.X, values]) if self.columns
                             else np.asarray(values, float)[:, None], self.target, self.well_id,
                             self.hole_id, self.depth, self.row_lengths, self.spec)

    def canonical_order(self):
        """Row permutation sorting by (well, hole, depth)."""
        keys = list(zip(self.well_id.tolist(), self.hole_id.tolist(), self.depth.tolist()))
        return np.array(sorted(range(len(keys)), key=keys.__getitem__), dtype=np.int64)

    def sorted(self):
        return self.rows(self.canonical_order())

    def to_csv(self, path):
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["well_id", "hole_id", "depth_m", "target"] + self.columns)
            for i in range(len(self)):
                w.writerow([self.well_id[i], self.hole_id[i], repr(float(self.depth[i])), int(self.target[i])]
                           + ["" if math.isnan(v) else repr(float(v)) for v in self.X[i]])

    @classmethod
    def from_csv(cls, path):
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header[:4] != ["well_id", "hole_id", "depth_m", "target"]:
                raise ValueError(f"{path}: not a features.csv file")
            rows = list(reader)
        cols = header[4:]
        X = np.array([[float(v) if v != "" else np.nan for v in r[4:]] for r in rows]).reshape(len(rows), len(cols))
        return cls(cols, X, [int(r[3]) for r in rows], [r[0] for r in rows], [r[1] for r in rows],
                   [float(r[2]) for r in rows])


def assemble_matrix(frames, spec):
    """Build the feature matrix for ``frames`` under ``spec``.

    Rows follow (well_id, hole_id, bin) order; rows without a label are
    dropped.
    """
    columns = feature_columns(spec)
    if any(c.startswith("E:") and float(c.rsplit("_", 1)[1][:-1]) < MIN_EXTRA_LAG for c in columns):
        raise ConfigError("extra-feature lag below sensor offset")
    blocks, target, wells, holes, depths = [], [], [], [], []
    for frame in sorted(frames, key=lambda f: (f.well_id, f.hole_id)):
        feats = frame_features(frame, columns, spec)
        keep = ~np.isnan(frame.labels)
        X = np.column_stack([feats[c] for c in columns]) if columns else np.empty((frame.n_bins, 0))
        blocks.append(X[keep])
        target.append(frame.labels[keep].astype(np.int64))
        n = int(keep.sum())
        wells += [frame.well_id] * n
        holes += [frame.hole_id] * n
        depths.append(frame.depths[keep])
    if blocks:
        X = np.vstack(blocks)
        y = np.concatenate(target)
        d = np.concatenate(depths)
    else:
        X, y, d = np.empty((0, len(columns))), np.empty(0, np.int64), np.empty(0)
    return FeatureMatrix(columns, X, y, wells, holes, d, spec=spec.to_dict())
