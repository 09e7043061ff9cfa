"""Synthetic horizontal wells driven by a linear bit-rock interaction model.

Per bin, with the rock class of that bin::

    ROP = a1 + a2 * WOB + a3 * Omega
    TOB = a4 * ROP / Omega + a5

WOB and Omega follow bounded random walks; the lithology is a two-state
Markov chain with a minimum run length. Default magnitudes are
order-of-magnitude conventions (WOB tens of kN, torque a few kN*m, ROP
10-50 m/h), not calibrated field values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .core import CHANNELS, ChannelId, DataError, DepthGrid, WellFrame
from .ingest import (COLUMN_OF_CHANNEL, MWD_COLUMNS, LithoInterval, WellBounds, write_bounds_csv,
                     write_lithology_csv, write_mwd_csv)


@dataclass(frozen=True)
class RockParams:
    a1: float  # m/s
    a2: float  # m/s per N
    a3: float  # m per rev
    a4: float
    a5: float  # N*m

    def __post_init__(self):
        if not (self.a2 > 0 and self.a4 > 0):
            raise ValueError("a2 and a4 must be positive")

    @property
    def b(self):
        """Coefficients of the reduced torque model these parameters imply."""
        return np.array([self.a4 * self.a1, self.a4 * self.a2, self.a4 * self.a3 + self.a5])

    def as_array(self):
        return np.array([self.a1, self.a2, self.a3, self.a4, self.a5])


SAND_ROCK = RockParams(a1=1.0e-3, a2=1.2e-7, a3=2.0e-3, a4=4.0e5, a5=1.5e3)
SHALE_ROCK = RockParams(a1=8.0e-4, a2=1.0e-7, a3=1.6e-3, a4=5.5e5, a5=1.8e3)

DEFAULT_NOISE = {
    ChannelId.WOB: 0.01, ChannelId.TRQ: 0.15, ChannelId.ROP: 0.15, ChannelId.RPM: 0.005,
    ChannelId.QIN: 0.01, ChannelId.QOUT: 0.01, ChannelId.SPP: 0.01, ChannelId.HL: 0.005,
}


@dataclass(frozen=True)
class SynthWellSpec:
    """Everything needed to generate one synthetic lateral.

    ``p_switch[c]`` is the per-bin probability of leaving class ``c`` once
    the current run has lasted ``min_run`` bins.
    """

    n_bins: int = 1000
    p_switch: tuple = (1.0 / 151.0, 1.0 / 16.0)
    min_run: int = 10
    rocks: tuple = (SAND_ROCK, SHALE_ROCK)
    wob_range: tuple = (20e3, 90e3)
    wob_step: float = 1.5e3
    omega_range: tuple = (1.0, 2.5)
    omega_step: float = 0.03
    noise: dict = field(default_factory=lambda: dict(DEFAULT_NOISE))
    nuisance_shift: float = 0.02
    fluct_shift: float = 0.3
    missing_rate: float = 0.0
    missing_run: tuple = (5, 30)
    start_depth: float = 2000.0
    bit_area: float = math.pi * 0.2159 ** 2 / 4
    seed: int = 0

    def __post_init__(self):
        if self.n_bins < 1:
            raise ValueError("n_bins must be >= 1")
        if not all(0 <= p <= 1 for p in self.p_switch):
            raise ValueError("switch probabilities must lie in [0, 1]")
        if self.min_run < 1:
            raise ValueError("min_run must be >= 1")
        if any(v < 0 for v in self.noise.values()):
            raise ValueError("noise std must be non-negative")
        if not 0 <= self.missing_rate < 1:
            raise ValueError("missing_rate must be in [0, 1)")
        if len(self.rocks) != 2 or np.array_equal(self.rocks[0].as_array(), self.rocks[1].as_array()):
            raise ValueError("need two distinct rock parameter sets")

    def stationary_share(self):
        """Long-run share of class 1 for this chain."""
        p01, p10 = self.p_switch
        if p01 == 0 and p10 == 0:
            return float("nan")
        run0 = math.inf if p01 == 0 else self.min_run - 1 + 1 / p01
        run1 = math.inf if p10 == 0 else self.min_run - 1 + 1 / p10
        if math.isinf(run0):
            return 0.0
        if math.isinf(run1):
            return 1.0
        return run1 / (run0 + run1)

    def noiseless(self):
        return replace(self, noise={c: 0.0 for c in CHANNELS}, missing_rate=0.0)


def _rng(spec, rng):
    return rng if rng is not None else np.random.default_rng(spec.seed)


def gen_lithology(spec, rng=None):
    """Per-bin class sequence (0 sand, 1 shale) from the run-length constrained chain."""
    rng = _rng(spec, rng)
    share = spec.stationary_share()
    state = int(rng.random() < (0.5 if math.isnan(share) else share))
    out = np.empty(spec.n_bins, dtype=np.int64)
    run = 0
    u = rng.random(spec.n_bins)
    for i in range(spec.n_bins):
        if run >= spec.min_run and u[i] < spec.p_switch[state]:
            state = 1 - state
            run = 0
        out[i] = state
        run += 1
    return out


def bounded_walk(n, lo, hi, step, rng):
    """Random walk with Gaussian steps reflected into ``[lo, hi]``."""
    x = np.empty(n)
    v = rng.uniform(lo, hi)
    steps = rng.normal(0.0, step, n)
    width = hi - lo
    for i in range(n):
        v = v + steps[i] if i else v
        if width > 0:
            r = (v - lo) % (2 * width)
            v = lo + (r if r <= width else 2 * width - r)
        x[i] = v
    return x


def _ar1(n, phi, sigma, rng):
    e = rng.normal(0.0, sigma, n)
    x = np.empty(n)
    acc = 0.0
    for i in range(n):
        acc = phi * acc + e[i]
        x[i] = acc
    return x


def _missing_mask(n, rate, run, rng):
    mask = np.zeros(n, dtype=bool)
    if rate <= 0:
        return mask
    target = int(round(rate * n))
    lo, hi = run
    while mask.sum() < target:
        length = int(rng.integers(lo, hi + 1))
        start = int(rng.integers(0, n))
        mask[start:start + length] = True
    return mask


def gen_telemetry(litho, spec, rng=None, well_id="W01", hole_id="H1", max_retries=100):
    """Generate telemetry for a lithology sequence and wrap it in a WellFrame."""
    rng = _rng(spec, rng)
    litho = np.asarray(litho, dtype=np.int64)
    n = spec.n_bins
    if len(litho) != n:
        raise ValueError(f"lithology length {len(litho)} does not match n_bins {n}")
    wob = bounded_walk(n, *spec.wob_range, spec.wob_step, rng)
    for _ in range(max_retries):
        omega = bounded_walk(n, *spec.omega_range, spec.omega_step, rng)
        if omega.min() > 0:
            break
    else:
        raise DataError("rotary speed path keeps touching zero; raise omega_range")
    a = np.stack([spec.rocks[c].as_array() for c in (0, 1)])[litho]
    rop = a[:, 0] + a[:, 1] * wob + a[:, 2] * omega
    tob = a[:, 3] * rop / omega + a[:, 4]

    cls = litho.astype(float)
    shift = spec.nuisance_shift
    qin = 0.030 * (1 + 0.05 * _ar1(n, 0.98, 0.2, rng) + shift * cls)
    qout = qin * (0.97 + 0.01 * _ar1(n, 0.95, 0.3, rng)) * (1 - 0.5 * shift * cls)
    spp = 1.5e7 * (1 + 0.03 * _ar1(n, 0.99, 0.15, rng) + shift * cls)
    hl = 8.0e5 * (1 + 0.05 * np.linspace(0, 1, n) + 0.01 * _ar1(n, 0.995, 0.1, rng) - 0.5 * shift * cls)
    truth = {ChannelId.WOB: wob, ChannelId.TRQ: tob, ChannelId.ROP: rop, ChannelId.RPM: omega,
             ChannelId.QIN: qin, ChannelId.QOUT: qout, ChannelId.SPP: spp, ChannelId.HL: hl}
    channels, stds = {}, {}
    for c in CHANNELS:
        sigma = spec.noise.get(c, 0.0)
        v = truth[c] * (1 + sigma * rng.normal(size=n)) if sigma > 0 else truth[c].copy()
        chi = np.sqrt(rng.chisquare(4, size=n) / 4)
        s = np.abs(v) * sigma * chi * (1 + spec.fluct_shift * cls)
        miss = _missing_mask(n, spec.missing_rate, spec.missing_run, rng)
        v[miss] = np.nan
        s[miss] = np.nan
        channels[c], stds[c] = v, s
    return WellFrame(well_id, hole_id, DepthGrid(spec.start_depth, n), channels, stds,
                     litho.astype(float), spec.bit_area)


def gen_well(spec, well_id="W01", hole_id="H1"):
    rng = np.random.default_rng(spec.seed)
    litho = gen_lithology(spec, rng)
    return gen_telemetry(litho, spec, rng, well_id, hole_id)


def _jitter_rock(rock, jitter, rng):
    if jitter == 0:
        return rock
    f = np.exp(jitter * rng.normal(size=5))
    return RockParams(*(rock.as_array() * f))


def gen_benchmark(n_wells=8, template=None, seed=7, jitter=0.1, share_range=(0.10, 0.17),
                  max_retries=50):
    """A set of wells with per-well seeds and jittered rock parameters.

    The pooled shale share is kept inside ``share_range``: if a draw misses
    it, all wells are redrawn from the next attempt's seeds.

    Returns
    -------
    list of WellFrame
    """
    if n_wells < 2:
        raise ValueError("a benchmark needs at least 2 wells")
    template = template or SynthWellSpec(missing_rate=0.02)
    share = float("nan")
    for attempt in range(max_retries):
        children = np.random.SeedSequence([seed, attempt]).spawn(n_wells)
        frames = []
        for i, child in enumerate(children):
            rng = np.random.default_rng(child)
            rocks = tuple(_jitter_rock(r, jitter, rng) for r in template.rocks)
            wspec = replace(template, rocks=rocks, start_depth=template.start_depth + 100.0 * i,
                            seed=int(child.generate_state(1)[0]))
            litho = gen_lithology(wspec, rng)
            frames.append(gen_telemetry(litho, wspec, rng, f"W{i + 1:02d}", "H1"))
        labels = np.concatenate([f.labels for f in frames])
        share = float(labels.mean())
        if share_range[0] <= share <= share_range[1]:
            return frames
    raise DataError(f"benchmark calibration failed: pooled shale share {share:.4f} outside "
                    f"{share_range} after {max_retries} attempts")


def litho_intervals(frame):
    """Contiguous same-class runs of a frame's labels as LithoInterval records."""
    y = frame.labels
    out = []
    i = 0
    n = len(y)
    while i < n:
        if np.isnan(y[i]):
            i += 1
            continue
        j = i
        while j + 1 < n and y[j + 1] == y[i]:
            j += 1
        top = float(frame.grid.depth_of(i))
        bottom = float(frame.grid.depth_of(j + 1))
        out.append(LithoInterval(frame.well_id, top, bottom, int(y[i])))
        i = j + 1
    return out


def write_raw(frames, root, mwd_dir="raw/mwd", lithology="raw/lithology.csv", bounds="raw/bounds.csv"):
    """Export frames in the three ingest CSV schemas plus a pipeline config.

    Each bin becomes two raw rows, at 0.025 m and 0.075 m below its top,
    with values ``mean -/+ std`` so binning recovers the bin mean and the
    within-bin standard deviation.
    """
    root = Path(root)
    (root / mwd_dir).mkdir(parents=True, exist_ok=True)
    intervals = []
    wbounds = {}
    for frame in frames:
        rows = []
        tops = frame.depths
        for i in range(frame.n_bins):
            lo_cells, hi_cells = {}, {}
            for c in CHANNELS:
                v = frame.channels[c][i]
                if np.isnan(v):
                    continue
                s = frame.within_bin_std[c][i]
                s = 0.0 if np.isnan(s) else s
                factor = MWD_COLUMNS[COLUMN_OF_CHANNEL[c]][1]
                lo_cells[COLUMN_OF_CHANNEL[c]] = (v - s) / factor
                hi_cells[COLUMN_OF_CHANNEL[c]] = (v + s) / factor
            rows.append((frame.well_id, frame.hole_id, tops[i] + 0.025, lo_cells))
            rows.append((frame.well_id, frame.hole_id, tops[i] + 0.075, hi_cells))
        write_mwd_csv(root / mwd_dir / f"{frame.well_id}_{frame.hole_id}.csv", rows)
        intervals += litho_intervals(frame)
        b = wbounds.get(frame.well_id)
        lo, hi = frame.grid.start_depth, frame.grid.end_depth
        if b is not None:
            lo, hi = min(lo, b.start), max(hi, b.end)
        wbounds[frame.well_id] = WellBounds(lo, hi, frame.bit_area)
    write_lithology_csv(root / lithology, intervals)
    write_bounds_csv(root / bounds, wbounds)
    return root
