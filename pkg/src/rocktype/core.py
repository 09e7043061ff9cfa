"""Domain types shared across the toolkit.

All quantities are SI: N, N*m, m/s, rev/s, m^3/s, Pa. Missing values are
stored as NaN in float arrays; on disk they are written as an explicit
mask next to the values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import _io

BIN_SIZE = 0.1
"""Depth grid resolution in meters."""

SAND, SHALE = 0, 1


class RocktypeError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(RocktypeError):
    pass


class DataError(RocktypeError):
    pass


class TrainingError(RocktypeError):
    pass


class ChannelId(str, Enum):
    """The eight measured surface channels."""

    WOB = "WOB"    # weight on bit, N
    TRQ = "TRQ"    # surface torque, N*m
    ROP = "ROP"    # rate of penetration, m/s
    RPM = "RPM"    # rotary speed, rev/s
    QIN = "QIN"    # input flow rate, m^3/s
    QOUT = "QOUT"  # output flow rate, m^3/s
    SPP = "SPP"    # standpipe pressure, Pa
    HL = "HL"      # hook load, N

    def __str__(self):
        return self.value


CHANNELS = tuple(ChannelId)


@dataclass(frozen=True)
class DepthGrid:
    """Uniform measured-depth grid; bin ``i`` covers ``[start + 0.1 i, start + 0.1 (i+1))``."""

    start_depth: float
    n_bins: int
    bin_size: float = BIN_SIZE

    def __post_init__(self):
        if self.bin_size != BIN_SIZE:
            raise ValueError(f"bin_size must be {BIN_SIZE} m, got {self.bin_size}")
        if self.n_bins < 1:
            raise ValueError("a depth grid needs at least one bin")

    def depth_of(self, i):
        """Top depth of bin(s) ``i``."""
        return self.start_depth + self.bin_size * np.asarray(i)

    def index_of(self, depth):
        """Bin index containing ``depth`` (may fall outside ``[0, n_bins)``)."""
        x = (np.asarray(depth, dtype=float) - self.start_depth) / self.bin_size
        # absorb representation error of depths sitting exactly on a bin edge
        return np.floor(x + 1e-9).astype(np.int64)

    @property
    def depths(self):
        return self.depth_of(np.arange(self.n_bins))

    @property
    def end_depth(self):
        return self.start_depth + self.bin_size * self.n_bins

    @classmethod
    def covering(cls, lo, hi):
        """Smallest grid aligned at ``lo`` whose bins contain every depth in ``[lo, hi]``."""
        n = int(math.floor((hi - lo) / BIN_SIZE + 1e-9)) + 1
        return cls(float(lo), max(n, 1))


def _frozen(a, dtype=float):
    a = np.array(a, dtype=dtype, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class WellFrame:
    """Depth-gridded telemetry and labels for one lateral of one well.

    Parameters
    ----------
    well_id, hole_id : str
        Well and lateral identifiers.
    grid : DepthGrid
    channels : dict
        ChannelId -> float array of length ``grid.n_bins`` (NaN = missing).
    within_bin_std : dict
        ChannelId -> float array of population std of the raw samples
        aggregated into each bin.
    labels : ndarray
        Float array with 0 (sand), 1 (shale / hard rock) or NaN (unlabeled).
    bit_area : float
        Wellbore cross-section in m^2.
    """

    well_id: str
    hole_id: str
    grid: DepthGrid
    channels: dict
    within_bin_std: dict
    labels: np.ndarray
    bit_area: float
    leading_gap: dict = field(default_factory=dict)

    def __post_init__(self):
        n = self.grid.n_bins
        chans = {}
        stds = {}
        for c in CHANNELS:
            v = self.channels.get(c)
            chans[c] = _frozen(np.full(n, np.nan) if v is None else v)
            s = self.within_bin_std.get(c)
            stds[c] = _frozen(np.full(n, np.nan) if s is None else s)
            if chans[c].shape != (n,) or stds[c].shape != (n,):
                raise ValueError(f"channel {c} does not match grid length {n}")
            if np.any(stds[c][~np.isnan(stds[c])] < 0):
                raise ValueError(f"negative within-bin std in channel {c}")
        object.__setattr__(self, "channels", chans)
        object.__setattr__(self, "within_bin_std", stds)
        labels = _frozen(self.labels)
        if labels.shape != (n,):
            raise ValueError("labels do not match grid length")
        ok = np.isnan(labels) | (labels == SAND) | (labels == SHALE)
        if not ok.all():
            raise ValueError("labels must be 0, 1 or missing")
        object.__setattr__(self, "labels", labels)
        if not self.bit_area > 0:
            raise ValueError("bit_area must be positive")
        gaps = {c: _frozen(self.leading_gap.get(c, np.zeros(n, bool)), bool) for c in CHANNELS}
        object.__setattr__(self, "leading_gap", gaps)

    @property
    def n_bins(self):
        return self.grid.n_bins

    @property
    def depths(self):
        return self.grid.depths

    def __getitem__(self, channel):
        return self.channels[ChannelId(channel)]

    def truncated(self, depth):
        """Copy restricted to bins whose top depth is <= ``depth``."""
        n = int(np.count_nonzero(self.depths <= depth + 1e-9))
        if n < 1:
            raise ValueError("truncation leaves no bins")
        return WellFrame(
            self.well_id, self.hole_id, DepthGrid(self.grid.start_depth, n),
            {c: v[:n] for c, v in self.channels.items()},
            {c: v[:n] for c, v in self.within_bin_std.items()},
            self.labels[:n], self.bit_area,
            {c: v[:n] for c, v in self.leading_gap.items()},
        )

    def to_bytes(self):
        arrays = {}
        for c in CHANNELS:
            for prefix, src in (("value", self.channels), ("std", self.within_bin_std)):
                a = src[c]
                miss = np.isnan(a)
                arrays[f"{prefix}/{c}"] = np.where(miss, 0.0, a)
                arrays[f"{prefix}_missing/{c}"] = miss.astype(np.uint8)
            arrays[f"leading_gap/{c}"] = self.leading_gap[c].astype(np.uint8)
        miss = np.isnan(self.labels)
        arrays["labels"] = np.where(miss, 0, self.labels).astype(np.int8)
        arrays["labels_missing"] = miss.astype(np.uint8)
        meta = {
            "kind": "WellFrame",
            "well_id": self.well_id,
            "hole_id": self.hole_id,
            "start_depth": self.grid.start_depth,
            "n_bins": self.grid.n_bins,
            "bit_area": self.bit_area,
        }
        return _io.pack(meta, arrays)

    @classmethod
    def from_bytes(cls, data):
        meta, arrays = _io.unpack(data)
        if meta.get("kind") != "WellFrame":
            raise ValueError("packed object is not a WellFrame")

        def restore(prefix, c):
            v = arrays[f"{prefix}/{c}"].astype(float)
            v[arrays[f"{prefix}_missing/{c}"].astype(bool)] = np.nan
            return v

        labels = arrays["labels"].astype(float)
        labels[arrays["labels_missing"].astype(bool)] = np.nan
        return cls(
            meta["well_id"], meta["hole_id"],
            DepthGrid(meta["start_depth"], meta["n_bins"]),
            {c: restore("value", c) for c in CHANNELS},
            {c: restore("std", c) for c in CHANNELS},
            labels, meta["bit_area"],
            {c: arrays[f"leading_gap/{c}"].astype(bool) for c in CHANNELS},
        )

    def save(self, path):
        with open(path, "wb") as fh:
            fh.write(self.to_bytes())

    @classmethod
    def load(cls, path):
        with open(path, "rb") as fh:
            return cls.from_bytes(fh.read())

    def equals(self, other):
        """Field-wise equality treating NaN == NaN."""
        if (self.well_id, self.hole_id, self.grid, self.bit_area) != (
                other.well_id, other.hole_id, other.grid, other.bit_area):
            return False
        for c in CHANNELS:
            if not (np.array_equal(self.channels[c], other.channels[c], equal_nan=True)
                    and np.array_equal(self.within_bin_std[c], other.within_bin_std[c], equal_nan=True)
                    and np.array_equal(self.leading_gap[c], other.leading_gap[c])):
                return False
        return np.array_equal(self.labels, other.labels, equal_nan=True)


@dataclass(frozen=True)
class LabeledBins:
    """Scored rows with their interval lengths in meters."""

    lengths: np.ndarray
    y: np.ndarray
    scores: np.ndarray

    def __post_init__(self):
        lengths = _frozen(self.lengths)
        y = _frozen(self.y, np.int64)
        scores = _frozen(self.scores)
        if not (len(lengths) == len(y) == len(scores)):
            raise ValueError("lengths, y and scores must have equal length")
        if np.any(lengths <= 0):
            raise ValueError("interval lengths must be positive")
        object.__setattr__(self, "lengths", lengths)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "scores", scores)

    def __len__(self):
        return len(self.y)


def class_share(frame):
    """Share of labeled bins that are shale / hard rock."""
    labels = frame.labels if isinstance(frame, WellFrame) else np.asarray(frame, float)
    labeled = labels[~np.isnan(labels)]
    if labeled.size == 0:
        raise DataError("no labeled bins")
    return float(np.count_nonzero(labeled == SHALE) / labeled.size)
