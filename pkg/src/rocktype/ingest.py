"""Raw MWD / lithology / bounds CSV ingestion and the cached preprocessing pipeline.

Stages per lateral: parse -> clip -> bin -> fill -> merge -> label. Every stage
output is content-addressed; ``manifest.json`` records the input digests and
parameters each output was produced from, and a stage is re-executed only
when those change.
"""

from __future__ import annotations

import csv
import json
import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _io
from .core import (BIN_SIZE, CHANNELS, ChannelId, ConfigError, DataError, DepthGrid,
                   WellFrame)

log = logging.getLogger(__name__)

MWD_HEADER = ("well_id", "hole_id", "depth_m", "wob_kn", "trq_knm", "rop_mh", "rpm",
              "q_in_lmin", "q_out_lmin", "spp_bar", "hl_kn")
LITHO_HEADER = ("well_id", "top_m", "bottom_m", "litho_class")
BOUNDS_HEADER = ("well_id", "horiz_start_m", "horiz_end_m", "bit_area_m2")

# CSV column -> (channel, factor to SI)
MWD_COLUMNS = {
    "wob_kn": (ChannelId.WOB, 1e3),
    "trq_knm": (ChannelId.TRQ, 1e3),
    "rop_mh": (ChannelId.ROP, 1.0 / 3600.0),
    "rpm": (ChannelId.RPM, 1.0 / 60.0),
    "q_in_lmin": (ChannelId.QIN, 1.0 / 60000.0),
    "q_out_lmin": (ChannelId.QOUT, 1.0 / 60000.0),
    "spp_bar": (ChannelId.SPP, 1e5),
    "hl_kn": (ChannelId.HL, 1e3),
}
COLUMN_OF_CHANNEL = {ch: col for col, (ch, _) in MWD_COLUMNS.items()}

DEFAULT_MAX_BAD_FRACTION = 0.01
OVERLAP_TOL = 1e-9  # m


@dataclass(frozen=True)
class RawRecord:
    well_id: str
    hole_id: str
    depth: float
    channel: ChannelId
    value: float


@dataclass(frozen=True)
class LithoInterval:
    well_id: str
    top: float
    bottom: float
    litho_class: int

    def __post_init__(self):
        if not self.top < self.bottom:
            raise ValueError(f"interval top {self.top} must be above bottom {self.bottom}")
        if self.litho_class not in (0, 1):
            raise ValueError(f"litho_class must be 0 or 1, got {self.litho_class}")


@dataclass(frozen=True)
class WellBounds:
    start: float
    end: float
    bit_area: float = 1.0


class Records:
    """Columnar batch of raw records."""

    def __init__(self, well_id=(), hole_id=(), depth=(), channel=(), value=()):
        self.well_id = np.asarray(well_id, dtype=object)
        self.hole_id = np.asarray(hole_id, dtype=object)
        self.depth = np.asarray(depth, dtype=float)
        self.channel = np.asarray(channel, dtype=np.int64)
        self.value = np.asarray(value, dtype=float)

    @classmethod
    def from_records(cls, records):
        records = list(records)
        return cls([r.well_id for r in records], [r.hole_id for r in records],
                   [r.depth for r in records], [CHANNELS.index(ChannelId(r.channel)) for r in records],
                   [r.value for r in records])

    def __len__(self):
        return len(self.depth)

    def __iter__(self):
        for i in range(len(self)):
            yield RawRecord(str(self.well_id[i]), str(self.hole_id[i]), float(self.depth[i]),
                            CHANNELS[self.channel[i]], float(self.value[i]))

    def select(self, mask):
        return Records(self.well_id[mask], self.hole_id[mask], self.depth[mask],
                       self.channel[mask], self.value[mask])

    def laterals(self):
        keys = sorted({(w, h) for w, h in zip(self.well_id, self.hole_id)})
        return keys

    def to_bytes(self):
        wells = sorted(set(self.well_id.tolist()))
        holes = sorted(set(self.hole_id.tolist()))
        wi = {w: i for i, w in enumerate(wells)}
        hi = {h: i for i, h in enumerate(holes)}
        arrays = {
            "well": np.array([wi[w] for w in self.well_id], dtype=np.int64),
            "hole": np.array([hi[h] for h in self.hole_id], dtype=np.int64),
            "depth": self.depth, "channel": self.channel, "value": self.value,
        }
        return _io.pack({"kind": "Records", "wells": wells, "holes": holes}, arrays)

    @classmethod
    def from_bytes(cls, data):
        meta, a = _io.unpack(data)
        wells = np.array(meta["wells"] or [""], dtype=object)
        holes = np.array(meta["holes"] or [""], dtype=object)
        return cls(wells[a["well"]], holes[a["hole"]], a["depth"], a["channel"], a["value"])


@dataclass
class ParseReport:
    path: str
    n_rows: int = 0
    bad_rows: list = field(default_factory=list)  # (line number, reason)


def _allowed_bad(n_rows, max_bad_fraction):
    return max(1, int(math.floor(max_bad_fraction * n_rows)))


def parse_mwd(path, max_bad_fraction=DEFAULT_MAX_BAD_FRACTION, report=None):
    """Parse one MWD CSV file into SI raw records.

    Parameters
    ----------
    path : str or Path
    max_bad_fraction : float
        Malformed rows are skipped and reported. The file is rejected when
        more than ``max(1, floor(max_bad_fraction * rows))`` are malformed.
    report : ParseReport, optional
        Filled with row counts and the list of bad rows.

    Returns
    -------
    Records
    """
    path = Path(path)
    report = report if report is not None else ParseReport(str(path))
    report.path = str(path)
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise DataError(f"{path}: cannot read file ({exc})") from exc
    wells, holes, depths, chans, values = [], [], [], [], []
    with fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return Records()
        header = [h.strip() for h in header]
        for col in header:
            if col not in MWD_HEADER:
                raise DataError(f"{path}:1: unknown channel column {col!r}")
        for col in ("well_id", "hole_id", "depth_m"):
            if col not in header:
                raise DataError(f"{path}:1: missing required column {col!r}")
        pos = {c: i for i, c in enumerate(header)}
        chan_cols = [(pos[c], *MWD_COLUMNS[c]) for c in header if c in MWD_COLUMNS]
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            report.n_rows += 1
            try:
                if len(row) != len(header):
                    raise ValueError(f"expected {len(header)} fields, got {len(row)}")
                well, hole = row[pos["well_id"]].strip(), row[pos["hole_id"]].strip()
                if not well or not hole:
                    raise ValueError("empty well_id or hole_id")
                depth = float(row[pos["depth_m"]])
                if not math.isfinite(depth) or depth < 0:
                    raise ValueError(f"invalid depth {row[pos['depth_m']]!r}")
                parsed = []
                for idx, ch, factor in chan_cols:
                    cell = row[idx].strip()
                    if cell == "":
                        continue
                    v = float(cell)
                    if not math.isfinite(v):
                        raise ValueError(f"non-finite value {cell!r}")
                    parsed.append((CHANNELS.index(ch), v * factor))
            except ValueError as exc:
                report.bad_rows.append((lineno, str(exc)))
                continue
            for ci, v in parsed:
                wells.append(well)
                holes.append(hole)
                depths.append(depth)
                chans.append(ci)
                values.append(v)
    if len(report.bad_rows) > _allowed_bad(report.n_rows, max_bad_fraction):
        line, reason = report.bad_rows[0]
        raise DataError(f"{path}:{line}: {len(report.bad_rows)} malformed rows of "
                        f"{report.n_rows} exceeds tolerance (first: {reason})")
    for line, reason in report.bad_rows:
        log.warning("%s:%d: skipped malformed row (%s)", path, line, reason)
    return Records(wells, holes, depths, chans, values)


def parse_lithology(path):
    """Read the lithology interval CSV into a list of LithoInterval."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != LITHO_HEADER:
            raise DataError(f"{path}:1: expected header {','.join(LITHO_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                out.append(LithoInterval(row["well_id"].strip(), float(row["top_m"]),
                                         float(row["bottom_m"]), int(row["litho_class"])))
            except (ValueError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
    return out


def parse_bounds(path):
    """Read the bounds CSV into ``{well_id: WellBounds}``."""
    out = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or tuple(reader.fieldnames) != BOUNDS_HEADER:
            raise DataError(f"{path}:1: expected header {','.join(BOUNDS_HEADER)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                b = WellBounds(float(row["horiz_start_m"]), float(row["horiz_end_m"]),
                               float(row["bit_area_m2"]))
            except (ValueError, TypeError) as exc:
                raise DataError(f"{path}:{lineno}: {exc}") from exc
            if not b.start <= b.end or not b.bit_area > 0:
                raise DataError(f"{path}:{lineno}: invalid bounds or bit area")
            out[row["well_id"].strip()] = b
    return out


def clip_horizontal(records, bounds):
    """Keep only records whose depth lies in the well's ``[start, end]`` section.

    ``bounds`` maps well id to a WellBounds or a ``(start, end)`` pair.
    """
    if len(records) == 0:
        return records
    missing = sorted(set(records.well_id.tolist()) - set(bounds))
    if missing:
        raise DataError(f"no horizontal bounds for wells: {', '.join(missing)}")
    lo = np.empty(len(records))
    hi = np.empty(len(records))
    for well, b in bounds.items():
        start, end = (b.start, b.end) if isinstance(b, WellBounds) else b
        m = records.well_id == well
        lo[m] = start
        hi[m] = end
    keep = (records.depth >= lo) & (records.depth <= hi)
    return records.select(keep)


def bin_to_grid(depth, values, grid):
    """Aggregate depth-indexed samples onto ``grid``.

    Returns
    -------
    mean, std, count : ndarray
        Arithmetic mean and population std of the samples in each bin;
        empty bins get NaN mean and std and zero count. Samples outside
        the grid are ignored.
    """
    depth = np.asarray(depth, dtype=float)
    values = np.asarray(values, dtype=float)
    n = grid.n_bins
    idx = grid.index_of(depth)
    inside = (idx >= 0) & (idx < n)
    idx, values = idx[inside], values[inside]
    count = np.bincount(idx, minlength=n)
    total = np.bincount(idx, weights=values, minlength=n)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = np.where(count > 0, total / np.maximum(count, 1), np.nan)
        dev = np.bincount(idx, weights=(values - mean[idx]) ** 2, minlength=n)
        std = np.where(count > 0, np.sqrt(dev / np.maximum(count, 1)), np.nan)
    return mean, std, count


def forward_fill(values):
    """Fill each missing bin with the latest preceding observed value.

    Returns
    -------
    filled : ndarray
    leading : ndarray of bool
        True for bins before the first observation; these stay missing.
    """
    values = np.asarray(values, dtype=float)
    observed = ~np.isnan(values)
    last = np.where(observed, np.arange(len(values)), -1)
    np.maximum.accumulate(last, out=last)
    leading = last < 0
    filled = np.where(leading, np.nan, values[np.maximum(last, 0)])
    return filled, leading


def labels_to_grid(intervals, grid):
    """Rasterize lithology intervals onto the grid by majority overlap length.

    A bin takes the class with the largest overlap; an exact tie goes to the
    class whose overlap reaches deeper. Bins without any overlap stay
    unlabeled.
    """
    intervals = sorted(intervals, key=lambda iv: (iv.top, iv.bottom))
    for i, a in enumerate(intervals):
        for b in intervals[i + 1:]:
            if b.top >= a.bottom:
                break
            if a.litho_class != b.litho_class:
                raise DataError(f"overlapping lithology intervals of different class: "
                                f"[{a.top}, {a.bottom}] class {a.litho_class} and "
                                f"[{b.top}, {b.bottom}] class {b.litho_class}")
    n = grid.n_bins
    tops = grid.depths
    bottoms = tops + grid.bin_size
    overlap = np.zeros((2, n))
    reach = np.full((2, n), -np.inf)
    for cls in (0, 1):
        # merge same-class intervals first so overlaps are not double counted
        merged = []
        for iv in (iv for iv in intervals if iv.litho_class == cls):
            if merged and iv.top <= merged[-1][1]:
                merged[-1][1] = max(merged[-1][1], iv.bottom)
            else:
                merged.append([iv.top, iv.bottom])
        for top, bottom in merged:
            lo = np.maximum(tops, top)
            hi = np.minimum(bottoms, bottom)
            ov = hi - lo
            ov = np.where(ov > OVERLAP_TOL, ov, 0.0)  # ignore rounding slivers at bin edges
            overlap[cls] += ov
            reach[cls] = np.where(ov > 0, np.maximum(reach[cls], hi), reach[cls])
    labels = np.full(n, np.nan)
    covered = overlap.sum(axis=0) > 0
    tol = 1e-12
    shale = (overlap[1] > overlap[0] + tol) | (
        (np.abs(overlap[1] - overlap[0]) <= tol) & (reach[1] > reach[0]))
    labels[covered] = np.where(shale[covered], 1.0, 0.0)
    return labels


# ---------------------------------------------------------------- pipeline

STAGES = ("parse", "clip", "bin", "fill", "merge", "label")


@dataclass
class PipelineConfig:
    root: Path
    mwd_dir: str = "raw/mwd"
    lithology: str = "raw/lithology.csv"
    bounds: str = "raw/bounds.csv"
    cache_dir: str = "cache"
    max_bad_fraction: float = DEFAULT_MAX_BAD_FRACTION

    @classmethod
    def from_file(cls, path):
        path = Path(path)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        return cls.from_dict(raw, base=path.parent)

    @classmethod
    def from_dict(cls, raw, base="."):
        raw = dict(raw)
        root = Path(base) / raw.pop("root", ".")
        known = {"mwd_dir", "lithology", "bounds", "cache_dir", "max_bad_fraction"}
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown pipeline config keys: {sorted(unknown)}")
        return cls(root=root, **raw)

    def path(self, rel):
        return self.root / rel

    def to_dict(self):
        return {"root": str(self.root), "mwd_dir": self.mwd_dir, "lithology": self.lithology,
                "bounds": self.bounds, "cache_dir": self.cache_dir,
                "max_bad_fraction": self.max_bad_fraction}


@dataclass
class PipelineResult:
    frames: list
    manifest: dict
    executed: list
    reports: list


class StageError(DataError):
    def __init__(self, stage, key, exc):
        super().__init__(f"stage {stage!r} ({key}): {exc}")
        self.stage = stage


class _Cache:
    """Content-addressed object store plus stage manifest."""

    def __init__(self, directory):
        self.dir = Path(directory)
        self.objects = self.dir / "objects"
        self.objects.mkdir(parents=True, exist_ok=True)
        self.manifest_path = self.dir / "manifest.json"
        if self.manifest_path.exists():
            self.manifest = json.loads(self.manifest_path.read_text(encoding="utf-8"))
        else:
            self.manifest = {}

    def lookup(self, key, inputs, params):
        entry = self.manifest.get(key)
        if entry is None or entry["inputs"] != inputs or entry["params"] != params:
            return None
        path = self.objects / entry["output"]
        if not path.exists():
            return None
        data = path.read_bytes()
        if _io.digest_bytes(data) != entry["output"]:
            return None
        return data

    def store(self, data):
        d = _io.digest_bytes(data)
        path = self.objects / d
        if not path.exists():
            tmp = path.with_suffix(".tmp")
            tmp.write_bytes(data)
            os.replace(tmp, path)
        return d

    def write_manifest(self):
        tmp = self.manifest_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(self.manifest, indent=1, sort_keys=True) + "\n", encoding="utf-8")
        os.replace(tmp, self.manifest_path)


def _pack_binned(grid, stats, kind):
    arrays = {}
    for c, (mean, std, extra) in stats.items():
        arrays[f"mean/{c}"] = mean
        arrays[f"std/{c}"] = std
        arrays[f"extra/{c}"] = extra
    return _io.pack({"kind": kind, "start_depth": grid.start_depth, "n_bins": grid.n_bins}, arrays)


def _unpack_binned(data):
    meta, a = _io.unpack(data)
    grid = DepthGrid(meta["start_depth"], meta["n_bins"])
    stats = {c: (a[f"mean/{c}"], a[f"std/{c}"], a[f"extra/{c}"]) for c in CHANNELS}
    return grid, stats


def _stage_bin(records, bounds):
    if len(records) == 0:
        raise DataError("no records inside the horizontal section")
    start = bounds.start
    lo = start + BIN_SIZE * math.floor((records.depth.min() - start) / BIN_SIZE + 1e-9)
    grid = DepthGrid.covering(lo, float(records.depth.max()))
    stats = {}
    for ci, c in enumerate(CHANNELS):
        m = records.channel == ci
        mean, std, count = bin_to_grid(records.depth[m], records.value[m], grid)
        stats[c] = (mean, std, count.astype(float))
    return _pack_binned(grid, stats, "binned")


def _stage_fill(binned):
    grid, stats = _unpack_binned(binned)
    out = {}
    for c, (mean, std, _count) in stats.items():
        filled, leading = forward_fill(mean)
        out[c] = (filled, std, leading.astype(float))
    return _pack_binned(grid, out, "filled")


def _stage_merge(filled, well, hole, bounds):
    grid, stats = _unpack_binned(filled)
    frame = WellFrame(well, hole, grid, {c: s[0] for c, s in stats.items()},
                      {c: s[1] for c, s in stats.items()}, np.full(grid.n_bins, np.nan),
                      bounds.bit_area, {c: s[2].astype(bool) for c, s in stats.items()})
    return frame.to_bytes()


def _stage_label(merged, intervals):
    frame = WellFrame.from_bytes(merged)
    labels = labels_to_grid(intervals, frame.grid)
    return WellFrame(frame.well_id, frame.hole_id, frame.grid, frame.channels,
                     frame.within_bin_std, labels, frame.bit_area, frame.leading_gap).to_bytes()


def _intervals_json(intervals):
    return [[iv.top, iv.bottom, iv.litho_class] for iv in sorted(intervals, key=lambda i: (i.top, i.bottom))]


def run_pipeline(config, jobs=1):
    """Run parse -> clip -> bin -> fill -> merge -> label with stage caching.

    Parameters
    ----------
    config : PipelineConfig, dict or path to a JSON config
    jobs : int
        Worker threads used across laterals.

    Returns
    -------
    PipelineResult
        Frames sorted by (well_id, hole_id), the manifest, and the list of
        stage keys that were actually executed in this run.
    """
    if isinstance(config, (str, Path)):
        config = PipelineConfig.from_file(config)
    elif isinstance(config, dict):
        config = PipelineConfig.from_dict(config)
    mwd_dir = config.path(config.mwd_dir)
    if not mwd_dir.is_dir():
        raise ConfigError(f"MWD directory not found: {mwd_dir}")
    try:
        bounds = parse_bounds(config.path(config.bounds))
        intervals = parse_lithology(config.path(config.lithology))
    except OSError as exc:
        raise ConfigError(str(exc)) from exc
    by_well = {}
    for iv in intervals:
        by_well.setdefault(iv.well_id, []).append(iv)

    cache = _Cache(config.path(config.cache_dir))
    executed = []
    updates = {}
    reports = []

    def run_stage(stage, key, inputs, params, fn):
        full = f"{key}:{stage}"
        hit = cache.lookup(full, inputs, params)
        if hit is not None:
            return hit
        try:
            data = fn()
        except DataError as exc:
            raise StageError(stage, key, exc) from exc
        except ValueError as exc:
            raise StageError(stage, key, exc) from exc
        digest = cache.store(data)
        updates[full] = {"inputs": inputs, "params": params, "output": digest,
                         "timestamp": datetime.now(timezone.utc).isoformat()}
        executed.append(full)
        return data

    files = sorted(p for p in mwd_dir.iterdir() if p.suffix == ".csv")
    parsed = []
    for path in files:
        file_digest = _io.digest_bytes(path.read_bytes())
        report = ParseReport(str(path))

        def do_parse(path=path, report=report):
            return parse_mwd(path, config.max_bad_fraction, report).to_bytes()

        data = run_stage("parse", f"file/{path.name}", [file_digest],
                         {"max_bad_fraction": config.max_bad_fraction}, do_parse)
        reports.append(report)
        parsed.append(data)

    laterals = []
    for data in parsed:
        recs = Records.from_bytes(data)
        missing = sorted(set(recs.well_id.tolist()) - set(bounds))
        if missing:
            raise StageError("clip", "bounds", f"no horizontal bounds for wells: {', '.join(missing)}")
        for well, hole in recs.laterals():
            m = (recs.well_id == well) & (recs.hole_id == hole)
            laterals.append((well, hole, _io.digest_bytes(data), recs.select(m)))
    seen = set()
    for well, hole, _, _ in laterals:
        if (well, hole) in seen:
            raise DataError(f"lateral {well}/{hole} appears in more than one MWD file")
        seen.add((well, hole))

    def process(item):
        well, hole, parse_digest, recs = item
        key = f"{well}/{hole}"
        b = bounds[well]
        bparams = {"start": b.start, "end": b.end}
        clipped = run_stage("clip", key, [parse_digest], bparams,
                            lambda: clip_horizontal(recs, {well: b}).to_bytes())
        binned = run_stage("bin", key, [_io.digest_bytes(clipped)], {"bin_size": BIN_SIZE, "start": b.start},
                           lambda: _stage_bin(Records.from_bytes(clipped), b))
        filled = run_stage("fill", key, [_io.digest_bytes(binned)], {"method": "forward"},
                           lambda: _stage_fill(binned))
        merged = run_stage("merge", key, [_io.digest_bytes(filled)], {"bit_area": b.bit_area},
                           lambda: _stage_merge(filled, well, hole, b))
        ivs = by_well.get(well, [])
        labeled = run_stage("label", key, [_io.digest_bytes(merged), _io.digest_json(_intervals_json(ivs))],
                            {"rule": "majority-length, tie->deeper"},
                            lambda: _stage_label(merged, ivs))
        return labeled

    if jobs > 1 and len(laterals) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outputs = list(pool.map(process, laterals))
    else:
        outputs = [process(item) for item in laterals]

    frames = []
    for (well, hole, _, _), data in sorted(zip(laterals, outputs), key=lambda t: (t[0][0], t[0][1])):
        frame = WellFrame.from_bytes(data)
        out = config.path(config.cache_dir) / _safe(well) / f"{_safe(hole)}.frame"
        out.parent.mkdir(parents=True, exist_ok=True)
        if not out.exists() or out.read_bytes() != data:
            out.write_bytes(data)
        frames.append(frame)

    cache.manifest.update(updates)
    if updates or not cache.manifest_path.exists():
        cache.write_manifest()
    executed.sort()
    return PipelineResult(frames, cache.manifest, executed, reports)


def _safe(name):
    return "".join(ch if ch.isalnum() or ch in "-_." else "_" for ch in str(name))


def load_frames(cache_dir):
    """Load every cached WellFrame under ``cache_dir`` sorted by (well, hole)."""
    frames = [WellFrame.load(p) for p in sorted(Path(cache_dir).glob("*/*.frame"))]
    return sorted(frames, key=lambda f: (f.well_id, f.hole_id))


# ---------------------------------------------------------------- writers

def _fmt(v):
    return "" if v is None or (isinstance(v, float) and math.isnan(v)) else repr(float(v))


def write_mwd_csv(path, rows):
    """Write MWD rows ``(well, hole, depth_m, {column: value-in-csv-units})``."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(MWD_HEADER)
        for well, hole, depth, cells in rows:
            w.writerow([well, hole, repr(float(depth))] + [_fmt(cells.get(c)) for c in MWD_HEADER[3:]])


def write_lithology_csv(path, intervals):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(LITHO_HEADER)
        for iv in intervals:
            w.writerow([iv.well_id, repr(float(iv.top)), repr(float(iv.bottom)), iv.litho_class])


def write_bounds_csv(path, bounds):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(BOUNDS_HEADER)
        for well in sorted(bounds):
            b = bounds[well]
            w.writerow([well, repr(float(b.start)), repr(float(b.end)), repr(float(b.bit_area))])
