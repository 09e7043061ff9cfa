import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rocktype.core import ChannelId, ConfigError, DataError, DepthGrid
from rocktype.ingest import (LithoInterval, ParseReport, RawRecord, Records, StageError, WellBounds,
                             bin_to_grid, clip_horizontal, forward_fill, labels_to_grid, parse_mwd,
                             run_pipeline, write_bounds_csv, write_lithology_csv)
from rocktype.synth import SynthWellSpec, gen_benchmark, write_raw

HEADER = "well_id,hole_id,depth_m,wob_kn,trq_knm,rop_mh,rpm,q_in_lmin,q_out_lmin,spp_bar,hl_kn\n"


def write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_parse_empty_file(tmp_path):
    report = ParseReport("")
    assert len(parse_mwd(write(tmp_path / "a.csv", ""), report=report)) == 0
    assert report.bad_rows == []


def test_parse_unit_conversion(tmp_path):
    p = write(tmp_path / "a.csv", "well_id,hole_id,depth_m,wob_kn\nW1,H1,1000.05,12.5\n")
    recs = list(parse_mwd(p))
    assert recs == [RawRecord("W1", "H1", 1000.05, ChannelId.WOB, 12500.0)]


def test_parse_all_units(tmp_path):
    p = write(tmp_path / "a.csv", HEADER + "W1,H1,1.0,1,1,3600,60,60000,60000,1,1\n")
    got = {r.channel: r.value for r in parse_mwd(p)}
    assert got == {ChannelId.WOB: 1e3, ChannelId.TRQ: 1e3, ChannelId.ROP: 1.0, ChannelId.RPM: 1.0,
                   ChannelId.QIN: 1.0, ChannelId.QOUT: 1.0, ChannelId.SPP: 1e5, ChannelId.HL: 1e3}


def test_parse_skips_bad_row(tmp_path):
    p = write(tmp_path / "a.csv", "well_id,hole_id,depth_m,wob_kn\n"
              "W1,H1,1.0,10\nW1,H1,1.1,abc\nW1,H1,1.2,11\n")
    report = ParseReport("")
    recs = parse_mwd(p, report=report)
    assert len(recs) == 2
    assert [line for line, _ in report.bad_rows] == [3]


def test_parse_too_many_bad_rows(tmp_path):
    p = write(tmp_path / "a.csv", "well_id,hole_id,depth_m,wob_kn\n"
              "W1,H1,1.0,x\nW1,H1,1.1,y\nW1,H1,1.2,11\n")
    with pytest.raises(DataError, match=r"a\.csv:2"):
        parse_mwd(p)


def test_parse_unknown_column(tmp_path):
    p = write(tmp_path / "a.csv", "well_id,hole_id,depth_m,vibration\nW1,H1,1.0,3\n")
    with pytest.raises(DataError, match="vibration"):
        parse_mwd(p)


def test_parse_unreadable(tmp_path):
    with pytest.raises(DataError):
        parse_mwd(tmp_path / "missing.csv")


def _recs(depths, well="W1"):
    return Records([well] * len(depths), ["H1"] * len(depths), depths, [0] * len(depths),
                   np.ones(len(depths)))


def test_clip_boundaries():
    out = clip_horizontal(_recs([999.9, 1000.0, 1200.0]), {"W1": (1000.0, 1100.0)})
    assert out.depth.tolist() == [1000.0]
    recs = _recs([1.0, 5.0])
    assert clip_horizontal(recs, {"W1": (0.0, math.inf)}).depth.tolist() == [1.0, 5.0]
    assert len(clip_horizontal(Records(), {})) == 0


def test_clip_missing_bounds():
    with pytest.raises(DataError, match="W2"):
        clip_horizontal(_recs([1.0], well="W2"), {"W1": WellBounds(0, 10)})


def test_bin_to_grid():
    g = DepthGrid(0.0, 3)
    mean, std, count = bin_to_grid([0.01, 0.05, 0.12], [4.0, 6.0, 7.0], g)
    assert mean[:2].tolist() == [5.0, 7.0] and std[:2].tolist() == [1.0, 0.0]
    assert np.isnan(mean[2]) and np.isnan(std[2])
    assert count.tolist() == [2, 1, 0]


@given(st.lists(st.floats(0, 9.99), min_size=0, max_size=200))
@settings(max_examples=100, deadline=None)
def test_bin_counts_preserve_mass(depths):
    g = DepthGrid(0.0, 100)
    _, _, count = bin_to_grid(depths, np.ones(len(depths)), g)
    assert count.sum() == len(depths)


def test_forward_fill_examples():
    filled, leading = forward_fill([np.nan, 5, np.nan, 7])
    assert np.isnan(filled[0]) and filled[1:].tolist() == [5, 5, 7]
    assert leading.tolist() == [True, False, False, False]
    assert forward_fill([3, np.nan, np.nan, np.nan])[0].tolist() == [3, 3, 3, 3]
    x = np.arange(5.0)
    assert np.array_equal(forward_fill(x)[0], x)


@given(st.lists(st.one_of(st.just(float("nan")), st.floats(-1e6, 1e6)), max_size=100))
@settings(max_examples=200, deadline=None)
def test_forward_fill_leaves_only_leading_gaps(values):
    filled, leading = forward_fill(values)
    assert np.array_equal(np.isnan(filled), leading)
    if leading.any():
        assert leading[: int(leading.sum())].all()


def test_labels_majority_rule():
    g = DepthGrid(1000.0, 3)
    assert labels_to_grid([LithoInterval("W", 1000.0, 1000.3, 1)], g).tolist() == [1, 1, 1]
    ivs = [LithoInterval("W", 999.0, 1000.07, 0), LithoInterval("W", 1000.07, 1001.0, 1)]
    assert labels_to_grid(ivs, g).tolist() == [0, 1, 1]


def test_labels_tie_goes_deeper():
    g = DepthGrid(0.0, 1)
    ivs = [LithoInterval("W", 0.0, 0.05, 1), LithoInterval("W", 0.05, 0.1, 0)]
    assert labels_to_grid(ivs, g).tolist() == [0]


def test_labels_gap_is_missing():
    g = DepthGrid(0.0, 5)
    ivs = [LithoInterval("W", 0.0, 0.1, 0), LithoInterval("W", 0.3, 0.5, 1)]
    out = labels_to_grid(ivs, g)
    assert out[0] == 0 and np.isnan(out[1:3]).all() and out[3:].tolist() == [1, 1]


def test_labels_overlap_conflict():
    ivs = [LithoInterval("W", 0.0, 1.0, 0), LithoInterval("W", 0.5, 2.0, 1)]
    with pytest.raises(DataError, match="overlapping"):
        labels_to_grid(ivs, DepthGrid(0.0, 10))


@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0.01, 3)), max_size=6))
@settings(max_examples=150, deadline=None)
def test_labels_never_assigned_without_overlap(raw):
    ivs, bottom = [], 0.0
    for gap, length in raw:  # disjoint same-class intervals
        top = bottom + gap
        ivs.append(LithoInterval("W", top, top + length, 1))
        bottom = top + length
    g = DepthGrid(0.0, 400)
    out = labels_to_grid(ivs, g)
    tops = g.depths
    overlap = np.zeros(g.n_bins)
    for iv in ivs:
        overlap += np.clip(np.minimum(tops + 0.1, iv.bottom) - np.maximum(tops, iv.top), 0, None)
    labeled = ~np.isnan(out)
    assert (overlap[labeled] > 0).all()
    assert labeled[overlap > 1e-6].all()


def test_litho_interval_validates():
    with pytest.raises(ValueError):
        LithoInterval("W", 2.0, 1.0, 0)


# ---------------------------------------------------------------- pipeline

@pytest.fixture()
def raw_tree(tmp_path):
    frames = gen_benchmark(2, SynthWellSpec(n_bins=150), seed=3, share_range=(0.0, 1.0))
    write_raw(frames, tmp_path)
    return tmp_path, frames


def test_pipeline_reproduces_frames_and_caches(raw_tree):
    root, frames = raw_tree
    res = run_pipeline({"root": str(root)})
    assert [(f.well_id, f.hole_id) for f in res.frames] == [("W01", "H1"), ("W02", "H1")]
    for got, want in zip(res.frames, frames):
        np.testing.assert_array_equal(got.labels, want.labels)
        np.testing.assert_allclose(got[ChannelId.TRQ], want[ChannelId.TRQ], rtol=1e-12)
    assert len(res.executed) == 2 * 6
    again = run_pipeline({"root": str(root)})
    assert again.executed == []
    assert all(a.to_bytes() == b.to_bytes() for a, b in zip(res.frames, again.frames))
    manifest = json.loads((root / "cache" / "manifest.json").read_text())
    assert set(manifest) == set(res.executed)
    assert (root / "cache" / "W01" / "H1.frame").exists()


def test_pipeline_reruns_only_changed_well(raw_tree):
    root, _ = raw_tree
    run_pipeline({"root": str(root)})
    path = root / "raw" / "mwd" / "W02_H1.csv"
    text = path.read_text().splitlines(keepends=True)
    cells = text[1].rstrip("\n").split(",")
    cells[3] = repr(float(cells[3]) * 1.01)
    text[1] = ",".join(cells) + "\n"
    path.write_text("".join(text))
    res = run_pipeline({"root": str(root)})
    assert "file/W02_H1.csv:parse" in res.executed
    assert res.executed and all("W02" in k for k in res.executed)


def test_pipeline_two_laterals(tmp_path):
    mwd = tmp_path / "raw" / "mwd"
    mwd.mkdir(parents=True)
    rows = "".join(f"W1,{h},{1000 + 0.05 * i:.2f},10,2,20,90,2000,1990,150,900\n"
                   for h in ("H1", "H2") for i in range(40))
    write(mwd / "w1.csv", HEADER + rows)
    write_lithology_csv(tmp_path / "raw" / "lithology.csv", [LithoInterval("W1", 990.0, 1010.0, 0)])
    write_bounds_csv(tmp_path / "raw" / "bounds.csv", {"W1": WellBounds(1000.0, 1001.95, 0.04)})
    res = run_pipeline({"root": str(tmp_path)})
    assert [(f.well_id, f.hole_id) for f in res.frames] == [("W1", "H1"), ("W1", "H2")]
    assert res.frames[0].n_bins == 20


def test_pipeline_stage_error_names_stage(tmp_path):
    mwd = tmp_path / "raw" / "mwd"
    mwd.mkdir(parents=True)
    write(mwd / "w1.csv", HEADER + "W1,H1,1000.0,10,2,20,90,2000,1990,150,900\n")
    write_lithology_csv(tmp_path / "raw" / "lithology.csv", [LithoInterval("W1", 990.0, 1010.0, 0)])
    write_bounds_csv(tmp_path / "raw" / "bounds.csv", {"W9": WellBounds(0.0, 1.0, 0.04)})
    with pytest.raises(StageError, match="clip") as info:
        run_pipeline({"root": str(tmp_path)})
    assert "W1" in str(info.value)


def test_pipeline_missing_inputs(tmp_path):
    with pytest.raises(ConfigError):
        run_pipeline({"root": str(tmp_path)})
