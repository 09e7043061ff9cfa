import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rocktype.core import (BIN_SIZE, CHANNELS, ChannelId, DataError, DepthGrid, LabeledBins,
                           WellFrame, class_share)

from conftest import make_frame


def test_eight_unique_channels():
    assert len(CHANNELS) == 8
    assert len({c.value for c in CHANNELS}) == 8
    assert ChannelId("WOB") is ChannelId.WOB


@pytest.mark.parametrize("labels, expected", [
    ([1, 1, 1], 1.0),
    ([0, 0, 0, 1], 0.25),
    ([0, np.nan, 1], 0.5),
])
def test_class_share(labels, expected):
    frame = make_frame(len(labels), labels=labels)
    assert class_share(frame) == expected


def test_class_share_requires_labels():
    with pytest.raises(DataError):
        class_share(make_frame(3, labels=[np.nan] * 3))


def test_grid_bins():
    g = DepthGrid(1000.0, 5)
    assert g.bin_size == BIN_SIZE
    assert g.depth_of(3) == pytest.approx(1000.3)
    assert g.index_of(1000.05) == 0
    assert g.index_of(1000.1) == 1
    with pytest.raises(ValueError):
        DepthGrid(0.0, 0)


@given(st.floats(0, 5000, allow_nan=False).map(lambda x: round(x, 1)), st.integers(1, 3000))
@settings(max_examples=200, deadline=None)
def test_index_depth_inverse(start, n):
    g = DepthGrid(start, n)
    i = np.arange(n)
    assert np.array_equal(g.index_of(g.depth_of(i)), i)


def test_frame_roundtrip_keeps_missing():
    frame = make_frame(40, seed=3)
    chans = {c: np.array(frame[c]) for c in CHANNELS}
    chans[ChannelId.ROP][[0, 5, 6]] = np.nan
    labels = np.array(frame.labels)
    labels[10:13] = np.nan
    frame = WellFrame("W9", "H2", frame.grid, chans, frame.within_bin_std, labels, 0.03)
    back = WellFrame.from_bytes(frame.to_bytes())
    assert back.equals(frame)
    assert np.isnan(back[ChannelId.ROP][5])
    assert np.isnan(back.labels[11])
    assert frame.to_bytes() == back.to_bytes()


def test_frame_invariants():
    frame = make_frame(10)
    with pytest.raises(ValueError):
        WellFrame("W", "H", DepthGrid(0.0, 10), {ChannelId.WOB: np.ones(9)}, {}, np.zeros(10), 1.0)
    with pytest.raises(ValueError):
        WellFrame("W", "H", DepthGrid(0.0, 10), {}, {ChannelId.WOB: -np.ones(10)}, np.zeros(10), 1.0)
    with pytest.raises(ValueError):
        WellFrame("W", "H", DepthGrid(0.0, 10), {}, {}, np.zeros(10), 0.0)
    with pytest.raises(ValueError):
        frame[ChannelId.WOB][0] = 1.0  # frames are immutable


def test_labeled_bins_validation():
    with pytest.raises(ValueError):
        LabeledBins([1.0, 0.0], [0, 1], [0.1, 0.2])
    with pytest.raises(ValueError):
        LabeledBins([1.0], [0, 1], [0.1, 0.2])
