import numpy as np
import pytest

from rocktype.core import CHANNELS, ChannelId, DataError
from rocktype.features import fit_bit_rock_series
from rocktype.synth import (SAND_ROCK, SHALE_ROCK, RockParams, SynthWellSpec, gen_benchmark,
                            gen_lithology, gen_telemetry, gen_well, litho_intervals)


def runs(x):
    edges = np.flatnonzero(np.diff(x)) + 1
    return np.diff(np.r_[0, edges, len(x)])


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthWellSpec(p_switch=(1.5, 0.1))
    with pytest.raises(ValueError):
        SynthWellSpec(min_run=0)
    with pytest.raises(ValueError):
        SynthWellSpec(rocks=(SAND_ROCK, SAND_ROCK))
    with pytest.raises(ValueError):
        RockParams(1.0, -1.0, 1.0, 1.0, 1.0)


def test_absorbing_chain():
    for seed in range(5):
        x = gen_lithology(SynthWellSpec(n_bins=500, p_switch=(0.0, 0.0), seed=seed))
        assert len(set(x.tolist())) == 1


def test_iid_chain_share():
    spec = SynthWellSpec(n_bins=100_000, p_switch=(0.5, 0.5), min_run=1, seed=1)
    x = gen_lithology(spec)
    sigma = np.sqrt(0.25 / spec.n_bins)
    assert abs(x.mean() - spec.stationary_share()) < 3 * sigma


def test_correlated_chain_share():
    p = 0.05
    spec = SynthWellSpec(n_bins=200_000, p_switch=(p, p), min_run=1, seed=2)
    x = gen_lithology(spec)
    rho = 1 - 2 * p  # lag-one autocorrelation of a symmetric two-state chain
    sigma = np.sqrt(0.25 / spec.n_bins * (1 + rho) / (1 - rho))
    assert abs(x.mean() - 0.5) < 3 * sigma


def test_min_run_respected():
    x = gen_lithology(SynthWellSpec(n_bins=20_000, p_switch=(0.2, 0.3), min_run=30, seed=3))
    r = runs(x)
    assert r[:-1].min() >= 30


def test_stationary_share_matches_default_target():
    assert 0.10 <= SynthWellSpec().stationary_share() <= 0.17


def test_constant_inputs_give_constant_rop():
    spec = SynthWellSpec(n_bins=100, wob_step=0.0, omega_step=0.0).noiseless()
    frame = gen_telemetry(np.zeros(100, int), spec, np.random.default_rng(0))
    wob, omega, rop = frame[ChannelId.WOB], frame[ChannelId.RPM], frame[ChannelId.ROP]
    assert np.ptp(wob) == 0 and np.ptp(omega) == 0
    a = SAND_ROCK
    assert np.all(rop == a.a1 + a.a2 * wob[0] + a.a3 * omega[0])


def test_noiseless_physics_holds_exactly():
    spec = SynthWellSpec(n_bins=500).noiseless()
    frame = gen_well(spec)
    y = frame.labels.astype(int)
    a = np.stack([r.as_array() for r in spec.rocks])[y]
    wob, om, rop, trq = (frame[c] for c in (ChannelId.WOB, ChannelId.RPM, ChannelId.ROP, ChannelId.TRQ))
    assert np.max(np.abs(rop - (a[:, 0] + a[:, 1] * wob + a[:, 2] * om)) / rop) < 1e-12
    assert np.max(np.abs(trq - (a[:, 3] * rop / om + a[:, 4])) / trq) < 1e-12
    assert not any(np.isnan(frame[c]).any() for c in CHANNELS)


def test_noiseless_fit_recovers_reduced_parameters():
    spec = SynthWellSpec(n_bins=600).noiseless()
    frame = gen_well(spec)
    m = 5
    b, _, ok = fit_bit_rock_series(frame[ChannelId.WOB], frame[ChannelId.TRQ], frame[ChannelId.RPM], m)
    y = frame.labels.astype(int)
    planted = np.stack([r.b for r in spec.rocks])
    pure = np.array([i >= m - 1 and len(set(y[i - m + 1:i + 1])) == 1 for i in range(len(y))])
    assert ok[pure].all()
    np.testing.assert_allclose(b[pure], planted[y[pure]], rtol=1e-6)


def test_omega_positive_and_missing_rate():
    frame = gen_well(SynthWellSpec(n_bins=800, missing_rate=0.05, seed=4))
    om = frame[ChannelId.RPM]
    assert np.nanmin(om) > 0
    share = np.mean([np.isnan(frame[c]).mean() for c in CHANNELS])
    assert 0.04 < share < 0.2


def test_rock_switch_visible_in_telemetry():
    frame = gen_well(SynthWellSpec(n_bins=5000, seed=5))
    y = frame.labels == 1
    for c in (ChannelId.TRQ, ChannelId.ROP):
        v = frame[c]
        assert abs(np.mean(v[y]) - np.mean(v[~y])) > 0.05 * np.mean(v)


def test_benchmark_share_and_determinism():
    a = gen_benchmark(8, SynthWellSpec(n_bins=300), seed=7)
    b = gen_benchmark(8, SynthWellSpec(n_bins=300), seed=7)
    assert [f.well_id for f in a] == [f"W0{i}" for i in range(1, 9)]
    share = np.concatenate([f.labels for f in a]).mean()
    assert 0.10 <= share <= 0.17
    assert all(x.equals(y) for x, y in zip(a, b))
    with pytest.raises(ValueError):
        gen_benchmark(1)
    with pytest.raises(DataError, match="share"):
        gen_benchmark(2, SynthWellSpec(n_bins=50), share_range=(0.99, 1.0), max_retries=3)


def test_zero_jitter_shares_rock_params():
    spec = SynthWellSpec(n_bins=300).noiseless()
    frames = gen_benchmark(3, spec, seed=1, jitter=0.0, share_range=(0.0, 1.0))
    for frame in frames:
        b, _, ok = fit_bit_rock_series(frame[ChannelId.WOB], frame[ChannelId.TRQ], frame[ChannelId.RPM])
        sand = ok & (np.convolve(frame.labels, np.ones(5), "full")[: frame.n_bins] == 0)
        sand[:4] = False
        np.testing.assert_allclose(b[sand], np.broadcast_to(SAND_ROCK.b, b[sand].shape), rtol=1e-6)


def test_litho_intervals_cover_labels():
    frame = gen_well(SynthWellSpec(n_bins=300, seed=6))
    ivs = litho_intervals(frame)
    assert sum(round((iv.bottom - iv.top) / 0.1) for iv in ivs) == 300
    assert all(a.bottom == pytest.approx(b.top) for a, b in zip(ivs, ivs[1:]))
