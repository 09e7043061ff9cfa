"""Derived channels, the windowed bit-rock model fit, and a feature matrix.

Run: python demos/02_features_and_bit_rock_fit.py
"""
import numpy as np

from rocktype import ChannelId, FeatureSpec, SynthWellSpec, assemble_matrix, compute_apr
from rocktype.features import fit_bit_rock_model, fit_bit_rock_series
from rocktype.synth import gen_well

# noiseless well: torque follows the bit-rock model exactly, so the
# windowed fit recovers the rock coefficients
spec = SynthWellSpec(n_bins=300, seed=1).noiseless()
frame = gen_well(spec)
wob, trq = frame[ChannelId.WOB], frame[ChannelId.TRQ]
omega = frame[ChannelId.RPM]

fit = fit_bit_rock_model(wob[:5], trq[:5], omega[:5])
print(f"first window: b = {fit.b}, rms {fit.residual_rms:.2e}, ok {fit.window_ok}")

b, rms, ok = fit_bit_rock_series(wob, trq, omega, m=5)
for cls, name in ((0, "sand"), (1, "shale")):
    sel = ok & (frame.labels == cls)
    if sel.any():
        print(f"{name:>5}: median b over {sel.sum()} windows = {np.median(b[sel], axis=0)}")

apr = compute_apr(frame[ChannelId.ROP], wob, trq)
print(f"APR range {np.nanmin(apr):.3g} .. {np.nanmax(apr):.3g}")

fs = FeatureSpec.parse("B+D+L+M")
m = assemble_matrix([gen_well(SynthWellSpec(n_bins=300, seed=2))], fs)
print(f"feature matrix: {len(m)} rows x {len(m.columns)} columns")
print("first columns:", ", ".join(m.columns[:8]), "...")
