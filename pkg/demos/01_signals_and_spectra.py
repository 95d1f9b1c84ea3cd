"""
Dense signals, spectra and bandlimiting
=======================================

A response lives on a fine time grid.  Its energy is the same in time and
frequency, an ideal lowpass keeps only the band [-W/2, W/2), and the
filtered record can be evaluated between grid points.
"""
import numpy as np

from uwbsync import sigkit
from uwbsync.sigkit import DenseSignal

dt = 1 / (16 * 1024e6)          # about 61 ps
t = np.arange(4096) * dt

# two Gaussian pulses, one of them modulated
x = np.exp(-0.5 * ((t - 80e-9) / 1e-9) ** 2) \
    + 0.5 * np.exp(-0.5 * ((t - 150e-9) / 0.4e-9) ** 2 + 2j * np.pi * 300e6 * t)
sig = DenseSignal(x, dt)

spec = sigkit.dft(sig)
print(f"energy in time      : {sigkit.energy(sig):.6e}")
print(f"energy in frequency : {spec.energy:.6e}")

# the narrower, modulated pulse loses most of its energy first
for W in (64e6, 256e6, 1024e6):
    kept = sigkit.energy(sigkit.ideal_lowpass(sig, W)) / sigkit.energy(sig)
    print(f"W = {W / 1e6:6.0f} MHz keeps {100 * kept:5.1f} % of the energy")

# off-grid evaluation agrees with a half-sample delay of the record
low = sigkit.ideal_lowpass(sig, 256e6)
shifted = sigkit.delay(low, dt / 2)
probe = t[1000:1005]
print("sample_at(t - dt/2) vs delay(., dt/2):",
      np.max(np.abs(sigkit.sample_at(low, probe - dt / 2) - sigkit.sample_at(shifted, probe))))
