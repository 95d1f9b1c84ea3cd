"""
Channel candidates and the sampling-phase penalty
=================================================

At sampling period T = 1/W a receiver sees L = floor(Ds W) taps of the
filtered response.  The gain it collects depends on where the samples fall;
the penalty compares the best and worst of M sampling phases.
"""
import numpy as np

from uwbsync import sigkit
from uwbsync.candidates import acquire, phase_penalty, tap_count
from uwbsync.chanmodel import ClusterModelParams, generate
from uwbsync.sigkit import ideal_lowpass

h = generate(ClusterModelParams(rng_seed=3), 1)[0].response

W = 32e6
hT = ideal_lowpass(h, W)
res = acquire(hT, 0.0)
print(f"W = {W / 1e6:g} MHz, L = {tap_count(h.delay_spread, W)} taps")
print(f"best window start k = {res.best_k}, "
      f"gain = {res.candidate.gain / sigkit.energy(hT):.3f} of the filtered energy")

# rays sit on single grid samples, so their spectrum is flat and a lowpass
# removes most of their energy; gains are shown relative to what it keeps.
# A narrow band is sensitive to the sampling phase, a wide one is not.
for W in (4e6, 16e6, 64e6, 256e6, 1024e6):
    rec = phase_penalty(h, W, eps=0.0)
    kept = sigkit.energy(ideal_lowpass(h, W))
    print(f"{W / 1e6:6.0f} MHz  gains/energy {np.round(rec.gains / kept, 3)}  "
          f"penalty {100 * rec.max_penalty:5.1f} %")
