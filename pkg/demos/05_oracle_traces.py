"""
Why the gain approaches the channel energy
==========================================

Three gaps separate the channel energy from the gain of a candidate: the
energy removed by the lowpass, the shift by the sampling offset, and the
Riemann sum that replaces the integral.  Each is traced on its own ladder,
and together they bound the total gap.
"""
import numpy as np

from uwbsync.chanmodel import ClusterModelParams, generate
from uwbsync.oracle import (approximation1_trace, approximation2_trace, approximation3_trace,
                            combination_check, smooth_impulse_response)
from uwbsync.sigkit import ideal_lowpass

ds = 279e-9
h = generate(ClusterModelParams(rng_seed=1), 1)[0].response

tr1 = approximation1_trace(h, 4e6 * 2.0 ** np.arange(9))
print("lowpass deficit     :", np.round(tr1.discrepancy, 4))

hT = ideal_lowpass(h, 64e6)
tr2 = approximation2_trace(hT, (1 / 64e6) * 0.5 ** np.arange(1, 7))
print("translation gap     :", np.array2string(tr2.discrepancy, precision=2))

rng = np.random.default_rng(0)
smooth = ideal_lowpass(smooth_impulse_response(rng, ds, h.signal.grid_step), 32e6)
tr3 = approximation3_trace(smooth, 0.3 / 32e6, ds / 2.0 ** np.arange(8, 13))
print("Riemann gap         :", np.array2string(tr3.discrepancy, precision=2))
print(f"  rung ratios {np.round(tr3.ratios, 2)}, fitted order {tr3.order:.3f}")

chk = combination_check(h, 256e6, 0.4 / 256e6)
print(f"total gap {chk.gap:.4f} <= {' + '.join(f'{t:.4f}' for t in chk.terms)} = {chk.bound:.4f}")
