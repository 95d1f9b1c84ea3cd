"""
Random multipath channels
=========================

Cluster-model impulse responses on the dense grid, written to and read
back from the text CIR format.
"""
import tempfile
from pathlib import Path

import numpy as np

from uwbsync.chanmodel import ClusterModelParams, export, generate, ingest

params = ClusterModelParams(rng_seed=7)
records = generate(params, 20)

rec = records[0]
sig = rec.response.signal
taps = np.flatnonzero(sig.samples)
print(f"realization {rec.id}: {rec.meta['clusters']} clusters, {taps.size} nonzero taps "
      f"spread over {1e9 * sig.times[taps[-1]]:.1f} ns")

# mean power in 20 ns bins shows the exponential decay
power = np.mean([np.abs(r.response.signal.samples) ** 2 for r in records], axis=0)
width = int(round(20e-9 / sig.grid_step))
for k in range(0, power.size // width):
    share = power[k * width:(k + 1) * width].sum() / power.sum()
    print(f"{20 * k:4d}-{20 * k + 20:<4d} ns  " + "#" * int(round(200 * share)))

with tempfile.TemporaryDirectory() as tmp:
    path = Path(tmp) / "channels.cir"
    export(records, path)
    print(path.read_text().splitlines()[:4])
    back = ingest(path)
    err = max(np.max(np.abs(a.response.signal.samples - b.response.signal.samples))
              for a, b in zip(records, back))
    print(f"round trip of {len(back)} records, max sample error {err:.1e}")
