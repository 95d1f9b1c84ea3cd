"""
Penalty versus bandwidth
========================

The Monte-Carlo sweep over the 4 ... 1024 MHz ladder.  Pass a count as the
first argument for more realizations (100 takes well under a minute).
"""
import sys

from uwbsync.experiment import SweepConfig, run_sweep, summary_table

count = int(sys.argv[1]) if len(sys.argv) > 1 else 20
report = run_sweep(SweepConfig(realizations=count, master_seed=7))
print(summary_table(report))
