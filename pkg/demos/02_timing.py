"""Subspace-estimation time versus array size.

Times full-SVD MUSIC, block-Lanczos K-SVD, the Propagator and randomized
MUSIC for M in {100, 200, 400, 700} with K = 9, single-threaded BLAS, and
prints medians plus log-log slopes.

    python demos/02_timing.py
"""

from dataclasses import replace

import numpy as np

from rmusic.harness import default_config, run_timing_sweep
from rmusic.harness.config import SweepSpec

Ms = (100, 200, 400, 700)
cfg = replace(default_config("timing-vs-M"), sweep=SweepSpec(num_elements=Ms, repetitions=5))
records = run_timing_sweep(cfg)

# %% Table of medians (milliseconds)
methods = cfg.methods
print("M     " + "".join(f"{m:>12}" for m in methods))
for M in Ms:
    row = {r.method: r.elapsed_s for r in records if r.M == M}
    print(f"{M:<6}" + "".join(f"{1e3 * row[m]:12.2f}" for m in methods))

# %% Scaling exponents
for m in methods:
    t = [r.elapsed_s for r in records if r.method == m]
    print(f"{m:>10} slope {np.polyfit(np.log(Ms), np.log(t), 1)[0]:.2f}")
