"""Residual of the sketched rank-K factorization against the optimum.

For R = R_K + E the ratio ||C X - R||_F^2 / ||R - R_K||_F^2 is at least 1.
The script prints its quantiles at the heuristic sizes and at larger
sketch sizes, showing how the ratio approaches 1 as the sketches widen.

    python demos/04_bound.py
"""

import numpy as np

from rmusic import CovarianceMatrix, SketchConfig, rank_k_svd_via_sketch, svd_full
from rmusic.harness.experiments import low_rank_plus_noise

M, K, trials = 200, 3, 40
sizes = {
    "heuristic": lambda seed: SketchConfig.from_rank(K, seed=seed),
    "theorem": lambda seed: SketchConfig.theorem_scale(K, seed=seed),
    "wide": lambda seed: SketchConfig(s=10 * K, s0=60 * K, s1=30 * K, seed=seed),
}

for name, make in sizes.items():
    ratios = []
    for seed in range(trials):
        R = CovarianceMatrix(low_rank_plus_noise(M, K, 0.1, seed))
        best = float(np.sum(svd_full(R.R).singular_values[K:] ** 2))
        _, lra = rank_k_svd_via_sketch(R, make(seed), K)
        ratios.append(lra / best)
    cfg = make(0)
    q50, q95 = np.percentile(ratios, [50, 95])
    print(f"{name:>9} (s={cfg.s}, s1={cfg.s1}, s0={cfg.s0}): median {q50:7.3f}  q95 {q95:7.3f}")
