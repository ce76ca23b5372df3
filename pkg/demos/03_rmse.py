"""DoA RMSE versus SNR, broadside and edge regions.

Twenty Monte Carlo trials per point keep the run short; the CLI
(`rmusic rmse`) runs the full 100-trial sweep.

    python demos/03_rmse.py
"""

from dataclasses import replace

from rmusic.harness import default_config, run_rmse_sweep
from rmusic.harness.config import SceneTemplate, SweepSpec

base = replace(default_config("rmse-vs-snr"), trials=20, sweep=SweepSpec(snr_db=(-5.0, 0.0, 10.0, 20.0)))


def table(cfg, title):
    recs = run_rmse_sweep(cfg)
    print(title)
    print("SNR   " + "".join(f"{m:>12}" for m in cfg.methods))
    for snr in cfg.sweep.snr_db:
        row = {r.method: r.rmse_deg for r in recs if r.snr_db == snr}
        print(f"{snr:<6g}" + "".join(f"{row[m]:12.4f}" for m in cfg.methods))


# %% Sources drawn in [-60, 60] degrees, K = 9
table(base, "default region, M=200, K=9 (RMSE in degrees)")

# %% Two sources near endfire: the Propagator keeps an error floor
edge = replace(base, methods=("music", "rmusic", "propagator"),
               scene=SceneTemplate(num_elements=200, num_targets=2, preset="edge"))
table(edge, "\nedge region [70, 88], M=200, K=2 (RMSE in degrees)")
