"""End-to-end acceptance criteria.

Each test prints one ``[ACCEPT]`` line with its threshold and the measured
value, and the lines are repeated in the pytest terminal summary. Run with::

    pytest -m acceptance -s tests/test_acceptance.py
"""

import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES, crandn, random_psd
from rmusic import (
    AngularGrid,
    ArrayGeometry,
    CovarianceMatrix,
    SketchConfig,
    composite_sketch,
    count_sketch,
    exact_music_subspace,
    gaussian_sketch,
    generate_snapshots,
    make_scene,
    principal_angles,
    qr_thin,
    rmusic_subspace,
    spectrum_from_noise_basis,
    spectrum_from_signal_basis,
    svd_full,
)
from rmusic.harness.config import BoundSpec, SceneTemplate, SketchSpec, SweepSpec, default_config
from rmusic.harness.experiments import bound_summary, demo_trial, run_bound_check, run_rmse_sweep, run_timing_sweep
from rmusic.numerics import orthonormality_error

pytestmark = pytest.mark.acceptance


def report(num, title, ok, detail):
    line = f"[ACCEPT] {num}. {title}: {'PASS' if ok else 'FAIL'} ({detail})"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def slope(x, y):
    return float(np.polyfit(np.log(x), np.log(y), 1)[0])


def test_1_spectrum_demo_peak_sets():
    cfg = replace(default_config("spectrum-demo"), methods=("music", "rmusic"))
    within = equal = 0
    for seed in range(100):
        res = demo_trial(cfg, seed)
        r, m = res.estimates["rmusic"], res.estimates["music"]
        within += r.complete and bool(np.all(np.abs(r.angles_deg - res.scene.doas_deg) <= 0.3))
        equal += r.complete and m.complete and np.array_equal(r.angles_deg, m.angles_deg)
    ok = within >= 95 and equal >= 95
    report(1, "R-MUSIC peaks within 0.3 deg and equal to exact MUSIC on >= 95/100 seeds", ok,
           f"within 0.3 deg: {within}/100, identical peak set: {equal}/100")


@pytest.mark.parametrize("eta", [0.25, 0.5, 0.75])
def test_2_rmse_parity(eta):
    cfg = replace(
        default_config("rmse-vs-snr"),
        methods=("music", "rmusic"),
        sketch=SketchSpec(eta=eta),
        sweep=SweepSpec(snr_db=(0.0, 5.0, 10.0)),
    )
    recs = {(r.method, r.snr_db): r.rmse_deg for r in run_rmse_sweep(cfg)}
    parts, ok = [], True
    for snr in (0.0, 5.0, 10.0):
        music, rm = recs["music", snr], recs["rmusic", snr]
        ok &= rm <= 1.2 * music + 0.05
        parts.append(f"{snr:g} dB: {rm:.4f} vs limit {1.2 * music + 0.05:.4f}")
    report(2, f"RMSE(R-MUSIC) <= 1.2 RMSE(MUSIC) + 0.05 deg, eta={eta}", ok, "; ".join(parts))


def test_3_propagator_edge_region():
    cfg = replace(
        default_config("rmse-vs-snr"),
        methods=("music", "rmusic", "propagator"),
        scene=SceneTemplate(num_elements=200, num_targets=2, preset="edge"),
        sweep=SweepSpec(snr_db=(10.0,)),
    )
    rec = {r.method: r.rmse_deg for r in run_rmse_sweep(cfg)}
    ok = rec["propagator"] >= 3 * rec["rmusic"]
    report(3, "edge preset, 10 dB: RMSE(Propagator) >= 3 RMSE(R-MUSIC)", ok,
           f"propagator {rec['propagator']:.3f} deg, rmusic {rec['rmusic']:.3f} deg, music {rec['music']:.3f} deg")


def test_4_theorem_scale_residual_bound():
    cfg = replace(
        default_config("bound-check"),
        bound=BoundSpec(ranks=(3, 9), residual_ratio=0.1, sizes=("theorem", "heuristic")),
    )
    summary = list(bound_summary(run_bound_check(cfg)))
    q95 = {(row[0], row[1]): row[5] for row in summary}
    theorem = {K: q95[K, "theorem"] for K in (3, 9)}
    ok = all(v <= 2.0 for v in theorem.values())
    detail = ", ".join(f"K={K} q95={v:.3f}" for K, v in theorem.items())
    detail += "; heuristic sizes (reported only): " + ", ".join(f"K={K} q95={q95[K, 'heuristic']:.3f}" for K in (3, 9))
    report(4, "theorem-scale 95th-percentile residual ratio <= 2.0", ok, detail)


def test_5_timing_ratio_and_slopes():
    Ms = (200, 400, 700, 1000)
    cfg = replace(
        default_config("timing-vs-M"),
        methods=("music", "rmusic", "propagator"),
        threads=1,
        sweep=SweepSpec(num_elements=Ms, repetitions=5, warmup=1),
    )
    t = {(r.method, r.M): r.elapsed_s for r in run_timing_sweep(cfg)}
    music = [t["music", M] for M in Ms]
    rm = [t["rmusic", M] for M in Ms]
    ratio = music[-1] / rm[-1]
    s_music, s_rm, s_prop = slope(Ms, music), slope(Ms, rm), slope(Ms, [t["propagator", M] for M in Ms])
    ok = ratio >= 10 and 2.3 <= s_music <= 3.5 and s_rm <= 2.3
    report(5, "M=1000 speedup >= 10x, full-SVD slope in [2.3, 3.5], R-MUSIC slope <= 2.3", ok,
           f"speedup {ratio:.1f}x, slopes music {s_music:.2f}, rmusic {s_rm:.2f}, propagator {s_prop:.2f} (reported)")


def test_6_k_sweep_mildness():
    cfg = replace(
        default_config("timing-vs-K"),
        methods=("rmusic", "ksvd"),
        threads=1,
        sweep=SweepSpec(num_targets=(5, 30), repetitions=7, warmup=1),
    )
    t = {(r.method, r.K): r.elapsed_s for r in run_timing_sweep(cfg)}
    r_rm = t["rmusic", 30] / t["rmusic", 5]
    r_ks = t["ksvd", 30] / t["ksvd", 5]
    ok = r_rm <= 3.0 and r_ks > r_rm
    report(6, "M=700: R-MUSIC time K=30/K=5 <= 3 and below the exact K-SVD ratio", ok,
           f"rmusic {r_rm:.2f}x, ksvd {r_ks:.2f}x")


def test_7_oracle_equivalence_on_rank_k():
    worst = 0.0
    for seed in range(100):
        g = np.random.default_rng(seed)
        R = random_psd(g, 50, 3)
        ref, _ = exact_music_subspace(R, 3)
        for eta in (0.25, 0.5, 0.75):
            est = rmusic_subspace(R, 3, SketchConfig.from_rank(3, eta, seed=seed))
            worst = max(worst, float(principal_angles(est.basis, ref.basis).max()))
    report(7, "rank-K inputs: max principal angle R-MUSIC vs exact MUSIC < 1e-6 rad", worst < 1e-6,
           f"worst over 100 seeds x 3 eta: {worst:.2e} rad")


def test_8_structural_invariants():
    g = np.random.default_rng(2024)
    checks = {}

    S = count_sketch(500, 17, seed=3).toarray()
    checks["count-sketch rows"] = bool(np.all(np.count_nonzero(S, axis=1) == 1) and set(np.unique(S[S != 0])) <= {-1, 1})

    Y = generate_snapshots(make_scene(40, 4, 0.0, seed=1), seed=1)
    R = CovarianceMatrix(Y @ Y.conj().T / Y.shape[1]).R
    nR = np.linalg.norm(R)
    checks["covariance Hermitian PSD"] = bool(
        np.linalg.norm(R - R.conj().T) <= 1e-10 * nR and np.linalg.eigvalsh(R).min() >= -1e-10 * nR
    )

    A = crandn(g, 30, 12)
    res = svd_full(A)
    q = qr_thin(A)
    checks["SVD/QR reconstruction and orthonormality"] = bool(
        np.linalg.norm(res.reconstruct() - A) <= 1e-8 * np.linalg.norm(A)
        and orthonormality_error(res.U) <= 1e-10 * math.sqrt(12)
        and orthonormality_error(res.V) <= 1e-10 * math.sqrt(12)
        and np.linalg.norm(q.Q @ q.R - A) <= 1e-10 * np.linalg.norm(A)
        and orthonormality_error(q.Q) <= 1e-10 * math.sqrt(12)
    )

    grid, geom = AngularGrid(), ArrayGeometry(20)
    worst = 0.0
    for _ in range(10):
        sig, noise = exact_music_subspace(random_psd(g, 20), 5)
        a = spectrum_from_noise_basis(noise, geom, grid).values
        b = spectrum_from_signal_basis(sig.basis, geom, grid).values
        worst = max(worst, float(np.max(np.abs(a - b) / b)))
    checks["noise/signal complement identity"] = worst <= 1e-10

    U = qr_thin(crandn(g, 20, 5)).Q
    W = qr_thin(crandn(g, 5, 5)).Q
    a = spectrum_from_signal_basis(U, geom, grid).values
    b = spectrum_from_signal_basis(U @ W, geom, grid).values
    checks["rotation invariance"] = bool(np.max(np.abs(a - b) / a) <= 1e-10)

    cfg = SketchConfig.from_rank(4, seed=11)
    Rp = random_psd(g, 60)
    sc = make_scene(30, 3, 0.0, seed=5)
    checks["seed determinism"] = bool(
        np.array_equal(gaussian_sketch(60, 4, 11), gaussian_sketch(60, 4, 11))
        and np.array_equal(count_sketch(60, 8, 11).toarray(), count_sketch(60, 8, 11).toarray())
        and np.array_equal(composite_sketch(cfg, 60), composite_sketch(cfg, 60))
        and np.array_equal(rmusic_subspace(Rp, 4, cfg).basis, rmusic_subspace(Rp, 4, cfg).basis)
        and np.array_equal(generate_snapshots(sc, 2), generate_snapshots(sc, 2))
        and make_scene(30, 3, 0.0, seed=5) == sc
    )
    failed = [k for k, v in checks.items() if not v]
    report(8, "structural invariant suite", not failed,
           f"{len(checks) - len(failed)}/{len(checks)} checks pass" + (f"; failed: {', '.join(failed)}" if failed else ""))
