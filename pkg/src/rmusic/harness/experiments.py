"""Experiment drivers: spectrum demo, timing sweeps, RMSE sweeps, bound check.

Each ``run_*`` function takes an :class:`ExperimentConfig`, returns its
records and, when ``out`` is given, writes CSV files plus ``meta.txt`` there.
Every random quantity is seeded from ``cfg.seed`` through
:func:`rmusic.seeding.derive_seed`, keyed by trial index, so results do not
depend on the number of worker threads.
"""

from __future__ import annotations

import csv
import logging
import math
import platform
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__, seeding
from ..array_sim import Scene, generate_snapshots, make_scene
from ..errors import RMusicError
from ..numerics import svd_full
from ..sketching import SketchConfig
from ..spectrum import PENALTY_DEG, AngularGrid, DoaEstimate, PseudoSpectrum, doa_squared_errors, find_peaks
from ..subspace import CovarianceMatrix, rank_k_svd_via_sketch, sample_covariance
from .config import ExperimentConfig, config_to_toml
from .methods import run_method

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimingRecord:
    method: str
    M: int
    K: int
    N: int
    elapsed_s: float
    repetitions: int
    seed: int
    status: str = "ok"


@dataclass(frozen=True)
class RmseRecord:
    method: str
    snr_db: float
    trials: int
    rmse_deg: float
    shortfall: int
    failures: int = 0


@dataclass(frozen=True)
class BoundRecord:
    K: int
    sizes: str
    trial: int
    seed: int
    s: int
    s0: int
    s1: int
    best_residual: float
    lra_residual: float
    ratio: float
    exact: bool


@dataclass
class DemoResult:
    scene: Scene
    grid: AngularGrid
    spectra: dict[str, PseudoSpectrum] = field(default_factory=dict)
    estimates: dict[str, DoaEstimate] = field(default_factory=dict)
    failures: dict[str, str] = field(default_factory=dict)


# ---------------------------------------------------------------- plumbing


def write_csv(path: Path, rows, header: list[str]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in row])


def _records_csv(path: Path, records) -> None:
    if not records:
        return
    names = [f.name for f in fields(records[0])]
    write_csv(path, ([getattr(r, n) for n in names] for r in records), names)


def write_meta(out: Path, cfg: ExperimentConfig, extra: dict | None = None) -> None:
    lines = [
        f"rmusic_version = {__version__}",
        f"kind = {cfg.kind}",
        f"seed = {cfg.seed}",
        f"host = {platform.node()} | {platform.platform()} | {platform.processor() or platform.machine()}",
        f"python = {platform.python_version()}",
        f"numpy = {np.__version__}",
    ]
    for k, v in (extra or {}).items():
        lines.append(f"{k} = {v}")
    lines += ["", "# config echo", config_to_toml(cfg)]
    (out / "meta.txt").write_text("\n".join(lines))


def _prepare(out) -> Path | None:
    if out is None:
        return None
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def build_scene(cfg: ExperimentConfig, seed: int, *, M: int | None = None, K: int | None = None,
                snr_db: float | None = None) -> Scene:
    sc = cfg.scene
    M = sc.num_elements if M is None else M
    K = sc.num_targets if K is None else K
    fixed = sc.doas_deg if sc.doas_deg is not None and K == sc.num_targets else None
    return make_scene(
        M,
        K,
        sc.snr_db if snr_db is None else snr_db,
        seed,
        num_snapshots=sc.num_snapshots if sc.num_snapshots and M == sc.num_elements else M,
        spacing_ratio=sc.spacing_ratio,
        doa_range=sc.draw_range,
        min_separation_deg=sc.min_separation_deg,
        doas_deg=fixed,
    )


# ---------------------------------------------------------------- spectrum demo


def demo_trial(cfg: ExperimentConfig, seed: int) -> DemoResult:
    """One scene, every configured method on a shared grid.

    A method that raises is recorded in ``failures`` and the others still run.
    """
    scene = build_scene(cfg, seeding.derive_seed(seed, seeding.STREAM_SCENE))
    R = sample_covariance(generate_snapshots(scene, seeding.derive_seed(seed, seeding.STREAM_TRIAL)))
    K = scene.num_targets
    sketch = cfg.sketch.build(K, seeding.derive_seed(seed, seeding.STREAM_SKETCH))
    grid = cfg.grid.build()
    result = DemoResult(scene, grid)
    for method in cfg.methods:
        try:
            spec = run_method(method, R, K, sketch).spectrum(scene.array, grid)
        except RMusicError as exc:
            result.failures[method] = f"{type(exc).__name__}: {exc}"
            continue
        result.spectra[method] = spec
        result.estimates[method] = find_peaks(spec, K)
    return result


def run_spectrum_demo(cfg: ExperimentConfig, out=None) -> DemoResult:
    """Spectra of every method plus a peak table with per-target errors."""
    res = demo_trial(cfg, cfg.seed)
    out = _prepare(out)
    if out is not None:
        for method, spec in res.spectra.items():
            spec.to_csv(out / f"spectrum_{method}.csv")
        write_csv(out / "peaks.csv", _peak_rows(res), ["method", "target", "true_deg", "est_deg", "abs_error_deg", "status"])
        write_meta(out, cfg)
    return res


def _peak_rows(res: DemoResult):
    truth = res.scene.doas_deg
    for method in res.spectra:
        est = res.estimates[method]
        if est.complete:
            for i, (t, e) in enumerate(zip(truth, est.angles_deg)):
                yield [method, i, float(t), float(e), float(abs(e - t)), "ok"]
        else:
            for i, t in enumerate(truth):
                yield [method, i, float(t), "", "", f"shortfall {est.shortfall}"]
    for method, msg in res.failures.items():
        for i, t in enumerate(truth):
            yield [method, i, float(t), "", "", f"failed: {msg}"]


# ---------------------------------------------------------------- timing


def _timing_points(cfg: ExperimentConfig) -> list[tuple[int, int]]:
    if cfg.kind == "timing-vs-K":
        return [(cfg.scene.num_elements, K) for K in cfg.sweep.num_targets]
    return [(M, cfg.scene.num_targets) for M in cfg.sweep.num_elements]


def time_method(method: str, R: CovarianceMatrix, K: int, sketch: SketchConfig | None,
                repetitions: int, warmup: int = 1, budget_s: float = math.inf) -> tuple[float, str]:
    """Median subspace-stage time over ``repetitions`` calls after ``warmup`` calls."""
    for _ in range(warmup):
        t = run_method(method, R, K, sketch).elapsed
        if t > budget_s:
            return math.nan, f"skipped: warm-up took {t:.3g} s > budget {budget_s:g} s"
    times = []
    for _ in range(repetitions):
        times.append(run_method(method, R, K, sketch).elapsed)
        if times[-1] > budget_s:
            return float(np.median(times)), f"skipped: call took {times[-1]:.3g} s > budget {budget_s:g} s"
    return float(np.median(times)), "ok"


def run_timing_sweep(cfg: ExperimentConfig, out=None) -> list[TimingRecord]:
    """Median subspace-estimation time per (method, M, K).

    Covariance formation is outside the timed region; sketch generation is
    inside it unless ``sketch.reuse`` is set. Once a method exceeds the time
    budget it is skipped for the remaining points.
    """
    sw = cfg.sweep
    records: list[TimingRecord] = []
    dropped: dict[str, str] = {}
    with threadpool_limits(limits=cfg.threads):
        for i, (M, K) in enumerate(_timing_points(cfg)):
            seed = seeding.derive_seed(cfg.seed, seeding.STREAM_TRIAL, i)
            scene = build_scene(cfg, seeding.derive_seed(seed, seeding.STREAM_SCENE), M=M, K=K)
            R = sample_covariance(generate_snapshots(scene, seed))
            sketch = cfg.sketch.build(K, seeding.derive_seed(seed, seeding.STREAM_SKETCH))
            N = scene.num_snapshots
            for method in cfg.methods:
                if method in dropped:
                    records.append(TimingRecord(method, M, K, N, math.nan, 0, seed, dropped[method]))
                    continue
                try:
                    t, status = time_method(method, R, K, sketch, sw.repetitions, sw.warmup, sw.time_budget_s)
                except RMusicError as exc:
                    t, status = math.nan, f"failed: {exc}"
                if status != "ok":
                    dropped[method] = status
                log.info("timing %s M=%d K=%d: %.4g s (%s)", method, M, K, t, status)
                records.append(TimingRecord(method, M, K, N, t, sw.repetitions, seed, status))
    out = _prepare(out)
    if out is not None:
        _records_csv(out / "timing.csv", records)
        write_meta(out, cfg, {"threads": cfg.threads})
    return records


# ---------------------------------------------------------------- RMSE


def _rmse_trial(cfg: ExperimentConfig, trial: int, snr_idx: int, snr_db: float):
    """Squared errors per method for one trial; failures are charged in full."""
    seed = seeding.derive_seed(cfg.seed, seeding.STREAM_TRIAL, trial)
    scene = build_scene(cfg, seeding.derive_seed(seed, seeding.STREAM_SCENE), snr_db=snr_db)
    R = sample_covariance(generate_snapshots(scene, seed))
    K = scene.num_targets
    sketch = cfg.sketch.build(K, seeding.derive_seed(cfg.seed, seeding.STREAM_SKETCH, trial, snr_idx))
    out = {}
    for method in cfg.methods:
        try:
            est = find_peaks(run_method(method, R, K, sketch).spectrum(scene.array, cfg.grid.build()), K)
            out[method] = (doa_squared_errors(est, scene.doas_deg, penalize_shortfall=True), est.shortfall, 0)
        except RMusicError:
            out[method] = (np.full(K, PENALTY_DEG**2), K, 1)
    return out


def run_rmse_sweep(cfg: ExperimentConfig, out=None) -> list[RmseRecord]:
    """RMSE (deg) per (method, SNR) over ``cfg.trials`` random scenes.

    Trial ``t`` uses the same DoAs and source/noise draws at every SNR; only
    the noise scale changes. Missed detections are charged ``90`` degrees.
    """
    records = []
    workers = cfg.threads
    with threadpool_limits(limits=1 if workers > 1 else None):
        for j, snr in enumerate(cfg.sweep.snr_db):
            if workers > 1:
                with ThreadPoolExecutor(max_workers=workers) as ex:
                    trials = list(ex.map(lambda t: _rmse_trial(cfg, t, j, snr), range(cfg.trials)))
            else:
                trials = [_rmse_trial(cfg, t, j, snr) for t in range(cfg.trials)]
            for method in cfg.methods:
                sq = np.concatenate([tr[method][0] for tr in trials])
                records.append(
                    RmseRecord(
                        method,
                        float(snr),
                        cfg.trials,
                        float(np.sqrt(np.mean(sq))),
                        int(sum(tr[method][1] for tr in trials)),
                        int(sum(tr[method][2] for tr in trials)),
                    )
                )
                log.info("rmse %s snr=%g: %.4g deg", method, snr, records[-1].rmse_deg)
    out = _prepare(out)
    if out is not None:
        _records_csv(out / "rmse.csv", records)
        write_meta(out, cfg, {"threads": cfg.threads})
    return records


# ---------------------------------------------------------------- bound check


def low_rank_plus_noise(M: int, K: int, residual_ratio: float, seed: int) -> np.ndarray:
    """Hermitian PSD ``R_K + E``: ``R_K = G G^H`` of rank K, ``E`` a scaled Wishart.

    ``||E||_F = residual_ratio * ||R_K||_F``; ``residual_ratio = 0`` gives an
    exactly rank-K matrix.
    """
    g = seeding.rng(seed, seeding.STREAM_SCENE)
    G = g.standard_normal((M, K)) + 1j * g.standard_normal((M, K))
    RK = G @ G.conj().T
    if residual_ratio == 0:
        return RK
    W = g.standard_normal((M, M)) + 1j * g.standard_normal((M, M))
    E = W @ W.conj().T
    return RK + E * (residual_ratio * np.linalg.norm(RK) / np.linalg.norm(E))


def bound_trial(M: int, K: int, residual_ratio: float, sketch: SketchConfig, seed: int):
    """``(||R - R_K||_F^2, ||C X - R||_F^2)`` for one synthetic matrix."""
    R = CovarianceMatrix(low_rank_plus_noise(M, K, residual_ratio, seed))
    sv = svd_full(R.R).singular_values
    best = float(np.sum(sv[K:] ** 2))
    _, lra = rank_k_svd_via_sketch(R, sketch, K)
    return best, lra, float(np.linalg.norm(R.R) ** 2)


def sketch_for_regime(regime: str, K: int, seed: int, eps: float = 0.25, eta: float = 0.5) -> SketchConfig:
    if regime == "theorem":
        return SketchConfig.theorem_scale(K, eps, seed)
    return SketchConfig.from_rank(K, eta, seed)


def run_bound_check(cfg: ExperimentConfig, out=None) -> list[BoundRecord]:
    """Per-seed residual ratios ``||C X - R||_F^2 / ||R - R_K||_F^2``.

    For exactly rank-K inputs the ratio is undefined; the record is flagged
    ``exact`` and ``ratio`` is NaN.
    """
    M = cfg.scene.num_elements
    b = cfg.bound
    records = []
    for K in b.ranks:
        for regime in b.sizes:
            for t in range(cfg.trials):
                seed = seeding.derive_seed(cfg.seed, seeding.STREAM_TRIAL, K, t)
                sk = sketch_for_regime(regime, K, seeding.derive_seed(seed, seeding.STREAM_SKETCH), b.eps, cfg.sketch.eta)
                best, lra, total = bound_trial(M, K, b.residual_ratio, sk, seed)
                exact = best <= 1e-20 * total
                ratio = math.nan if exact else lra / best
                records.append(BoundRecord(K, regime, t, seed, sk.s, sk.s0, sk.s1, best, lra, ratio, exact))
    out = _prepare(out)
    if out is not None:
        _records_csv(out / "bound.csv", records)
        write_csv(out / "bound_summary.csv", bound_summary(records),
                  ["K", "sizes", "trials", "exact", "ratio_q50", "ratio_q95", "ratio_max"])
        write_meta(out, cfg)
    return records


def bound_summary(records: list[BoundRecord]):
    keys = sorted({(r.K, r.sizes) for r in records})
    for K, regime in keys:
        rs = [r for r in records if r.K == K and r.sizes == regime]
        ratios = np.array([r.ratio for r in rs if not r.exact])
        if ratios.size:
            q50, q95, qmax = np.percentile(ratios, 50), np.percentile(ratios, 95), ratios.max()
        else:
            q50 = q95 = qmax = math.nan
        yield [K, regime, len(rs), sum(r.exact for r in rs), float(q50), float(q95), float(qmax)]


def as_rows(records) -> list[dict]:
    return [asdict(r) for r in records]
