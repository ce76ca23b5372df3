"""Command-line entry point: ``rmusic {demo,bench,rmse,bound,simulate}``.

Exit status: 0 on success, 1 on a configuration error, 2 on a runtime error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .. import seeding
from ..array_sim import generate_snapshots
from ..errors import ConfigError, RMusicError
from .config import ExperimentConfig, default_config, help_text, load_config, save_scene
from .experiments import (
    build_scene,
    run_bound_check,
    run_rmse_sweep,
    run_spectrum_demo,
    run_timing_sweep,
    write_meta,
)

EXIT_OK, EXIT_CONFIG, EXIT_RUNTIME = 0, 1, 2

SUBCOMMANDS = {
    "demo": ("spectrum-demo",),
    "bench": ("timing-vs-M", "timing-vs-K"),
    "rmse": ("rmse-vs-snr",),
    "bound": ("bound-check",),
    # simulate only needs the [scene] section; any kind is accepted.
    "simulate": None,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="TOML experiment config (see field list below)")
    common.add_argument("--seed", type=int, help="master seed (overrides experiment.seed)")
    common.add_argument("--out", type=Path, help="output directory (default ./rmusic-out/<subcommand>)")
    common.add_argument("--threads", type=int, help="BLAS threads / trial workers (overrides experiment.threads)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(
        prog="rmusic",
        description="Randomized MUSIC DoA estimation: demos, benchmarks and Monte Carlo sweeps.",
        epilog=help_text(),
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    docs = {
        "demo": "pseudo-spectra of each method for one scene, plus a peak table",
        "bench": "subspace-estimation timing sweep over M (default) or K",
        "rmse": "DoA RMSE versus SNR over Monte Carlo trials",
        "bound": "low-rank residual ratios of the sketched factorization",
        "simulate": "write one snapshot matrix (Y.npy) and its scene (scene.toml)",
    }
    for name, doc in docs.items():
        p = sub.add_parser(name, parents=[common], help=doc, description=doc, epilog=help_text(),
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        if name == "bench":
            p.add_argument("--vs", choices=("M", "K"), default=None, help="sweep variable when no config is given")
    return parser


def resolve_config(args) -> ExperimentConfig:
    kinds = SUBCOMMANDS[args.command]
    if args.config is not None:
        cfg = load_config(args.config)
        if kinds is not None and cfg.kind not in kinds:
            raise ConfigError(
                f"{args.config}: experiment.kind: {cfg.kind!r} does not match subcommand "
                f"'{args.command}' (expected {' or '.join(kinds)})"
            )
    elif args.command == "bench":
        cfg = default_config("timing-vs-K" if getattr(args, "vs", None) == "K" else "timing-vs-M")
    else:
        cfg = default_config(kinds[0] if kinds else "spectrum-demo")
    if args.seed is not None:
        cfg = replace(cfg, seed=args.seed)
    if args.threads is not None:
        cfg = replace(cfg, threads=args.threads)
    return cfg.validate()


def simulate(cfg: ExperimentConfig, out: Path) -> None:
    scene = build_scene(cfg, seeding.derive_seed(cfg.seed, seeding.STREAM_SCENE))
    Y = generate_snapshots(scene, seeding.derive_seed(cfg.seed, seeding.STREAM_TRIAL))
    out.mkdir(parents=True, exist_ok=True)
    np.save(out / "Y.npy", Y)
    save_scene(scene, out / "scene.toml")
    write_meta(out, cfg, {"snapshot_shape": f"{Y.shape[0]}x{Y.shape[1]}"})


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"rmusic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = args.out if args.out is not None else Path("rmusic-out") / args.command
    try:
        if args.command == "demo":
            res = run_spectrum_demo(cfg, out)
            for method, msg in res.failures.items():
                print(f"rmusic: {method} failed: {msg}", file=sys.stderr)
        elif args.command == "bench":
            run_timing_sweep(cfg, out)
        elif args.command == "rmse":
            run_rmse_sweep(cfg, out)
        elif args.command == "bound":
            run_bound_check(cfg, out)
        else:
            simulate(cfg, out)
    except ConfigError as exc:
        print(f"rmusic: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (RMusicError, OSError) as exc:
        print(f"rmusic: error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    print(f"rmusic: wrote {out}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
