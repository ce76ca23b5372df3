"""Reproduction harness: configuration, experiment drivers and the CLI."""

from .config import ExperimentConfig, default_config, load_config, parse_config
from .experiments import (
    BoundRecord,
    DemoResult,
    RmseRecord,
    TimingRecord,
    run_bound_check,
    run_rmse_sweep,
    run_spectrum_demo,
    run_timing_sweep,
)
