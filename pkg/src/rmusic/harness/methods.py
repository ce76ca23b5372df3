"""Uniform interface over the five estimators: subspace stage, then spectrum."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from ..array_sim import ArrayGeometry
from ..errors import ConfigError
from ..sketching import SketchConfig
from ..spectrum import (
    AngularGrid,
    PseudoSpectrum,
    spectrum_from_kernel,
    spectrum_from_noise_basis,
    spectrum_from_signal_basis,
)
from ..subspace import (
    CovarianceMatrix,
    exact_ksvd_subspace,
    exact_music_subspace,
    inverse_spectrum_weights,
    propagator_subspace,
    rmusic_subspace,
)


@dataclass(frozen=True, eq=False)
class MethodOutput:
    """What a method hands to the spectrum stage.

    Exactly one of ``signal_basis``, ``noise_basis`` or ``kernel`` is set.
    ``elapsed`` is the estimator's own subspace-stage wall time.
    """

    method: str
    elapsed: float
    signal_basis: np.ndarray | None = None
    noise_basis: np.ndarray | None = None
    kernel: np.ndarray | None = None

    def spectrum(self, geom: ArrayGeometry, grid: AngularGrid) -> PseudoSpectrum:
        if self.noise_basis is not None:
            return spectrum_from_noise_basis(self.noise_basis, geom, grid)
        if self.kernel is not None:
            return spectrum_from_kernel(self.kernel, geom, grid)
        return spectrum_from_signal_basis(self.signal_basis, geom, grid)


def run_method(method: str, R: CovarianceMatrix, K: int, sketch: SketchConfig | None = None) -> MethodOutput:
    if method == "music":
        sig, noise = exact_music_subspace(R, K)
        return MethodOutput(method, sig.elapsed, noise_basis=noise)
    if method == "rmusic":
        est = rmusic_subspace(R, K, sketch)
        return MethodOutput(method, est.elapsed, signal_basis=est.basis)
    if method == "ksvd":
        est = exact_ksvd_subspace(R, K)
        return MethodOutput(method, est.elapsed, signal_basis=est.basis)
    if method == "propagator":
        est, kernel = propagator_subspace(R, K)
        return MethodOutput(method, est.elapsed, kernel=kernel)
    if method == "inverse":
        t0 = time.perf_counter()
        W = inverse_spectrum_weights(R)
        return MethodOutput(method, time.perf_counter() - t0, kernel=W)
    raise ConfigError(f"unknown method {method!r}")
