"""Pseudo-spectra over an angular grid, peak picking and DoA error metrics."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from scipy.optimize import linear_sum_assignment

from .array_sim import ArrayGeometry, steering_matrix
from .errors import DimensionError, DomainError, OrthonormalityError
from .numerics import orthonormality_error

CLAMP = 1e-18
PENALTY_DEG = 90.0


@dataclass(frozen=True)
class AngularGrid:
    start_deg: float = -90.0
    stop_deg: float = 90.0
    step_deg: float = 0.1

    def __post_init__(self):
        if not self.start_deg < self.stop_deg:
            raise DomainError("grid start must be below stop")
        if not self.step_deg > 0:
            raise DomainError("grid step must be positive")
        if self.start_deg < -90.0 or self.stop_deg > 90.0:
            raise DomainError("grid must stay within [-90, 90] degrees")

    @property
    def size(self) -> int:
        # Guard against 180/0.1 = 1799.9999999999998.
        return int(math.floor((self.stop_deg - self.start_deg) / self.step_deg + 1e-9)) + 1

    @property
    def points(self) -> np.ndarray:
        pts = self.start_deg + self.step_deg * np.arange(self.size)
        return np.minimum(np.round(pts, 10), self.stop_deg)


@dataclass(frozen=True, eq=False)
class PseudoSpectrum:
    grid: AngularGrid
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape != (self.grid.size,):
            raise DimensionError("spectrum length does not match the grid")

    @property
    def angles_deg(self) -> np.ndarray:
        return self.grid.points

    def to_db(self) -> np.ndarray:
        return 10.0 * np.log10(self.values / self.values.max())

    def to_csv(self, path) -> None:
        """Two columns, ``theta_deg,value``, with a header row."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["theta_deg", "value"])
            for th, v in zip(self.angles_deg, self.values):
                w.writerow([f"{th:.6f}", repr(float(v))])

    @classmethod
    def from_csv(cls, path, grid: AngularGrid | None = None) -> "PseudoSpectrum":
        data = np.loadtxt(Path(path), delimiter=",", skiprows=1, ndmin=2)
        if grid is None:
            th = data[:, 0]
            step = float(np.round(th[1] - th[0], 10)) if len(th) > 1 else 1.0
            grid = AngularGrid(float(th[0]), float(th[-1]), step)
        return cls(grid, data[:, 1])


@dataclass(frozen=True, eq=False)
class DoaEstimate:
    angles_deg: np.ndarray
    peak_values: np.ndarray
    shortfall: int = 0

    @property
    def complete(self) -> bool:
        return self.shortfall == 0


@lru_cache(maxsize=16)
def _steering(geom: ArrayGeometry, grid: AngularGrid) -> np.ndarray:
    A = steering_matrix(geom, grid.points)
    A.flags.writeable = False
    return A


def _finish(q: np.ndarray, M: int, grid: AngularGrid) -> PseudoSpectrum:
    return PseudoSpectrum(grid, 1.0 / np.maximum(q, CLAMP * M))


def _check_rows(U: np.ndarray, geom: ArrayGeometry, name: str) -> np.ndarray:
    U = np.asarray(U)
    if U.ndim != 2 or U.shape[0] != geom.num_elements or U.shape[1] < 1:
        raise DimensionError(f"{name} must be {geom.num_elements} x r with r >= 1, got {U.shape}")
    return U


def spectrum_from_noise_basis(U_e, geom: ArrayGeometry, grid: AngularGrid) -> PseudoSpectrum:
    """``1 / (a^H U_e U_e^H a)`` on every grid angle."""
    U_e = _check_rows(U_e, geom, "noise basis")
    A = _steering(geom, grid)
    q = np.sum(np.abs(U_e.conj().T @ A) ** 2, axis=0)
    return _finish(q, geom.num_elements, grid)


def spectrum_from_signal_basis(U_K, geom: ArrayGeometry, grid: AngularGrid) -> PseudoSpectrum:
    """``1 / (a^H (I - U_K U_K^H) a)`` on every grid angle."""
    U_K = _check_rows(U_K, geom, "signal basis")
    drift = orthonormality_error(U_K)
    if drift > 1e-4:
        raise OrthonormalityError(f"signal basis is not orthonormal (drift {drift:.3g})")
    A = _steering(geom, grid)
    resid = A - U_K @ (U_K.conj().T @ A)
    q = np.sum(np.abs(resid) ** 2, axis=0)
    return _finish(q, geom.num_elements, grid)


def spectrum_from_kernel(W, geom: ArrayGeometry, grid: AngularGrid) -> PseudoSpectrum:
    """``1 / (a^H W a)`` for a Hermitian PSD kernel ``W`` (``M x M``)."""
    W = np.asarray(W)
    M = geom.num_elements
    if W.shape != (M, M):
        raise DimensionError(f"kernel must be {M} x {M}, got {W.shape}")
    A = _steering(geom, grid)
    q = np.real(np.sum(A.conj() * (W @ A), axis=0))
    return _finish(q, M, grid)


def _local_maxima(v: np.ndarray) -> np.ndarray:
    """Indices of strict interior local maxima; plateaus map to their midpoint.

    For an even-length plateau the lower of the two middle samples is used.
    """
    if v.size < 3:
        return np.empty(0, dtype=int)
    change = np.flatnonzero(v[1:] != v[:-1]) + 1
    starts = np.concatenate(([0], change))
    ends = np.concatenate((change, [v.size])) - 1
    rv = v[starts]
    inner = np.arange(1, rv.size - 1)
    is_peak = (rv[inner] > rv[inner - 1]) & (rv[inner] > rv[inner + 1])
    j = inner[is_peak]
    return starts[j] + (ends[j] - starts[j]) // 2


def find_peaks(spec: PseudoSpectrum, K: int, min_separation_deg: float | None = None) -> DoaEstimate:
    """The ``K`` largest local maxima at least ``min_separation_deg`` apart.

    Candidates are taken in order of decreasing value; equal values are taken
    lower angle first. ``min_separation_deg`` defaults to twice the grid step.
    If fewer than ``K`` maxima qualify, the estimate carries the shortfall.
    """
    if K < 1:
        raise DimensionError(f"K must be >= 1, got {K}")
    sep = 2.0 * spec.grid.step_deg if min_separation_deg is None else min_separation_deg
    idx = _local_maxima(np.asarray(spec.values))
    angles = spec.angles_deg
    # lexsort: last key is primary -> value descending, then angle ascending.
    order = idx[np.lexsort((angles[idx], -spec.values[idx]))]
    chosen: list[int] = []
    for i in order:
        if all(abs(angles[i] - angles[c]) >= sep - 1e-9 for c in chosen):
            chosen.append(int(i))
            if len(chosen) == K:
                break
    chosen.sort()
    return DoaEstimate(angles[chosen], spec.values[chosen], K - len(chosen))


def doa_squared_errors(
    est, truth, penalize_shortfall: bool = False, penalty_deg: float = PENALTY_DEG
) -> np.ndarray:
    """Per-target squared angular errors (deg^2).

    Equal-length lists are matched in sorted order. With
    ``penalize_shortfall`` a shorter estimate is matched to the truth by
    optimal assignment and every unmatched true DoA is charged
    ``penalty_deg ** 2``.
    """
    e = np.sort(np.asarray(est.angles_deg if isinstance(est, DoaEstimate) else est, dtype=float))
    t = np.sort(np.asarray(truth, dtype=float))
    if e.size == t.size:
        return (e - t) ** 2
    if not penalize_shortfall or e.size > t.size:
        raise DimensionError(f"{e.size} estimates for {t.size} true DoAs")
    out = np.full(t.size, penalty_deg**2)
    if e.size:
        cost = (e[:, None] - t[None, :]) ** 2
        r, c = linear_sum_assignment(cost)
        out[c] = cost[r, c]
    return out


def doa_rmse(est, truth, penalize_shortfall: bool = False, penalty_deg: float = PENALTY_DEG) -> float:
    """Root-mean-square DoA error in degrees."""
    return float(np.sqrt(np.mean(doa_squared_errors(est, truth, penalize_shortfall, penalty_deg))))
