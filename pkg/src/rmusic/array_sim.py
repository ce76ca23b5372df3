"""Scene description and snapshot synthesis for a uniform linear array.

The DoA pipeline consumes the narrowband post-dechirp model

    Y = A(theta) @ diag(alpha) @ Phi + W,

where column ``k`` of ``A`` is the steering vector of target ``k``, ``Phi``
holds unit-power circular complex Gaussian source symbols and ``W`` is white
circular complex Gaussian noise. The FMCW chirp itself is available through
:func:`fmcw_chirp` and :func:`dechirp` for waveform-level demonstrations.

Sign convention: ``a_m(theta) = exp(+j 2 pi m (d / lambda) sin theta)`` for
both synthesis and estimation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import seeding
from .errors import DimensionError, DomainError

DOA_RANGE_DEFAULT = (-60.0, 60.0)
DOA_RANGE_EDGE = (70.0, 88.0)
MIN_SEPARATION_DEFAULT = 3.0


@dataclass(frozen=True)
class Target:
    doa_deg: float
    gain: complex
    toa_s: float | None = None

    def __post_init__(self):
        if not np.isfinite(self.doa_deg):
            raise DomainError(f"target DoA must be finite, got {self.doa_deg}")
        if not abs(self.gain) > 0:
            raise DomainError("target gain must be non-zero")


@dataclass(frozen=True)
class ArrayGeometry:
    num_elements: int
    spacing_ratio: float = 0.5

    def __post_init__(self):
        if self.num_elements < 2:
            raise DimensionError(f"array needs at least 2 elements, got {self.num_elements}")
        if not 0.0 < self.spacing_ratio <= 0.5:
            raise DomainError(f"spacing_ratio must lie in (0, 0.5], got {self.spacing_ratio}")


@dataclass(frozen=True)
class Scene:
    targets: tuple[Target, ...]
    array: ArrayGeometry
    snr_db: float
    num_snapshots: int

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        K, M = len(self.targets), self.array.num_elements
        if not 1 <= K < M:
            raise DimensionError(f"need 1 <= K < M, got K={K}, M={M}")
        if self.num_snapshots < 1:
            raise DimensionError(f"num_snapshots must be >= 1, got {self.num_snapshots}")
        doas = np.array([t.doa_deg for t in self.targets])
        if np.any(np.abs(doas) >= 90.0):
            raise DomainError("target DoAs must lie strictly inside (-90, 90) degrees")
        if len(np.unique(doas)) != K:
            raise DomainError("target DoAs must be pairwise distinct")
        if np.isnan(self.snr_db):
            raise DomainError("snr_db must not be NaN")

    @property
    def num_targets(self) -> int:
        return len(self.targets)

    @property
    def doas_deg(self) -> np.ndarray:
        return np.array([t.doa_deg for t in self.targets])

    @property
    def gains(self) -> np.ndarray:
        return np.array([t.gain for t in self.targets], dtype=np.complex128)

    @property
    def noise_variance(self) -> float:
        """Per-element noise variance so that sum |alpha_k|^2 / sigma^2 = SNR."""
        return float(np.sum(np.abs(self.gains) ** 2) * 10.0 ** (-self.snr_db / 10.0))

    def to_dict(self) -> dict:
        toas = [t.toa_s for t in self.targets]
        d = {
            "num_elements": self.array.num_elements,
            "spacing_ratio": self.array.spacing_ratio,
            "snr_db": float(self.snr_db),
            "num_snapshots": self.num_snapshots,
            "doas_deg": [float(t.doa_deg) for t in self.targets],
            "gain_re": [float(complex(t.gain).real) for t in self.targets],
            "gain_im": [float(complex(t.gain).imag) for t in self.targets],
        }
        if any(t is not None for t in toas):
            d["toa_s"] = [float("nan") if t is None else float(t) for t in toas]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scene":
        doas = list(d["doas_deg"])
        K = len(doas)
        re = d.get("gain_re", [1.0 / np.sqrt(K)] * K)
        im = d.get("gain_im", [0.0] * K)
        toas = d.get("toa_s", [None] * K)
        if not len(re) == len(im) == len(toas) == K:
            raise DimensionError("doas_deg, gain_re, gain_im and toa_s must have equal lengths")
        targets = tuple(
            Target(float(th), complex(r, i), None if t is None or np.isnan(t) else float(t))
            for th, r, i, t in zip(doas, re, im, toas)
        )
        M = int(d["num_elements"])
        return cls(
            targets=targets,
            array=ArrayGeometry(M, float(d.get("spacing_ratio", 0.5))),
            snr_db=float(d["snr_db"]),
            num_snapshots=int(d.get("num_snapshots", M)),
        )


@dataclass(frozen=True)
class FmcwParams:
    init_freq_rad_s: float
    bandwidth_rad_s: float
    symbol_period_s: float
    chirp_rate: float = field(init=False)

    def __post_init__(self):
        for name in ("init_freq_rad_s", "bandwidth_rad_s", "symbol_period_s"):
            if not getattr(self, name) > 0:
                raise DomainError(f"{name} must be strictly positive")
        object.__setattr__(self, "chirp_rate", self.bandwidth_rad_s / self.symbol_period_s)


def fmcw_chirp(params: FmcwParams, t):
    """Unit-modulus linear chirp ``exp(j (w_s t + mu t^2 / 2))`` for ``0 <= t < T_sym``."""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0) or np.any(t_arr >= params.symbol_period_s):
        raise DomainError("chirp time must lie in [0, T_sym)")
    out = np.exp(1j * (params.init_freq_rad_s * t_arr + 0.5 * params.chirp_rate * t_arr**2))
    return complex(out) if out.ndim == 0 else out


def dechirp(received, params: FmcwParams, t):
    """Mix ``received`` with the conjugate of the transmitted chirp at times ``t``.

    For a chirp delayed by ``tau`` the output is a tone at angular frequency
    ``-mu * tau``.
    """
    return np.asarray(received) * np.conj(fmcw_chirp(params, t))


def _check_angles(theta_deg) -> np.ndarray:
    theta = np.asarray(theta_deg, dtype=float)
    if np.any(~np.isfinite(theta)) or np.any(np.abs(theta) > 90.0):
        raise DomainError("steering angle must lie in [-90, 90] degrees")
    return theta


def steering_vector(geom: ArrayGeometry, theta_deg: float) -> np.ndarray:
    """Length-M response ``exp(j 2 pi m (d/lambda) sin theta)``; entry 0 is 1."""
    theta = _check_angles(theta_deg)
    if theta.ndim != 0:
        raise DimensionError("steering_vector takes a scalar angle; use steering_matrix")
    m = np.arange(geom.num_elements)
    return np.exp(2j * np.pi * geom.spacing_ratio * np.sin(np.deg2rad(theta)) * m)


def steering_matrix(geom: ArrayGeometry, thetas_deg: Sequence[float]) -> np.ndarray:
    """Steering vectors stacked column-wise, shape ``(M, len(thetas_deg))``."""
    theta = np.atleast_1d(_check_angles(thetas_deg))
    m = np.arange(geom.num_elements)[:, None]
    return np.exp(2j * np.pi * geom.spacing_ratio * m * np.sin(np.deg2rad(theta))[None, :])


def _cn(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))


def snapshot_components(scene: Scene, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Signal and noise parts of the snapshot matrix; their sum is the snapshot matrix."""
    M, N, K = scene.array.num_elements, scene.num_snapshots, scene.num_targets
    A = steering_matrix(scene.array, scene.doas_deg)
    phi = _cn(seeding.rng(seed, seeding.STREAM_SOURCES), (K, N))
    signal = A @ (scene.gains[:, None] * phi)
    var = scene.noise_variance
    noise_rng = seeding.rng(seed, seeding.STREAM_NOISE)
    noise = _cn(noise_rng, (M, N), var) if var > 0 else np.zeros((M, N), dtype=np.complex128)
    return signal, noise


def generate_snapshots(scene: Scene, seed: int) -> np.ndarray:
    """M x N snapshot matrix for ``scene``; bit-identical for a fixed seed."""
    signal, noise = snapshot_components(scene, seed)
    return signal + noise


def draw_doas(
    rng: np.random.Generator,
    num_targets: int,
    doa_range: tuple[float, float] = DOA_RANGE_DEFAULT,
    min_separation_deg: float = MIN_SEPARATION_DEFAULT,
) -> np.ndarray:
    """Sorted DoAs uniform over ``doa_range`` with a minimum pairwise gap.

    Uses the gap-compression construction: draw ``K`` sorted uniforms on the
    shortened interval and spread the i-th by ``i * min_separation_deg``.
    This is uniform over the admissible set and never rejects.
    """
    low, high = doa_range
    slack = (high - low) - (num_targets - 1) * min_separation_deg
    if num_targets < 1 or slack < 0:
        raise DomainError(
            f"cannot place {num_targets} targets {min_separation_deg} deg apart in [{low}, {high}]"
        )
    base = np.sort(rng.uniform(low, low + slack, num_targets))
    return base + min_separation_deg * np.arange(num_targets)


def random_gains(rng: np.random.Generator, num_targets: int) -> np.ndarray:
    """Magnitude ``1/sqrt(K)`` (unit total power) with uniform random phase."""
    phase = rng.uniform(0.0, 2.0 * np.pi, num_targets)
    return np.exp(1j * phase) / np.sqrt(num_targets)


def make_scene(
    num_elements: int,
    num_targets: int,
    snr_db: float,
    seed: int,
    *,
    num_snapshots: int | None = None,
    spacing_ratio: float = 0.5,
    doa_range: tuple[float, float] = DOA_RANGE_DEFAULT,
    min_separation_deg: float = MIN_SEPARATION_DEFAULT,
    doas_deg: Sequence[float] | None = None,
) -> Scene:
    """Random scene with seeded DoAs (unless given) and seeded gains."""
    r = seeding.rng(seed, seeding.STREAM_SCENE)
    if doas_deg is None:
        doas = draw_doas(r, num_targets, doa_range, min_separation_deg)
    else:
        doas = np.sort(np.asarray(doas_deg, dtype=float))
        if len(doas) != num_targets:
            raise DimensionError(f"got {len(doas)} DoAs for {num_targets} targets")
    gains = random_gains(r, num_targets)
    return Scene(
        targets=tuple(Target(float(th), complex(g)) for th, g in zip(doas, gains)),
        array=ArrayGeometry(num_elements, spacing_ratio),
        snr_db=float(snr_db),
        num_snapshots=num_elements if num_snapshots is None else num_snapshots,
    )
