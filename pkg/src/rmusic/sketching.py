"""Random sketching operators: Gaussian projection, count sketch, composite.

All sketches are real-valued and are applied to complex data from the left
as ``S.T @ A``. A sketch drawn from a given seed is always the same matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import seeding
from .errors import DimensionError, DomainError

ETA_DEFAULT = 0.5


@dataclass(frozen=True)
class SketchConfig:
    """Sketch widths and seed for one randomized estimation.

    ``s`` is the column count of the range sketch ``C = R S``; ``s0`` the width
    of the count sketch and ``s1`` the width of the composite sketch
    ``S_X = S_C S_G``. They must satisfy ``K <= s < s1 < s0 <= M``.

    ``reuse`` caches drawn operators across calls with the same ``(M, cfg)``;
    ``overprovision`` keeps all ``s`` columns of the approximate left factor
    instead of the leading ``K``.
    """

    s: int
    s0: int
    s1: int
    eta: float = ETA_DEFAULT
    seed: int = 0
    reuse: bool = False
    overprovision: bool = False

    def __post_init__(self):
        if not 0.0 < self.eta < 1.0:
            raise DomainError(f"eta must lie in (0, 1), got {self.eta}")
        if not 1 <= self.s < self.s1 < self.s0:
            raise DimensionError(
                f"sketch sizes must satisfy 1 <= s < s1 < s0, got s={self.s}, s1={self.s1}, s0={self.s0}"
            )
        seeding.rng(self.seed)  # validates the seed

    @classmethod
    def from_rank(cls, K: int, eta: float = ETA_DEFAULT, seed: int = 0, **kw) -> "SketchConfig":
        """Heuristic sizes ``s = K``, ``s1 = ceil((1 + eta) K)``, ``s0 = 2K``.

        For ``K = 1`` the count-sketch width is bumped to ``s1 + 1`` so the
        strict ordering still holds.
        """
        if K < 1:
            raise DimensionError(f"K must be >= 1, got {K}")
        s1 = math.ceil((1.0 + eta) * K)
        return cls(s=K, s0=max(2 * K, s1 + 1), s1=s1, eta=eta, seed=seed, **kw)

    @classmethod
    def theorem_scale(cls, K: int, eps: float = 0.25, seed: int = 0, **kw) -> "SketchConfig":
        """Sizes of the relative-error regime: ``s1 = K/eps``, ``s0 = K/eps + K^2``.

        The range sketch gets ``s = 2K`` so that it is oversampled while staying
        below ``s1``.
        """
        s1 = math.ceil(K / eps)
        return cls(s=min(2 * K, s1 - 1), s0=s1 + K * K, s1=s1, seed=seed, **kw)

    def validate(self, K: int, M: int) -> None:
        if not 1 <= K <= self.s:
            raise DimensionError(f"need 1 <= K <= s, got K={K}, s={self.s}")
        if self.s0 > M:
            raise DimensionError(f"count-sketch width s0={self.s0} exceeds M={M}")

    def with_seed(self, seed: int) -> "SketchConfig":
        return SketchConfig(self.s, self.s0, self.s1, self.eta, seed, self.reuse, self.overprovision)


@dataclass(frozen=True, eq=False)
class CountSketch:
    """Sparse ``rows x cols`` matrix with one ``+-1`` per row."""

    indices: np.ndarray
    signs: np.ndarray
    cols: int

    @property
    def rows(self) -> int:
        return self.indices.shape[0]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def toarray(self) -> np.ndarray:
        S = np.zeros(self.shape)
        S[np.arange(self.rows), self.indices] = self.signs
        return S


@dataclass(frozen=True, eq=False)
class CompositeSketch:
    """``S_X = S_C @ S_G`` kept in factored form."""

    count: CountSketch
    gaussian: np.ndarray

    @property
    def shape(self) -> tuple[int, int]:
        return self.count.rows, self.gaussian.shape[1]

    def toarray(self) -> np.ndarray:
        return self.count.toarray() @ self.gaussian


def _check_sizes(m: int, s: int, what: str) -> None:
    if not 1 <= s <= m:
        raise DimensionError(f"{what}: need 1 <= width <= rows, got width={s}, rows={m}")


def gaussian_sketch(m: int, s: int, seed: int) -> np.ndarray:
    """``m x s`` real matrix with i.i.d. ``N(0, 1) / sqrt(s)`` entries."""
    _check_sizes(m, s, "gaussian_sketch")
    return seeding.rng(seed, seeding.STREAM_GAUSSIAN).standard_normal((m, s)) / np.sqrt(s)


def count_sketch(m: int, s0: int, seed: int) -> CountSketch:
    _check_sizes(m, s0, "count_sketch")
    r = seeding.rng(seed, seeding.STREAM_COUNT)
    indices = r.integers(0, s0, size=m)
    signs = r.choice(np.array([-1.0, 1.0]), size=m)
    return CountSketch(indices, signs, s0)


def draw_composite(cfg: SketchConfig, m: int) -> CompositeSketch:
    if cfg.s0 > m:
        raise DimensionError(f"count-sketch width s0={cfg.s0} exceeds rows m={m}")
    return CompositeSketch(
        count_sketch(m, cfg.s0, seeding.derive_seed(cfg.seed, seeding.STREAM_COUNT)),
        gaussian_sketch(cfg.s0, cfg.s1, seeding.derive_seed(cfg.seed, seeding.STREAM_COMPOSITE_GAUSSIAN)),
    )


def composite_sketch(cfg: SketchConfig, m: int) -> np.ndarray:
    """Dense ``m x s1`` composite sketch ``S_C @ S_G``."""
    return draw_composite(cfg, m).toarray()


def range_sketch(cfg: SketchConfig, m: int) -> np.ndarray:
    """The Gaussian ``m x s`` sketch that forms ``C = R S``."""
    return gaussian_sketch(m, cfg.s, seeding.derive_seed(cfg.seed, seeding.STREAM_GAUSSIAN))


@lru_cache(maxsize=32)
def _cached_operators(cfg: SketchConfig, m: int):
    S = range_sketch(cfg, m)
    SX = draw_composite(cfg, m)
    S.flags.writeable = False
    return S, SX


def sketch_operators(cfg: SketchConfig, m: int) -> tuple[np.ndarray, CompositeSketch]:
    """``(S, S_X)`` for one estimation; cached when ``cfg.reuse`` is set."""
    if cfg.reuse:
        return _cached_operators(cfg, m)
    return range_sketch(cfg, m), draw_composite(cfg, m)


def _real_left(S: np.ndarray, A: np.ndarray) -> np.ndarray:
    # Real S against complex A as one real GEMM over the interleaved (re, im) view.
    if np.iscomplexobj(A):
        A = np.ascontiguousarray(A, dtype=np.complex128)
        n = A.shape[1]
        out = S.T @ A.view(np.float64).reshape(A.shape[0], 2 * n)
        return np.ascontiguousarray(out).view(np.complex128)
    return S.T @ A


def _count_left(S: CountSketch, A: np.ndarray) -> np.ndarray:
    # Each entry of A is read and sign-multiplied exactly once, then bucket-summed.
    order = np.argsort(S.indices, kind="stable")
    rows = A[order] * S.signs[order][:, None]
    counts = np.bincount(S.indices, minlength=S.cols)
    starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
    hit = counts > 0
    out = np.zeros((S.cols, A.shape[1]), dtype=rows.dtype)
    out[hit] = np.add.reduceat(rows, starts[hit], axis=0)
    return out


def apply_sketch_left(S, A) -> np.ndarray:
    """Return ``S.T @ A`` for a dense, count or composite sketch ``S``.

    A 1-D ``A`` is treated as a single column and a 1-D result is returned.
    Count sketches are applied in one pass over ``A`` without forming a dense
    product.
    """
    A = np.asarray(A)
    vector = A.ndim == 1
    if vector:
        A = A[:, None]
    if A.ndim != 2:
        raise DimensionError(f"sketch input must be 1-D or 2-D, got ndim={A.ndim}")
    rows = S.shape[0]
    if A.shape[0] != rows:
        raise DimensionError(f"sketch has {rows} rows but input has {A.shape[0]}")
    if isinstance(S, CountSketch):
        out = _count_left(S, A)
    elif isinstance(S, CompositeSketch):
        out = _real_left(S.gaussian, _count_left(S.count, A))
    else:
        S = np.asarray(S)
        if S.ndim != 2:
            raise DimensionError("dense sketch must be 2-D")
        out = _real_left(S, A) if np.isrealobj(S) else S.T @ A
    return out[:, 0] if vector else out
