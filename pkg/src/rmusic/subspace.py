"""Signal-subspace estimators on a spatial covariance matrix.

``rmusic_subspace`` is the randomized estimator: a Gaussian range sketch
``C = R S``, a composite count+Gaussian sketch ``S_X`` used to solve the
rank-K factor problem ``min ||S_X^T (C X - R)||_F`` through a QR of
``S_X^T C``, and a final SVD kept at sketch scale. The four baselines are
full-SVD MUSIC, an exact top-K eigensolver (block Lanczos), the propagator
method and the diagonally loaded inverse used as a spectrum kernel.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from . import seeding
from .errors import DimensionError, NumericalError, OrthonormalityError, RankDeficiencyError
from .numerics import (
    RCOND_DEFAULT,
    SvdResult,
    as_matrix,
    hermitian_part,
    orthonormality_error,
    qr_thin,
    svd_full,
    svd_truncate,
    tri_pinv,
)
from .sketching import SketchConfig, apply_sketch_left, sketch_operators

METHOD_MUSIC = "music"
METHOD_RMUSIC = "rmusic"
METHOD_KSVD = "ksvd"
METHOD_PROPAGATOR = "propagator"
METHOD_INVERSE = "inverse"
METHODS = (METHOD_MUSIC, METHOD_RMUSIC, METHOD_KSVD, METHOD_PROPAGATOR, METHOD_INVERSE)


@dataclass(frozen=True, eq=False)
class CovarianceMatrix:
    """Hermitian PSD ``M x M`` covariance; symmetrized on construction."""

    R: np.ndarray

    def __post_init__(self):
        R = hermitian_part(as_matrix(self.R, "R"))
        R.flags.writeable = False
        object.__setattr__(self, "R", R)

    @property
    def M(self) -> int:
        return self.R.shape[0]


def as_covariance(R) -> CovarianceMatrix:
    return R if isinstance(R, CovarianceMatrix) else CovarianceMatrix(R)


@dataclass(frozen=True, eq=False)
class SubspaceEstimate:
    basis: np.ndarray
    singular_values: np.ndarray | None
    method: str
    elapsed: float
    config_echo: SketchConfig | None = None

    def __post_init__(self):
        K = self.basis.shape[1]
        err = orthonormality_error(self.basis)
        if err > 1e-6 * np.sqrt(K):
            raise OrthonormalityError(f"{self.method} basis drifted from orthonormal by {err:.3g}")

    @property
    def rank(self) -> int:
        return self.basis.shape[1]


def sample_covariance(Y) -> CovarianceMatrix:
    """``(1/N) Y Y^H`` of an ``M x N`` snapshot matrix."""
    Y = as_matrix(Y, "Y")
    return CovarianceMatrix(Y @ Y.conj().T / Y.shape[1])


def _check_rank(K: int, M: int) -> None:
    if not 1 <= K < M:
        raise DimensionError(f"need 1 <= K < M, got K={K}, M={M}")


def exact_music_subspace(R, K: int) -> tuple[SubspaceEstimate, np.ndarray]:
    """Full SVD of ``R``; leading ``K`` left singular vectors vs. the rest."""
    cov = as_covariance(R)
    _check_rank(K, cov.M)
    t0 = time.perf_counter()
    res = svd_full(cov.R)
    elapsed = time.perf_counter() - t0
    signal = SubspaceEstimate(res.U[:, :K], res.singular_values[:K], METHOD_MUSIC, elapsed)
    return signal, res.U[:, K:]


def _sketched_svd(R: np.ndarray, K: int, cfg: SketchConfig, rcond: float) -> SvdResult:
    M = R.shape[0]
    cfg.validate(K, M)
    S, SX = sketch_operators(cfg, M)
    # C = R S; R is exactly Hermitian, so C = (S^T R)^H reuses the real-GEMM path.
    C = apply_sketch_left(S, R).conj().T
    A = apply_sketch_left(SX, C)
    B = apply_sketch_left(SX, R)
    qr = qr_thin(A)
    omega_pinv = tri_pinv(qr.R, rcond)
    rank = cfg.s if cfg.overprovision else K
    top = svd_truncate(svd_full(qr.Q.conj().T @ B), rank)
    # C X_K = C Omega^+ U_B Sigma_B V_B^H; factor the M x rank part only.
    D = C @ (omega_pinv @ (top.U * top.singular_values))
    outer = svd_full(D)
    if not outer.singular_values[0] > 0:
        raise RankDeficiencyError("sketched factor is numerically zero")
    return SvdResult(outer.U, outer.singular_values, top.V @ outer.V)


def rank_k_svd_via_sketch(
    R, cfg: SketchConfig, K: int, rcond: float = RCOND_DEFAULT
) -> tuple[SvdResult, float]:
    """Approximate rank-K SVD of ``R`` and its residual ``||C X - R||_F^2``."""
    cov = as_covariance(R)
    _check_rank(K, cov.M)
    res = _sketched_svd(cov.R, K, cfg, rcond)
    residual = float(np.linalg.norm(res.reconstruct() - cov.R) ** 2)
    return res, residual


def rmusic_subspace(R, K: int, cfg: SketchConfig | None = None, rcond: float = RCOND_DEFAULT) -> SubspaceEstimate:
    """Randomized signal subspace.

    The elapsed time covers sketch generation through re-orthonormalization
    of the returned basis. With ``cfg.overprovision`` the basis keeps all
    ``cfg.s`` columns.
    """
    cov = as_covariance(R)
    _check_rank(K, cov.M)
    cfg = SketchConfig.from_rank(K) if cfg is None else cfg
    t0 = time.perf_counter()
    res = _sketched_svd(cov.R, K, cfg, rcond)
    basis = qr_thin(res.U).Q
    elapsed = time.perf_counter() - t0
    return SubspaceEstimate(basis, res.singular_values, METHOD_RMUSIC, elapsed, cfg)


def block_lanczos(R: np.ndarray, K: int, tol: float = 1e-12, seed: int = 0) -> tuple[np.ndarray, np.ndarray]:
    """Top-``K`` eigenpairs of a Hermitian matrix by block Lanczos.

    Block size ``K``, full reorthogonalization and a Rayleigh-Ritz step after
    every block. Stops when every wanted Ritz residual is below
    ``tol * |theta_max|`` or the Krylov space is exhausted (then exact). The
    start block is drawn from a fixed seed, so results are deterministic.

    Returns eigenvalues (descending) and orthonormal eigenvectors.
    """
    M = R.shape[0]
    g = seeding.rng(seed, K, M)
    X = g.standard_normal((M, K)) + 1j * g.standard_normal((M, K))
    basis = qr_thin(X).Q
    W = R @ basis
    T = basis.conj().T @ W
    last = slice(0, K)
    while True:
        theta, Y = np.linalg.eigh(hermitian_part(T))
        theta, Y = theta[::-1][:K], Y[:, ::-1][:, :K]
        Z = basis @ Y
        resid = np.linalg.norm(W @ Y - Z * theta, axis=0)
        scale = max(abs(theta[0]), np.finfo(float).tiny)
        dim = basis.shape[1]
        if np.all(resid <= tol * scale) or dim >= M:
            return theta, qr_thin(Z).Q
        P = W[:, last]
        for _ in range(2):
            P = P - basis @ (basis.conj().T @ P)
        U, s, _ = np.linalg.svd(P, full_matrices=False)
        keep = s > 1e-13 * max(scale, s[0] if s.size else 0.0)
        new = U[:, keep][:, : M - dim]
        if new.shape[1] == 0:
            return theta, qr_thin(Z).Q
        Wn = R @ new
        cross = basis.conj().T @ Wn
        T = np.block([[T, cross], [cross.conj().T, new.conj().T @ Wn]])
        last = slice(dim, dim + new.shape[1])
        basis = np.hstack([basis, new])
        W = np.hstack([W, Wn])


def exact_ksvd_subspace(R, K: int) -> SubspaceEstimate:
    """Top-K singular subspace of the PSD ``R`` by block Lanczos."""
    cov = as_covariance(R)
    _check_rank(K, cov.M)
    t0 = time.perf_counter()
    try:
        theta, basis = block_lanczos(cov.R, K)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"block Lanczos failed: {exc}") from exc
    elapsed = time.perf_counter() - t0
    return SubspaceEstimate(basis, np.abs(theta), METHOD_KSVD, elapsed)


def propagator_subspace(
    R, K: int, rcond: float = RCOND_DEFAULT, orthonormalize: bool = False
) -> tuple[SubspaceEstimate, np.ndarray]:
    """Propagator estimate from the column partition ``R = [G | H]``.

    ``P = (G^H G)^{-1} G^H H`` and ``Q_n = [P ; -I]`` (``M x (M-K)``) annihilates
    the steering vectors in the noise-free case. The signal basis is the
    orthonormalized range of ``[I ; P^H]``, which is orthogonal to ``Q_n``.

    The returned ``M x M`` noise kernel is the classic ``Q_n Q_n^H``, whose
    quadratic form gives the propagator spectrum ``1 / ||P^H a_1 - a_2||^2``.
    With ``orthonormalize=True`` it is instead the orthogonal projector onto
    ``range(Q_n)``. Both are assembled blockwise without any ``M x M``
    factorization.
    """
    cov = as_covariance(R)
    M = cov.M
    _check_rank(K, M)
    t0 = time.perf_counter()
    G, H = cov.R[:, :K], cov.R[:, K:]
    GhG = G.conj().T @ G
    d = np.linalg.svd(GhG, compute_uv=False)
    if not d[-1] > rcond * d[0]:
        raise RankDeficiencyError("G^H G is numerically singular")
    P = np.linalg.solve(GhG, G.conj().T @ H)
    basis = qr_thin(np.vstack([np.eye(K), P.conj().T])).Q
    if orthonormalize:
        kernel = np.eye(M, dtype=np.complex128) - basis @ basis.conj().T
    else:
        kernel = np.empty((M, M), dtype=np.complex128)
        kernel[:K, :K] = P @ P.conj().T
        kernel[:K, K:] = -P
        kernel[K:, :K] = -P.conj().T
        kernel[K:, K:] = np.eye(M - K)
    elapsed = time.perf_counter() - t0
    return SubspaceEstimate(basis, None, METHOD_PROPAGATOR, elapsed), kernel


def default_loading(R) -> float:
    cov = as_covariance(R)
    return 1e-6 * float(np.real(np.trace(cov.R))) / cov.M


def inverse_spectrum_weights(R, loading: float | None = None) -> np.ndarray:
    """``(R + loading I)^{-1}``, the kernel of ``1 / (a^H (R + loading I)^{-1} a)``.

    ``loading`` defaults to ``1e-6 * trace(R) / M``.
    """
    cov = as_covariance(R)
    delta = default_loading(cov) if loading is None else float(loading)
    if delta < 0:
        raise DimensionError(f"loading must be non-negative, got {delta}")
    w, V = np.linalg.eigh(cov.R + delta * np.eye(cov.M))
    top = np.abs(w).max()
    if not top > 0 or w.min() <= 1e-14 * top:
        raise RankDeficiencyError("R + loading*I is not positive definite")
    return hermitian_part((V / w) @ V.conj().T)
