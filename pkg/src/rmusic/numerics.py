"""Dense complex linear-algebra kernels.

Thin wrappers over LAPACK (through numpy/scipy) that enforce the shape,
finiteness and ordering contracts the estimators rely on. Every matrix is a
plain 2-D ``numpy.ndarray`` of dtype ``complex128``; there is no matrix class.

Conjugate transposes (``.conj().T``) are used wherever a transpose of a
complex factor appears; real sketching matrices use the plain transpose.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DimensionError, NumericalError

RCOND_DEFAULT = 1e-12


def as_matrix(A, name: str = "matrix") -> np.ndarray:
    """Return ``A`` as a finite, non-empty 2-D complex array.

    Raises
    ------
    DimensionError
        If ``A`` is not two-dimensional or has an empty axis.
    NumericalError
        If any entry is NaN or infinite.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] < 1 or A.shape[1] < 1:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {A.shape}")
    A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise NumericalError(f"{name} contains non-finite entries")
    return A


@dataclass(frozen=True)
class SvdResult:
    """Thin SVD ``A = U @ diag(singular_values) @ V.conj().T``."""

    U: np.ndarray
    singular_values: np.ndarray
    V: np.ndarray

    @property
    def rank(self) -> int:
        return self.singular_values.shape[0]

    def reconstruct(self) -> np.ndarray:
        return (self.U * self.singular_values) @ self.V.conj().T


@dataclass(frozen=True)
class QrResult:
    """Thin QR ``A = Q @ R`` with ``R`` square upper triangular."""

    Q: np.ndarray
    R: np.ndarray


def qr_thin(A) -> QrResult:
    """Economy QR of a tall (or square) matrix."""
    A = as_matrix(A, "A")
    m, n = A.shape
    if m < n:
        raise DimensionError(f"qr_thin needs rows >= cols, got {m}x{n}")
    Q, R = np.linalg.qr(A, mode="reduced")
    # LAPACK already leaves exact zeros below the diagonal; np.triu makes it a contract.
    return QrResult(Q, np.triu(R))


def svd_full(A) -> SvdResult:
    """Thin SVD with singular values sorted non-increasing."""
    A = as_matrix(A, "A")
    try:
        U, s, Vh = np.linalg.svd(A, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    if not np.all(np.isfinite(s)):
        raise NumericalError("SVD produced non-finite singular values")
    return SvdResult(U, s, Vh.conj().T)


def svd_truncate(result: SvdResult, k: int) -> SvdResult:
    """Keep the leading ``k`` singular triplets (best rank-k approximation)."""
    if not 1 <= k <= result.rank:
        raise DimensionError(f"truncation rank k={k} outside [1, {result.rank}]")
    return SvdResult(result.U[:, :k], result.singular_values[:k], result.V[:, :k])


def tri_pinv(R, rcond: float = RCOND_DEFAULT) -> np.ndarray:
    """Pseudo-inverse of a square upper-triangular factor.

    A well-conditioned diagonal goes through back substitution. When some
    ``|r_ii| < rcond * max |r_jj|`` the factor is treated as rank deficient and
    the Moore-Penrose inverse is taken from an SVD with the same cutoff.
    """
    R = as_matrix(R, "R_factor")
    n, m = R.shape
    if n != m:
        raise DimensionError(f"R_factor must be square, got {n}x{m}")
    if not 0.0 < rcond < 1.0:
        raise DimensionError(f"rcond must lie in (0, 1), got {rcond}")
    if np.any(np.tril(R, -1) != 0):
        raise DimensionError("R_factor is not upper triangular")
    d = np.abs(np.diag(R))
    dmax = d.max()
    if dmax > 0 and d.min() >= rcond * dmax:
        return scipy.linalg.solve_triangular(R, np.eye(n, dtype=R.dtype), lower=False)
    res = svd_full(R)
    s = res.singular_values
    keep = s > rcond * s[0] if s[0] > 0 else np.zeros_like(s, dtype=bool)
    inv = np.zeros_like(s)
    inv[keep] = 1.0 / s[keep]
    return (res.V * inv) @ res.U.conj().T


def hermitian_part(A) -> np.ndarray:
    """``(A + A^H) / 2``."""
    A = as_matrix(A, "A")
    if A.shape[0] != A.shape[1]:
        raise DimensionError(f"Hermitian part needs a square matrix, got {A.shape}")
    return 0.5 * (A + A.conj().T)


def is_hermitian(A, tol: float = 1e-10) -> bool:
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        return False
    scale = np.linalg.norm(A)
    return bool(np.linalg.norm(A - A.conj().T) <= tol * max(scale, np.finfo(float).tiny))


def orthonormality_error(Q) -> float:
    """``||Q^H Q - I||_F``."""
    Q = np.asarray(Q)
    k = Q.shape[1]
    return float(np.linalg.norm(Q.conj().T @ Q - np.eye(k)))


def principal_angles(A, B) -> np.ndarray:
    """Principal angles (radians, ascending) between ``span(A)`` and ``span(B)``.

    Accurate for tiny angles, unlike ``arccos`` of cosines.
    """
    return np.sort(scipy.linalg.subspace_angles(np.asarray(A), np.asarray(B)))
