"""Truncated SVD pseudo-inverse for symmetric positive semidefinite systems."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from rbfvar.errors import DomainError, NumericError

__all__ = ["TsvdFactors", "tsvd_factorize", "tsvd_apply", "effective_condition"]


@dataclass(frozen=True)
class TsvdFactors:
    """Retained singular triplets ``A ~ U diag(sigma) V^T``.

    Attributes
    ----------
    U, V : ndarray, shape (n, k)
        Retained left and right singular vectors.
    sigma : ndarray, shape (k,)
        Retained singular values, descending.
    sigma_full : ndarray, shape (n,)
        All singular values of the factorized matrix.
    tau : float
        Relative truncation threshold.
    """

    U: np.ndarray
    V: np.ndarray
    sigma: np.ndarray
    sigma_full: np.ndarray
    tau: float

    @property
    def rank(self) -> int:
        return int(self.sigma.shape[0])

    @property
    def n(self) -> int:
        return int(self.sigma_full.shape[0])

    @property
    def sigma1(self) -> float:
        return float(self.sigma_full[0]) if self.sigma_full.size else 0.0

    def pinv(self) -> np.ndarray:
        """Dense truncated pseudo-inverse ``V diag(1/sigma) U^T``."""
        return (self.V / self.sigma) @ self.U.T


def tsvd_factorize(A, tau: float) -> TsvdFactors:
    """Factorize ``A`` and keep the triplets with ``sigma_k > tau * sigma_1``.

    Parameters
    ----------
    A : array_like, shape (n, n)
        Square matrix, in practice symmetric positive semidefinite.
    tau : float
        Relative threshold in ``(0, 1)``.

    Returns
    -------
    TsvdFactors

    Raises
    ------
    NumericError
        If ``A`` has non-finite entries or the SVD fails.
    DomainError
        If ``A`` is not square or ``tau`` is out of range.
    """
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {A.shape}")
    if not 0 < tau < 1:
        raise DomainError(f"truncation threshold must lie in (0, 1), got {tau}")
    if not np.all(np.isfinite(A)):
        raise NumericError("matrix has non-finite entries")
    try:
        U, s, Vt = np.linalg.svd(A)
    except np.linalg.LinAlgError as exc:
        raise NumericError(f"SVD failed: {exc}") from exc
    # a zero matrix keeps nothing, so its pseudo-inverse is zero
    keep = s > tau * s[0] if s.size else np.zeros(0, dtype=bool)
    return TsvdFactors(
        U=np.ascontiguousarray(U[:, keep]),
        V=np.ascontiguousarray(Vt[keep].T),
        sigma=s[keep].copy(),
        sigma_full=s,
        tau=float(tau),
    )


def tsvd_apply(factors: TsvdFactors, rhs) -> np.ndarray:
    """``V diag(1/sigma) U^T rhs`` for a vector or a stack of columns."""
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape[0] != factors.n:
        raise DomainError(f"right-hand side has {rhs.shape[0]} rows, expected {factors.n}")
    coeff = factors.U.T @ rhs
    if coeff.ndim == 1:
        coeff = coeff / factors.sigma
    else:
        coeff = coeff / factors.sigma[:, None]
    return factors.V @ coeff


def effective_condition(factors: TsvdFactors) -> float:
    """``sigma_1 / sigma_k`` over the retained spectrum."""
    if factors.rank == 0:
        raise NumericError("condition number undefined when no singular value is retained")
    return float(factors.sigma[0] / factors.sigma[-1])
