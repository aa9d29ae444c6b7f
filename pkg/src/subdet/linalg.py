"""Dense symmetric linear algebra: principal submatrices, log-determinants
and eigendecompositions.

Matrices are plain ``numpy`` arrays. Functions that build a matrix for the
rest of the package return read-only arrays so they can be shared between
workers without copying.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    InvalidSubsetError,
    NotPositiveDefiniteError,
    NumericalFailure,
    ValidationError,
)

PIVOT_RTOL = 1e-12


def _freeze(a: np.ndarray) -> np.ndarray:
    a.flags.writeable = False
    return a


def symmetric_matrix(a, tol: float = 0.0) -> np.ndarray:
    """Validate ``a`` as a finite square symmetric matrix.

    Asymmetry up to ``tol`` (absolute, scaled by ``max(1, max|a|)``) is
    removed by averaging with the transpose; anything larger is an error.
    The returned array is a read-only float64 copy.
    """
    a = np.array(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise ValidationError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    asym = np.max(np.abs(a - a.T))
    if asym > tol * max(1.0, float(np.max(np.abs(a)))):
        raise ValidationError(f"matrix is not symmetric (max |a_ij - a_ji| = {asym:.3g})")
    if asym > 0:
        a = 0.5 * (a + a.T)
    return _freeze(a)


def as_subset(indices: Iterable[int], n: int | None = None) -> tuple[int, ...]:
    """Normalize 0-based ``indices`` to a strictly increasing tuple.

    Raises InvalidSubsetError on duplicates, negative indices, or indices
    ``>= n`` when ``n`` is given.
    """
    s = tuple(sorted(int(i) for i in indices))
    if not s:
        raise InvalidSubsetError("subset is empty")
    if len(set(s)) != len(s):
        raise InvalidSubsetError(f"subset has duplicate indices: {s}")
    if s[0] < 0 or (n is not None and s[-1] >= n):
        raise InvalidSubsetError(f"subset index out of range [0, {n}): {s}")
    return s


def principal_submatrix(a: np.ndarray, subset: Sequence[int]) -> np.ndarray:
    """Rows and columns of ``a`` restricted to ``subset`` (0-based)."""
    idx = np.asarray(subset, dtype=np.intp)
    n = a.shape[0]
    if idx.ndim != 1 or idx.size == 0 or idx.min() < 0 or idx.max() >= n:
        raise InvalidSubsetError(f"subset index out of range [0, {n}): {list(idx)}")
    return a[np.ix_(idx, idx)]


def _locate_bad_pivot(a: np.ndarray, floor: float) -> tuple[int, float]:
    # Slow path: only run after the LAPACK factorization has already failed.
    n = a.shape[0]
    low = np.zeros_like(a)
    for j in range(n):
        d = a[j, j] - low[j, :j] @ low[j, :j]
        if not d > floor:
            return j, float(d)
        low[j, j] = np.sqrt(d)
        low[j + 1:, j] = (a[j + 1:, j] - low[j + 1:, :j] @ low[j, :j]) / low[j, j]
    return n - 1, 0.0


def log_det_spd(a: np.ndarray) -> float:
    """log det(a) for a symmetric positive definite matrix via Cholesky.

    A pivot ``<= 1e-12 * max(diag(a))`` counts as a failure; the error
    carries the index of the offending pivot.
    """
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 0:
        return 0.0
    dmax = float(np.max(np.diagonal(a)))
    floor = PIVOT_RTOL * dmax if dmax > 0 else 0.0
    try:
        low = np.linalg.cholesky(a)
    except np.linalg.LinAlgError:
        pivot, value = _locate_bad_pivot(a, floor)
        raise NotPositiveDefiniteError(pivot, value) from None
    diag = np.diagonal(low)
    pivots = diag * diag
    bad = np.flatnonzero(~(pivots > floor))
    if bad.size:
        raise NotPositiveDefiniteError(int(bad[0]), float(pivots[bad[0]]))
    return float(2.0 * np.sum(np.log(diag)))


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues in ascending order; eigenvectors are the matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def n(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T


def eigendecompose(a: np.ndarray) -> EigenDecomposition:
    try:
        lam, vec = np.linalg.eigh(np.asarray(a, dtype=float))
    except np.linalg.LinAlgError as exc:
        raise NumericalFailure(f"symmetric eigensolver did not converge: {exc}") from None
    return EigenDecomposition(_freeze(lam), _freeze(vec))
