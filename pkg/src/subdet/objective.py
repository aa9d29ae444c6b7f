"""The subset objective and exact k-DPP probability oracles.

Two problem flavors share one interface:

* ``kernel``: maximize log det K[S] for a symmetric positive definite K.
* ``design``: maximize log det X[S]^T X[S], the D-criterion of the
  candidate rows S of a design matrix X (n candidates x p model terms).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    InstanceTooLargeError,
    InvalidSubsetError,
    NotPositiveDefiniteError,
    ObjectiveUndefinedError,
    ValidationError,
)
from .linalg import PIVOT_RTOL, as_subset, eigendecompose, log_det_spd, symmetric_matrix

KERNEL = "kernel"
DESIGN = "design"

ENUMERATION_LIMIT = 20


@dataclass(frozen=True)
class ObjectiveSpec:
    flavor: str
    matrix: np.ndarray

    def __post_init__(self):
        if self.flavor not in (KERNEL, DESIGN):
            raise ValidationError(f"unknown objective flavor {self.flavor!r}")

    @classmethod
    def kernel(cls, k_matrix, tol: float = 0.0) -> "ObjectiveSpec":
        return cls(KERNEL, symmetric_matrix(k_matrix, tol=tol))

    @classmethod
    def design(cls, x) -> "ObjectiveSpec":
        x = np.array(x, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if x.ndim != 2 or x.shape[1] < 1:
            raise ValidationError(f"design matrix must be 2-D with p >= 1, got {x.shape}")
        if x.shape[0] < x.shape[1]:
            raise ValidationError(f"design needs n >= p candidates, got {x.shape}")
        if not np.all(np.isfinite(x)):
            raise ValidationError("design matrix has non-finite entries")
        x.flags.writeable = False
        return cls(DESIGN, x)

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def p(self) -> int:
        """Number of model terms (design) or 0 (kernel)."""
        return self.matrix.shape[1] if self.flavor == DESIGN else 0

    def min_k(self) -> int:
        return max(1, self.p)

    def check_k(self, k: int) -> int:
        k = int(k)
        if not self.min_k() <= k <= self.n:
            raise InvalidSubsetError(
                f"subset size k={k} outside [{self.min_k()}, {self.n}] for this instance"
            )
        return k

    def objective_matrix(self, subset: Sequence[int]) -> np.ndarray:
        idx = np.asarray(subset, dtype=np.intp)
        if self.flavor == KERNEL:
            return self.matrix[np.ix_(idx, idx)]
        rows = self.matrix[idx]
        return rows.T @ rows


def log_objective(spec: ObjectiveSpec, subset: Sequence[int], k: int | None = None) -> float:
    """log v(S): log det K[S] or log det X[S]^T X[S].

    Raises ObjectiveUndefinedError when the matrix is not positive definite.
    """
    s = as_subset(subset, spec.n)
    if k is not None and len(s) != k:
        raise InvalidSubsetError(f"expected {k} indices, got {len(s)}")
    spec.check_k(len(s))
    try:
        return log_det_spd(spec.objective_matrix(s))
    except NotPositiveDefiniteError as exc:
        raise ObjectiveUndefinedError(exc.pivot, exc.value) from None


def fitness(spec: ObjectiveSpec, subset: Sequence[int]) -> float:
    """log_objective with undefined subsets mapped to -inf."""
    try:
        return log_objective(spec, subset)
    except ObjectiveUndefinedError:
        return -math.inf


def log_objective_many(spec: ObjectiveSpec, subsets: np.ndarray) -> np.ndarray:
    """Vectorized log objective for a (B, k) array of 0-based subsets.

    Undefined subsets come back as -inf instead of raising.
    """
    subsets = np.asarray(subsets, dtype=np.intp)
    if subsets.shape[0] == 0:
        return np.empty(0)
    if spec.flavor == KERNEL:
        mats = spec.matrix[subsets[:, :, None], subsets[:, None, :]]
    else:
        rows = spec.matrix[subsets]
        mats = np.einsum("bij,bik->bjk", rows, rows)
    try:
        low = np.linalg.cholesky(mats)
    except np.linalg.LinAlgError:
        return np.array([_safe_log_det(m) for m in mats])
    diag = np.diagonal(low, axis1=1, axis2=2)
    floor = PIVOT_RTOL * np.max(np.diagonal(mats, axis1=1, axis2=2), axis=1)
    out = 2.0 * np.sum(np.log(diag), axis=1)
    out[~np.all(diag * diag > floor[:, None], axis=1)] = -np.inf
    return out


def _safe_log_det(m: np.ndarray) -> float:
    try:
        return log_det_spd(m)
    except NotPositiveDefiniteError:
        return -math.inf


def marginal_kernel(l_matrix: np.ndarray) -> np.ndarray:
    """K = L (L + I)^-1, computed through the eigendecomposition of L."""
    eig = eigendecompose(l_matrix)
    lam = np.clip(eig.eigenvalues, 0.0, None)
    v = eig.eigenvectors
    return symmetric_matrix((v * (lam / (1.0 + lam))) @ v.T, tol=1e-12)


def _enumeration_guard(n: int):
    if n > ENUMERATION_LIMIT:
        raise InstanceTooLargeError(
            f"exact k-DPP enumeration is limited to n <= {ENUMERATION_LIMIT}, got n={n}"
        )


def _enumerated_dets(l_matrix: np.ndarray, k: int):
    n = l_matrix.shape[0]
    if not 1 <= k <= n:
        raise InvalidSubsetError(f"k={k} outside [1, {n}]")
    combos = np.array(list(itertools.combinations(range(n), k)), dtype=np.intp)
    dets = np.linalg.det(l_matrix[combos[:, :, None], combos[:, None, :]])
    return combos, np.clip(dets, 0.0, None)


def kdpp_pmf(l_matrix: np.ndarray, k: int) -> dict[tuple[int, ...], float]:
    """Exact k-DPP probabilities det L[Y] / sum_{|Y'|=k} det L[Y'] by enumeration."""
    l_matrix = np.asarray(l_matrix, dtype=float)
    _enumeration_guard(l_matrix.shape[0])
    combos, dets = _enumerated_dets(l_matrix, k)
    total = dets.sum()
    if not total > 0:
        raise InvalidSubsetError(f"kernel has rank < k={k}; k-DPP is empty")
    probs = dets / total
    return {tuple(int(i) for i in c): float(p) for c, p in zip(combos, probs)}


def kdpp_normalizer_check(l_matrix: np.ndarray, k: int) -> tuple[float, float]:
    """Return (enumerated normalizer, e_k of the eigenvalues) for comparison."""
    from .dpp import elementary_symmetric

    l_matrix = np.asarray(l_matrix, dtype=float)
    _enumeration_guard(l_matrix.shape[0])
    _, dets = _enumerated_dets(l_matrix, k)
    lam = eigendecompose(l_matrix).eigenvalues
    table = elementary_symmetric(lam, k)
    return float(dets.sum()), float(table.values[k, -1])
