"""Exact k-DPP sampling and the best-of-M sampling optimizer.

Sampling has two phases. Phase 1 picks k eigenvectors of the L-ensemble
kernel, eigenvector n being kept with probability
``lam_n * e_{r-1}(lam_1..lam_{n-1}) / e_r(lam_1..lam_n)`` where r is the
number still to pick. Phase 2 samples the projection DPP spanned by the
chosen eigenvectors one item at a time.

Phase 2 never materializes the shrinking basis V explicitly. With the chosen
eigenvectors as columns of an orthonormal ``n x k`` matrix B, the basis left
after selecting items ``y_1..y_t`` is ``B Q`` where Q spans the complement of
the Gram-Schmidt vectors of rows ``B[y_1], ..., B[y_t]``. The selection
probabilities ``(1/|V|) sum_v (v^T e_i)^2`` are therefore the diagonal of
``B (I - U U^T) B^T`` divided by ``k - t``, which is updated in O(n k) per step.
"""

from __future__ import annotations

import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, InvalidKernelError, NumericalFailure
from .linalg import EigenDecomposition, eigendecompose
from .objective import DESIGN, ObjectiveSpec, log_objective_many
from .results import SearchResult

NEGATIVE_RTOL = 1e-10
RANK_RTOL = 1e-10
PROB_SUM_TOL = 1e-8
DEPENDENT_TOL = 1e-10
BATCH = 512


@dataclass(frozen=True)
class ElementarySymmetricTable:
    """``values[j, m]`` = e_j(lam_1, ..., lam_m) for j <= k_max, m <= N."""

    values: np.ndarray
    eigenvalues: np.ndarray

    @property
    def k_max(self) -> int:
        return self.values.shape[0] - 1


def _clean_eigenvalues(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    top = float(lam.max()) if lam.size else 0.0
    if lam.size and lam.min() < -NEGATIVE_RTOL * max(top, 0.0):
        raise InvalidKernelError(
            f"kernel is not positive semidefinite (eigenvalue {lam.min():.3g})"
        )
    return np.clip(lam, 0.0, None)


def elementary_symmetric(lam, k_max: int) -> ElementarySymmetricTable:
    """Table of elementary symmetric polynomials of prefixes of ``lam``.

    Filled left to right with e_j(m) = e_j(m-1) + lam_m e_{j-1}(m-1).
    Eigenvalues below -1e-10 * max(lam) are rejected, smaller negatives are
    clamped to zero.
    """
    lam = _clean_eigenvalues(lam)
    n = lam.shape[0]
    if not 0 <= k_max <= n:
        raise ConfigError(f"k_max={k_max} outside [0, {n}]")
    e = np.zeros((k_max + 1, n + 1))
    e[0, :] = 1.0
    for m in range(1, n + 1):
        e[1:, m] = e[1:, m - 1] + lam[m - 1] * e[:-1, m - 1]
    return ElementarySymmetricTable(e, lam)


def numerical_rank(lam) -> int:
    lam = np.asarray(lam, dtype=float)
    top = float(lam.max()) if lam.size else 0.0
    return int(np.sum(lam > RANK_RTOL * top)) if top > 0 else 0


def _prepare(eig: EigenDecomposition, k: int) -> ElementarySymmetricTable:
    lam = _clean_eigenvalues(eig.eigenvalues)
    if not 1 <= k <= numerical_rank(lam):
        raise ConfigError(f"k={k} must be in [1, rank={numerical_rank(lam)}] of the kernel")
    # Acceptance ratios are invariant under rescaling lam; this keeps e_k finite.
    return elementary_symmetric(lam / lam.max(), k)


def _select_eigenvectors(table: ElementarySymmetricTable, k: int, rng) -> np.ndarray:
    lam, e = table.eigenvalues, table.values
    chosen = []
    remaining = k
    for m in range(lam.shape[0], 0, -1):
        u = rng.random()
        denom = e[remaining, m]
        ratio = lam[m - 1] * e[remaining - 1, m - 1] / denom if denom > 0 else 1.0
        if u < ratio:
            chosen.append(m - 1)
            remaining -= 1
            if remaining == 0:
                break
    return np.array(chosen[::-1], dtype=np.intp)


def _project_sample(basis: np.ndarray, rng) -> tuple[int, ...] | None:
    """Sample the projection DPP spanned by the orthonormal columns of ``basis``.

    Returns None when the probability vector drifts off normalization or a
    chosen row is numerically dependent on earlier ones.
    """
    n, k = basis.shape
    diag = np.einsum("ij,ij->i", basis, basis)
    gs = np.empty((k, k))
    items = []
    for t in range(k):
        total = diag.sum()
        if abs(total / (k - t) - 1.0) > PROB_SUM_TOL:
            return None
        cdf = np.cumsum(diag)
        i = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), n - 1)
        items.append(i)
        if t == k - 1:
            break
        w = basis[i].copy()
        prev = gs[:t]
        for _ in range(2):
            w -= prev.T @ (prev @ w)
        norm = np.sqrt(w @ w)
        if norm < DEPENDENT_TOL:
            return None
        gs[t] = w / norm
        diag -= np.square(basis @ gs[t])
        np.clip(diag, 0.0, None, out=diag)
        diag[items] = 0.0
    return tuple(sorted(items))


def sample_kdpp(eig: EigenDecomposition, k: int, rng) -> tuple[int, ...]:
    """Draw one k-subset (0-based, increasing) from the k-DPP with kernel
    ``V diag(lam) V^T``."""
    table = _prepare(eig, k)
    for _ in range(2):
        cols = _select_eigenvectors(table, k, rng)
        out = _project_sample(eig.eigenvectors[:, cols], rng)
        if out is not None:
            return out
    raise NumericalFailure(
        f"projection sampling lost normalization twice (k={k}, n={eig.n})"
    )


def _sample_batch(eig: EigenDecomposition, table: ElementarySymmetricTable, k: int,
                  size: int, rng) -> np.ndarray:
    """``size`` independent k-DPP draws at once, as a (size, k) sorted array."""
    lam, e = table.eigenvalues, table.values
    n = lam.shape[0]
    remaining = np.full(size, k, dtype=np.intp)
    keep = np.zeros((size, n), dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for m in range(n, 0, -1):
            u = rng.random(size)
            active = remaining > 0
            r = np.maximum(remaining, 1)
            denom = e[r, m]
            ratio = np.where(denom > 0, lam[m - 1] * e[r - 1, m - 1] / denom, 1.0)
            accept = active & (u < ratio)
            keep[accept, m - 1] = True
            remaining -= accept
    cols = np.nonzero(keep)[1].reshape(size, k)
    basis = np.transpose(eig.eigenvectors[:, cols], (1, 0, 2))  # (size, n, k)

    rows = np.arange(size)
    diag = np.einsum("bij,bij->bi", basis, basis)
    gs = np.zeros((size, k, k))
    items = np.empty((size, k), dtype=np.intp)
    bad = np.zeros(size, dtype=bool)
    for t in range(k):
        total = diag.sum(axis=1)
        bad |= np.abs(total / (k - t) - 1.0) > PROB_SUM_TOL
        cdf = np.cumsum(diag, axis=1)
        x = rng.random(size) * cdf[:, -1]
        i = np.minimum(np.sum(cdf <= x[:, None], axis=1), n - 1)
        items[:, t] = i
        if t == k - 1:
            break
        w = basis[rows, i]  # (size, k)
        prev = gs[:, :t]
        for _ in range(2):
            w = w - np.matmul(np.matmul(prev, w[:, :, None]).transpose(0, 2, 1), prev)[:, 0]
        norm = np.sqrt(np.einsum("bk,bk->b", w, w))
        bad |= norm < DEPENDENT_TOL
        gs[:, t] = w / np.where(norm > 0, norm, 1.0)[:, None]
        diag -= np.square(np.matmul(basis, gs[:, t, :, None])[:, :, 0])
        np.clip(diag, 0.0, None, out=diag)
        diag[rows[:, None], items[:, :t + 1]] = 0.0
    items.sort(axis=1)
    for b in np.flatnonzero(bad):
        items[b] = sample_kdpp(eig, k, rng)
    return items


@dataclass(frozen=True)
class DPPConfig:
    """Budget and reproducibility settings for :func:`solve_dpp`.

    ``design_degree`` sets the polynomial proposal kernel used for design
    instances (see :func:`proposal_kernel`).
    """

    k: int
    iterations: int = 10_000
    seed: int | None = None
    workers: int = 1
    design_degree: int = 3

    def __post_init__(self):
        if self.k < 1:
            raise ConfigError(f"k must be >= 1, got {self.k}")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.design_degree < 1:
            raise ConfigError(f"design_degree must be >= 1, got {self.design_degree}")


def proposal_kernel(spec: ObjectiveSpec, degree: int = 3) -> np.ndarray:
    """L-ensemble kernel whose k-DPP proposes subsets for ``spec``.

    Kernel instances use their own matrix. Design instances use the
    polynomial kernel ``(1 + X X^T) ** degree`` (elementwise) on the
    candidate rows: X X^T alone has rank p, below any k > p.
    """
    if spec.flavor != DESIGN:
        return spec.matrix
    x = spec.matrix
    gram = x @ x.T
    return (1.0 + 0.5 * (gram + gram.T)) ** degree


def _worker_seeds(seed: int, workers: int):
    return np.random.SeedSequence(seed).spawn(workers)


def _split(total: int, parts: int) -> list[int]:
    base, extra = divmod(total, parts)
    return [base + (1 if w < extra else 0) for w in range(parts)]


def _run_stream(spec: ObjectiveSpec, eig: EigenDecomposition, k: int, count: int,
                seed_seq) -> tuple[np.ndarray, tuple[int, ...] | None, float]:
    """Draw ``count`` samples; return all values plus the stream's winner."""
    rng = np.random.default_rng(seed_seq)
    table = _prepare(eig, k)
    values = np.empty(count)
    best_value, best_subset = -math.inf, None
    done = 0
    while done < count:
        size = min(BATCH, count - done)
        subsets = _sample_batch(eig, table, k, size, rng)
        vals = log_objective_many(spec, subsets)
        values[done:done + size] = vals
        top = vals.max()
        if top >= best_value and top > -math.inf:
            for j in np.flatnonzero(vals == top):
                cand = tuple(int(x) for x in subsets[j])
                if top > best_value or best_subset is None or cand < best_subset:
                    best_value, best_subset = float(top), cand
        done += size
    return values, best_subset, best_value


def default_workers() -> int:
    env = os.environ.get("SUBDET_WORKERS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SUBDET_WORKERS must be an integer, got {env!r}") from None
    return os.cpu_count() or 1


def solve_dpp(spec: ObjectiveSpec, cfg: DPPConfig) -> SearchResult:
    """Best-of-M search: draw ``cfg.iterations`` k-DPP samples and keep the one
    with the largest log objective.

    The budget is split across ``cfg.workers`` independent RNG streams
    spawned from ``cfg.seed``; results are reproducible for a fixed
    (seed, workers) pair. Samples with an undefined objective still use up
    budget and are reported in ``result.skipped``.
    """
    k = spec.check_k(cfg.k)
    seed = cfg.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
    t0 = time.perf_counter()
    eig = eigendecompose(proposal_kernel(spec, cfg.design_degree))
    _prepare(eig, k)

    counts = _split(cfg.iterations, cfg.workers)
    seeds = _worker_seeds(seed, cfg.workers)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            futures = [pool.submit(_run_stream, spec, eig, k, c, s)
                       for c, s in zip(counts, seeds) if c > 0]
            parts = [f.result() for f in futures]
    else:
        parts = [_run_stream(spec, eig, k, counts[0], seeds[0])]

    values = np.concatenate([p[0] for p in parts])
    best_value, best_subset = -math.inf, None
    for _, subset, value in parts:
        if subset is None:
            continue
        if value > best_value or (value == best_value and subset < best_subset):
            best_value, best_subset = value, subset
    if best_subset is None:
        raise NumericalFailure("every sampled subset had an undefined objective")
    running = np.maximum.accumulate(values)
    trace = list(zip(range(1, len(values) + 1), running.tolist()))
    return SearchResult(best_subset, best_value, len(values), trace, seed=seed,
                        wall_time=time.perf_counter() - t0,
                        skipped=int(np.sum(values == -math.inf)))
