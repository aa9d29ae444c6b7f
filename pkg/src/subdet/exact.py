"""Exhaustive search over all k-subsets; the ground truth for small instances."""

from __future__ import annotations

import itertools
import math
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .errors import InstanceTooLargeError
from .objective import ObjectiveSpec, log_objective_many
from .results import SearchResult, tie_tol

DEFAULT_GUARD = 2_000_000
CHUNK = 16384


def _records(spec: ObjectiveSpec, k: int, firsts: range, offset: int):
    """Enumerate subsets whose smallest element lies in ``firsts``.

    Returns the strict running-maximum records ``(position, value, subset)``;
    any subset that can displace the incumbent under the sequential rule is
    one of them, so merging records reproduces a single-pass scan.
    """
    n = spec.n
    out = []
    best = -math.inf
    pos = offset
    for f in firsts:
        tails = itertools.combinations(range(f + 1, n), k - 1)
        while True:
            block = list(itertools.islice(tails, CHUNK))
            if not block:
                break
            combos = np.empty((len(block), k), dtype=np.intp)
            combos[:, 0] = f
            if k > 1:
                combos[:, 1:] = np.array(block, dtype=np.intp)
            values = log_objective_many(spec, combos)
            prev = np.maximum.accumulate(np.concatenate(([best], values)))[:-1]
            for i in np.flatnonzero(values > prev):
                out.append((pos + int(i) + 1, float(values[i]), tuple(int(x) for x in combos[i])))
            best = max(best, float(values.max()))
            pos += len(block)
    return out


def _split_firsts(n: int, k: int, workers: int):
    """Partition first elements into contiguous blocks of similar work."""
    counts = [math.comb(n - f - 1, k - 1) for f in range(n - k + 1)]
    total = sum(counts)
    blocks, start, acc, offset = [], 0, 0, 0
    target = total / workers
    for f, c in enumerate(counts):
        acc += c
        last = f == len(counts) - 1
        if last or acc >= target * (len(blocks) + 1):
            block_total = sum(counts[start:f + 1])
            blocks.append((range(start, f + 1), offset))
            offset += block_total
            start = f + 1
    return blocks


def solve_exact(spec: ObjectiveSpec, k: int, guard: int = DEFAULT_GUARD,
                workers: int = 1) -> SearchResult:
    """Maximize the log objective over all C(n, k) subsets.

    Ties (within a relative 1e-10) go to the lexicographically smallest
    subset. The answer does not depend on ``workers``.
    """
    k = spec.check_k(k)
    total = math.comb(spec.n, k)
    if total > guard:
        raise InstanceTooLargeError(
            f"exhaustive search needs C({spec.n},{k}) = {total} evaluations, guard is {guard}"
        )
    t0 = time.perf_counter()
    blocks = _split_firsts(spec.n, k, max(1, int(workers)))
    if workers > 1 and len(blocks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_records, itertools.repeat(spec), itertools.repeat(k),
                                  [b[0] for b in blocks], [b[1] for b in blocks]))
    else:
        parts = [_records(spec, k, firsts, off) for firsts, off in blocks]

    best_value, best_subset, trace = -math.inf, None, []
    for part in parts:
        for pos, value, subset in part:
            if best_subset is None or value > best_value + tie_tol(best_value):
                best_value, best_subset = value, subset
                trace.append((pos, value))
    if best_subset is None or best_value == -math.inf:
        # Every subset is degenerate; report the first one.
        best_subset = tuple(range(k))
        trace = [(1, best_value)]
    if trace[-1][0] != total:
        trace.append((total, best_value))
    return SearchResult(best_subset, best_value, total, trace,
                        wall_time=time.perf_counter() - t0)
