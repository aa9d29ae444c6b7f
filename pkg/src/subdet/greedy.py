"""Deterministic heuristics: forward greedy, backward greedy, exchange."""

from __future__ import annotations

import math
import time

import numpy as np

from .errors import HeuristicInapplicableError, ObjectiveUndefinedError
from .linalg import as_subset
from .objective import DESIGN, KERNEL, ObjectiveSpec, log_objective, log_objective_many
from .results import SearchResult, tie_tol

EXCHANGE_THRESHOLD = 1e-12


def _argmax_smallest(values: np.ndarray) -> int:
    """Index of the maximum; near-ties resolve to the first position."""
    best = 0
    for i in range(1, len(values)):
        if values[i] > values[best] + tie_tol(values[best]):
            best = i
    return best


def _outer_spec(spec: ObjectiveSpec) -> ObjectiveSpec:
    x = spec.matrix
    return ObjectiveSpec(KERNEL, x @ x.T)


def _grow_values(spec, outer, base, candidates):
    size = len(base) + 1
    subsets = np.empty((len(candidates), size), dtype=np.intp)
    subsets[:, :-1] = base
    subsets[:, -1] = candidates
    if spec.flavor == DESIGN and size <= spec.p:
        return log_objective_many(outer, subsets)
    return log_objective_many(spec, subsets)


def solve_greedy_forward(spec: ObjectiveSpec, k: int) -> SearchResult:
    """Build S one element at a time, each time adding the element that
    maximizes the objective of the enlarged set.

    For design instances the first p picks use det X[S] X[S]^T, since the
    p x p information matrix is singular until p rows are chosen.
    """
    k = spec.check_k(k)
    t0 = time.perf_counter()
    outer = _outer_spec(spec) if spec.flavor == DESIGN else None
    chosen: list[int] = []
    evaluations = 0
    trace: list[tuple[int, float]] = []
    value = -math.inf
    for step in range(k):
        taken = set(chosen)
        candidates = np.array([c for c in range(spec.n) if c not in taken], dtype=np.intp)
        values = _grow_values(spec, outer, chosen, candidates)
        if step == k - 1:
            running = np.maximum.accumulate(values)
            for i, v in enumerate(running):
                if not trace or v > trace[-1][1]:
                    trace.append((evaluations + i + 1, float(v)))
        evaluations += len(candidates)
        pick = _argmax_smallest(values)
        if values[pick] == -math.inf:
            raise ObjectiveUndefinedError(len(chosen))
        chosen.append(int(candidates[pick]))
        value = float(values[pick])
    subset = as_subset(chosen)
    value = log_objective(spec, subset)
    trace = [(e, min(v, value)) for e, v in trace]
    if trace[-1][1] != value:
        trace.append((evaluations, value))
    return SearchResult(subset, value, evaluations, trace, wall_time=time.perf_counter() - t0)


def solve_greedy_backward(spec: ObjectiveSpec, k: int) -> SearchResult:
    """Start from the full ground set and repeatedly drop the element whose
    removal leaves the largest objective. Ties drop the smallest index."""
    k = spec.check_k(k)
    t0 = time.perf_counter()
    current = list(range(spec.n))
    try:
        log_objective(spec, current)
    except ObjectiveUndefinedError:
        raise HeuristicInapplicableError(
            "backward greedy needs the objective to be defined on the full ground set"
        ) from None
    evaluations = 1
    trace: list[tuple[int, float]] = []
    value = log_objective(spec, current)
    while len(current) > k:
        m = len(current)
        arr = np.array(current, dtype=np.intp)
        keep = ~np.eye(m, dtype=bool)
        subsets = np.broadcast_to(arr, (m, m))[keep].reshape(m, m - 1)
        values = log_objective_many(spec, subsets)
        if m - 1 == k:
            running = np.maximum.accumulate(values)
            for i, v in enumerate(running):
                if not trace or v > trace[-1][1]:
                    trace.append((evaluations + i + 1, float(v)))
        evaluations += m
        drop = _argmax_smallest(values)
        if values[drop] == -math.inf:
            raise HeuristicInapplicableError(
                f"objective undefined on every subset of size {m - 1}"
            )
        del current[drop]
        value = float(values[drop])
    subset = as_subset(current)
    value = log_objective(spec, subset)
    trace = [(e, min(v, value)) for e, v in trace] or [(evaluations, value)]
    if trace[-1][1] != value:
        trace.append((evaluations, value))
    return SearchResult(subset, value, evaluations, trace, wall_time=time.perf_counter() - t0)


def refine_exchange(spec: ObjectiveSpec, start) -> SearchResult:
    """Single-swap local search from ``start``.

    Scans outside candidates in ascending order and, for each, the current
    members in ascending order; the first swap that raises the log objective
    by more than 1e-12 is applied and the scan restarts. Stops when a full
    scan finds no improving swap.
    """
    current = list(as_subset(start, spec.n))
    spec.check_k(len(current))
    t0 = time.perf_counter()
    value = log_objective(spec, current)
    evaluations = 1
    trace = [(evaluations, value)]
    improved = True
    while improved:
        improved = False
        members = np.array(current, dtype=np.intp)
        inside = set(current)
        for c in range(spec.n):
            if c in inside:
                continue
            swapped = np.broadcast_to(members, (len(members), len(members))).copy()
            np.fill_diagonal(swapped, c)
            values = log_objective_many(spec, swapped)
            hits = np.flatnonzero(values > value + EXCHANGE_THRESHOLD)
            if hits.size:
                j = int(hits[0])
                evaluations += j + 1
                candidate = as_subset(swapped[j])
                new_value = log_objective(spec, candidate)
                if new_value > value + EXCHANGE_THRESHOLD:
                    current, value = list(candidate), new_value
                    trace.append((evaluations, value))
                    improved = True
                    break
            else:
                evaluations += len(members)
    return SearchResult(as_subset(current), value, evaluations, trace,
                        wall_time=time.perf_counter() - t0)
