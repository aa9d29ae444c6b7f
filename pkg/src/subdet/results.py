from __future__ import annotations

from dataclasses import dataclass, field


@dataclass
class SearchResult:
    """Best subset found by a solver plus its best-so-far trace.

    ``best_subset`` holds 0-based indices in increasing order. ``trace`` is a
    list of ``(evaluation_index, best_so_far)`` pairs, non-decreasing in the
    second component and ending at ``best_log_objective``.
    """

    best_subset: tuple[int, ...]
    best_log_objective: float
    evaluations: int
    trace: list[tuple[int, float]] = field(default_factory=list)
    seed: int | None = None
    wall_time: float = 0.0
    skipped: int = 0

    @property
    def k(self) -> int:
        return len(self.best_subset)


TIE_RTOL = 1e-10


def tie_tol(value: float) -> float:
    """Absolute tolerance under which two log-objective values count as tied."""
    if value != value or abs(value) == float("inf"):
        return 0.0
    return TIE_RTOL * max(1.0, abs(value))
