"""Genetic algorithm over fixed-cardinality subsets.

Each generation: tournament-selected parents are paired at random and
crossed over, a random fraction of the population is mutated, and the next
population is drawn from the augmented pool (elites first, the rest by
tournament without replacement).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .objective import ObjectiveSpec, log_objective_many
from .results import SearchResult


@dataclass(frozen=True)
class GAConfig:
    population_size: int = 100
    p_cross: float = 0.5
    p_mutprop: float = 0.2
    p_mut: float = 0.01
    elite_fraction: float = 0.1
    tournament_size: int = 4
    generations: int = 1000
    seed: int | None = None

    def __post_init__(self):
        if self.population_size < 1:
            raise ConfigError(f"population_size must be >= 1, got {self.population_size}")
        for name in ("p_cross", "p_mutprop", "p_mut", "elite_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ConfigError(f"{name} must lie in [0, 1], got {value}")
        if self.tournament_size < 2:
            raise ConfigError(f"tournament_size must be >= 2, got {self.tournament_size}")
        if self.generations < 1:
            raise ConfigError(f"generations must be >= 1, got {self.generations}")

    @property
    def n_elite(self) -> int:
        return min(self.population_size, max(1, round(self.elite_fraction * self.population_size)))


@dataclass(frozen=True)
class Individual:
    subset: tuple[int, ...]
    fitness: float = math.nan


def crossover_pair(a: Individual, b: Individual, k: int, rng) -> tuple[Individual, Individual]:
    """Keep the shared elements in both children and deal the symmetric
    difference at random, k - |a & b| elements to each child."""
    sa, sb = set(a.subset), set(b.subset)
    shared = sa & sb
    pool = np.array(sorted(sa ^ sb), dtype=np.intp)
    need = k - len(shared)
    pool = rng.permutation(pool)
    first = tuple(sorted(shared | {int(x) for x in pool[:need]}))
    second = tuple(sorted(shared | {int(x) for x in pool[need:]}))
    return Individual(first), Individual(second)


def mutate(ind: Individual, p_mut: float, rng, n: int) -> Individual:
    """Each member, independently with probability ``p_mut``, is swapped for a
    uniformly chosen non-member."""
    members = list(ind.subset)
    if len(members) >= n or p_mut <= 0.0:
        return ind
    hits = rng.random(len(members)) < p_mut
    if not hits.any():
        return ind
    inside = set(members)
    for pos in np.flatnonzero(hits):
        outside = [x for x in range(n) if x not in inside]
        new = outside[int(rng.integers(len(outside)))]
        inside.discard(members[pos])
        inside.add(new)
        members[pos] = new
    return Individual(tuple(sorted(members)))


def _tournament(fitness: np.ndarray, size: int, rng) -> int:
    entrants = rng.integers(len(fitness), size=size)
    return int(entrants[np.argmax(fitness[entrants])])


class _Evaluator:
    def __init__(self, spec: ObjectiveSpec):
        self.spec = spec
        self.cache: dict[tuple[int, ...], float] = {}
        self.evaluations = 0

    def __call__(self, subsets: list[tuple[int, ...]]) -> list[float]:
        fresh = sorted({s for s in subsets if s not in self.cache})
        if fresh:
            values = log_objective_many(self.spec, np.array(fresh, dtype=np.intp))
            self.cache.update(zip(fresh, values.tolist()))
            self.evaluations += len(fresh)
        return [self.cache[s] for s in subsets]


def _select(pool: list[Individual], cfg: GAConfig, rng) -> list[Individual]:
    """Elites enter directly; the rest win tournaments among those left."""
    fitness = np.array([ind.fitness for ind in pool])
    order = np.argsort(-fitness, kind="stable")
    chosen = list(order[:cfg.n_elite])
    left = [int(i) for i in order[cfg.n_elite:]]
    while len(chosen) < cfg.population_size and left:
        size = min(cfg.tournament_size, len(left))
        picks = rng.choice(len(left), size=size, replace=False)
        winner = max(picks, key=lambda j: (fitness[left[j]], -j))
        chosen.append(left.pop(int(winner)))
    return [pool[i] for i in chosen]


def solve_ga(spec: ObjectiveSpec, k: int, cfg: GAConfig) -> SearchResult:
    """Run ``cfg.generations`` generations and return the best subset ever seen.

    The trace holds the best-so-far fitness after each generation (0 is the
    initial population). Fully determined by ``cfg.seed``.
    """
    k = spec.check_k(k)
    n = spec.n
    seed = cfg.seed
    if seed is None:
        seed = int(np.random.SeedSequence().entropy % (2**63))
    rng = np.random.default_rng(seed)
    t0 = time.perf_counter()
    evaluate = _Evaluator(spec)

    start = [tuple(sorted(int(x) for x in rng.choice(n, size=k, replace=False)))
             for _ in range(cfg.population_size)]
    population = [Individual(s, f) for s, f in zip(start, evaluate(start))]

    best = max(population, key=lambda ind: (ind.fitness, _neg(ind.subset)))
    trace = [(0, best.fitness)]
    n_pairs = round(cfg.p_cross * cfg.population_size) // 2
    n_mut = round(cfg.p_mutprop * cfg.population_size)

    for gen in range(1, cfg.generations + 1):
        fitness = np.array([ind.fitness for ind in population])
        parents = [population[_tournament(fitness, cfg.tournament_size, rng)]
                   for _ in range(2 * n_pairs)]
        order = rng.permutation(len(parents))
        offspring: list[Individual] = []
        for j in range(n_pairs):
            a, b = parents[order[2 * j]], parents[order[2 * j + 1]]
            offspring.extend(crossover_pair(a, b, k, rng))
        if n_mut:
            for i in rng.choice(len(population), size=n_mut, replace=False):
                offspring.append(mutate(population[i], cfg.p_mut, rng, n))
        if offspring:
            values = evaluate([ind.subset for ind in offspring])
            offspring = [Individual(ind.subset, v) for ind, v in zip(offspring, values)]
            for ind in offspring:
                if ind.fitness > best.fitness or (
                    ind.fitness == best.fitness and ind.subset < best.subset
                ):
                    best = ind
        population = _select(population + offspring, cfg, rng)
        trace.append((gen, best.fitness))

    return SearchResult(best.subset, best.fitness, evaluate.evaluations, trace, seed=seed,
                        wall_time=time.perf_counter() - t0)


def _neg(subset: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(-x for x in subset)
