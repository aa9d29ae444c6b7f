import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from subdet.errors import ConfigError
from subdet.ga import GAConfig, Individual, _select, crossover_pair, mutate, solve_ga
from subdet.objective import ObjectiveSpec, log_objective

from conftest import random_spd


def test_crossover_identical_parents():
    rng = np.random.default_rng(0)
    a = Individual((1, 4, 6))
    c1, c2 = crossover_pair(a, a, 3, rng)
    assert c1.subset == c2.subset == a.subset


def test_crossover_disjoint_singletons():
    rng = np.random.default_rng(1)
    seen = set()
    for _ in range(50):
        c1, c2 = crossover_pair(Individual((2,)), Individual((5,)), 1, rng)
        assert {c1.subset, c2.subset} == {(2,), (5,)}
        seen.add(c1.subset)
    assert seen == {(2,), (5,)}


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 15), data=st.data())
def test_crossover_properties(seed, n, data):
    k = data.draw(st.integers(1, n))
    a = tuple(sorted(data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))))
    b = tuple(sorted(data.draw(st.lists(st.integers(0, n - 1), min_size=k, max_size=k, unique=True))))
    c1, c2 = crossover_pair(Individual(a), Individual(b), k, np.random.default_rng(seed))
    for child in (c1, c2):
        assert len(child.subset) == k
        assert set(child.subset) <= set(a) | set(b)
        assert set(a) & set(b) <= set(child.subset)


def test_crossover_example_overlapping():
    rng = np.random.default_rng(5)
    for _ in range(20):
        for child in crossover_pair(Individual((0, 1, 2)), Individual((1, 2, 3)), 3, rng):
            assert len(child.subset) == 3 and set(child.subset) <= {0, 1, 2, 3}


def test_mutation_examples():
    rng = np.random.default_rng(0)
    ind = Individual((0, 3, 5))
    assert mutate(ind, 0.0, rng, 8) is ind
    full = Individual((0, 1, 2))
    assert mutate(full, 1.0, rng, 3).subset == (0, 1, 2)
    assert mutate(Individual((0,)), 1.0, rng, 2).subset == (1,)


@settings(max_examples=50, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), p=st.floats(0, 1))
def test_mutation_preserves_cardinality(seed, p):
    rng = np.random.default_rng(seed)
    out = mutate(Individual((1, 2, 7, 9)), p, rng, 12)
    assert len(out.subset) == 4 and len(set(out.subset)) == 4
    assert all(0 <= x < 12 for x in out.subset)


def test_config_validation():
    with pytest.raises(ConfigError):
        GAConfig(p_cross=1.5)
    with pytest.raises(ConfigError):
        GAConfig(tournament_size=1)
    assert GAConfig(population_size=5, elite_fraction=0.0).n_elite == 1


def test_no_variation_keeps_population():
    spec = ObjectiveSpec.kernel(random_spd(10, 2))
    cfg = GAConfig(population_size=12, p_cross=0.0, p_mutprop=0.0, generations=1, seed=3)
    rng = np.random.default_rng(0)
    pop = [Individual(tuple(sorted(rng.choice(10, 4, replace=False))), float(i)) for i in range(12)]
    kept = _select(pop, cfg, np.random.default_rng(1))
    assert sorted(ind.subset for ind in kept) == sorted(ind.subset for ind in pop)
    res = solve_ga(spec, 4, GAConfig(population_size=12, p_cross=0.0, p_mutprop=0.0,
                                     generations=30, seed=3))
    assert len({v for _, v in res.trace}) == 1


def test_full_cardinality():
    k_mat = random_spd(6, 8)
    spec = ObjectiveSpec.kernel(k_mat)
    res = solve_ga(spec, 6, GAConfig(population_size=10, generations=5, seed=0))
    assert res.best_subset == tuple(range(6))
    assert res.best_log_objective == pytest.approx(np.linalg.slogdet(k_mat)[1])


def test_reproducible_and_monotone():
    spec = ObjectiveSpec.kernel(random_spd(14, 6))
    cfg = GAConfig(population_size=30, p_cross=0.75, p_mut=0.05, generations=60, seed=42)
    a, b = solve_ga(spec, 5, cfg), solve_ga(spec, 5, cfg)
    assert a.best_subset == b.best_subset and a.trace == b.trace
    values = [v for _, v in a.trace]
    assert values == sorted(values)
    assert a.best_log_objective == pytest.approx(log_objective(spec, a.best_subset))


def test_population_cardinality_and_elitism(monkeypatch):
    import subdet.ga as ga

    spec = ObjectiveSpec.kernel(random_spd(12, 7))
    seen = []
    original = ga._select

    def spy(pool, cfg, rng):
        out = original(pool, cfg, rng)
        seen.append((max(i.fitness for i in pool), max(i.fitness for i in out),
                     [len(i.subset) for i in out]))
        return out

    monkeypatch.setattr(ga, "_select", spy)
    solve_ga(spec, 4, GAConfig(population_size=20, p_cross=0.5, generations=40, seed=1))
    bests = [kept for _, kept, _ in seen]
    assert all(pool == kept for pool, kept, _ in seen)
    assert bests == sorted(bests)
    assert all(all(x == 4 for x in sizes) for _, _, sizes in seen)
