import collections
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import subdet.dpp as dpp
from subdet.dpp import DPPConfig, elementary_symmetric, sample_kdpp, solve_dpp
from subdet.errors import ConfigError, InvalidKernelError
from subdet.linalg import eigendecompose
from subdet.objective import ObjectiveSpec, kdpp_normalizer_check, kdpp_pmf, log_objective

from conftest import random_spd


def tv_distance(counts, pmf, total):
    return 0.5 * sum(abs(counts.get(s, 0) / total - p) for s, p in pmf.items())


def test_esp_examples():
    t = elementary_symmetric([1.0, 1.0, 1.0], 2)
    assert t.values[2, 3] == 3.0
    t = elementary_symmetric([2.0, 3.0], 2)
    assert t.values[1, 2] == 5.0 and t.values[2, 2] == 6.0


@settings(max_examples=30, deadline=None)
@given(lam=st.lists(st.floats(0, 10), min_size=1, max_size=12), data=st.data())
def test_esp_invariants(lam, data):
    k_max = data.draw(st.integers(0, len(lam)))
    e = elementary_symmetric(lam, k_max).values
    assert np.all(e[0] == 1.0)
    for j in range(1, k_max + 1):
        assert np.all(e[j, :j] == 0.0)
        for m in range(1, len(lam) + 1):
            assert e[j, m] == e[j, m - 1] + lam[m - 1] * e[j - 1, m - 1]


def test_esp_rejects_negative_and_clamps_roundoff():
    with pytest.raises(InvalidKernelError):
        elementary_symmetric([1.0, -0.1], 1)
    t = elementary_symmetric([1.0, -1e-14], 2)
    assert t.values[2, 2] == 0.0


def test_esp_matches_enumeration():
    l_mat = random_spd(6, 17)
    enum, esp = kdpp_normalizer_check(l_mat, 3)
    assert esp == pytest.approx(enum, rel=1e-8)


def test_full_cardinality_sample():
    eig = eigendecompose(np.diag([0.5, 2.0, 3.0, 7.0]))
    rng = np.random.default_rng(0)
    for _ in range(20):
        assert sample_kdpp(eig, 4, rng) == (0, 1, 2, 3)


def test_zero_eigenvalue_never_selected():
    eig = eigendecompose(np.diag([1.0, 0.0]))
    rng = np.random.default_rng(0)
    assert {sample_kdpp(eig, 1, rng) for _ in range(200)} == {(0,)}


def test_rank_guard():
    with pytest.raises(ConfigError):
        sample_kdpp(eigendecompose(np.diag([1.0, 0.0])), 2, np.random.default_rng(0))


def test_identity_phase_one_acceptance_is_k_over_n():
    n, k = 7, 3
    table = elementary_symmetric(np.ones(n), k)
    e = table.values
    assert e[k - 1, n - 1] / e[k, n] == pytest.approx(k / n)
    assert math.comb(n - 1, k - 1) / math.comb(n, k) == pytest.approx(k / n)


def test_identity_kernel_is_uniform():
    n, k, draws = 5, 2, 100_000
    eig = eigendecompose(np.eye(n))
    rng = np.random.default_rng(12)
    counts = collections.Counter(sample_kdpp(eig, k, rng) for _ in range(draws))
    assert tv_distance(counts, kdpp_pmf(np.eye(n), k), draws) < 0.01


def test_batched_sampler_distribution():
    l_mat = random_spd(6, 33)
    eig = eigendecompose(l_mat)
    rng = np.random.default_rng(4)
    for k in (1, 2, 3):
        table = dpp._prepare(eig, k)
        draws = np.concatenate([dpp._sample_batch(eig, table, k, 4096, rng) for _ in range(25)])
        counts = collections.Counter(map(tuple, draws.tolist()))
        assert tv_distance(counts, kdpp_pmf(l_mat, k), len(draws)) < 0.01


@settings(max_examples=20, deadline=None)
@given(n=st.integers(2, 30), seed=st.integers(0, 2**32 - 1), data=st.data())
def test_phase_two_normalization_and_cardinality(n, seed, data):
    k = data.draw(st.integers(1, n))
    eig = eigendecompose(random_spd(n, seed, jitter=0.5))
    table = dpp._prepare(eig, k)
    rng = np.random.default_rng(seed)
    with pytest.MonkeyPatch.context() as mp:
        mp.setattr(dpp, "PROB_SUM_TOL", 1e-10)
        for _ in range(5):
            cols = dpp._select_eigenvectors(table, k, rng)
            assert len(cols) == k
            out = dpp._project_sample(eig.eigenvectors[:, cols], rng)
            assert out is not None and len(set(out)) == k


def test_solve_dpp_diagonal():
    spec = ObjectiveSpec.kernel(np.diag([4.0, 3.0, 2.0, 1.0]))
    res = solve_dpp(spec, DPPConfig(k=2, iterations=1000, seed=0))
    assert res.best_subset == (0, 1)
    assert res.best_log_objective == pytest.approx(math.log(12))
    assert res.evaluations == 1000 and len(res.trace) == 1000


def test_single_iteration_equals_its_sample():
    spec = ObjectiveSpec.kernel(random_spd(9, 3))
    res = solve_dpp(spec, DPPConfig(k=4, iterations=1, seed=5))
    assert res.trace == [(1, res.best_log_objective)]
    assert res.best_log_objective == pytest.approx(log_objective(spec, res.best_subset))


def test_reproducible_per_seed_and_workers():
    spec = ObjectiveSpec.kernel(random_spd(15, 8))
    a = solve_dpp(spec, DPPConfig(k=5, iterations=700, seed=9))
    b = solve_dpp(spec, DPPConfig(k=5, iterations=700, seed=9))
    assert a.best_subset == b.best_subset and a.trace == b.trace
    c = solve_dpp(spec, DPPConfig(k=5, iterations=700, seed=9, workers=2))
    d = solve_dpp(spec, DPPConfig(k=5, iterations=700, seed=9, workers=2))
    assert c.best_subset == d.best_subset and c.trace == d.trace
    assert c.evaluations == 700


def test_trace_monotone_and_dominates_samples():
    spec = ObjectiveSpec.kernel(random_spd(10, 1))
    res = solve_dpp(spec, DPPConfig(k=4, iterations=300, seed=2))
    values = [v for _, v in res.trace]
    assert values == sorted(values)
    assert values[-1] == res.best_log_objective


def test_config_validation():
    with pytest.raises(ConfigError):
        DPPConfig(k=2, iterations=0)
    with pytest.raises(ConfigError):
        DPPConfig(k=0)
    with pytest.raises(ConfigError):
        DPPConfig(k=2, workers=0)


def test_design_proposal_kernel_has_enough_rank():
    from subdet.generators import FactorialSpec, factorial_design

    spec = ObjectiveSpec.design(factorial_design(FactorialSpec()))
    lam = eigendecompose(dpp.proposal_kernel(spec)).eigenvalues
    assert dpp.numerical_rank(lam) >= 8
