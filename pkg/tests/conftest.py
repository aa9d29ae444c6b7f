import itertools
import math

import numpy as np
import pytest

from subdet.generators import SyntheticSpec, synthetic_matrix
from subdet.objective import ObjectiveSpec


def random_spd(n, seed, jitter=0.1):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(n, n))
    m = a @ a.T + jitter * np.eye(n)
    return 0.5 * (m + m.T)


def cofactor_det(m):
    """Laplace expansion along the first row; exponential, for tiny matrices."""
    m = [list(map(float, row)) for row in m]
    n = len(m)
    if n == 1:
        return m[0][0]
    total = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in m[1:]]
        total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def brute_force_best(spec, k):
    """Independent enumeration oracle using slogdet instead of Cholesky."""
    best, arg = -math.inf, None
    for s in itertools.combinations(range(spec.n), k):
        sign, val = np.linalg.slogdet(spec.objective_matrix(s))
        if sign > 0 and (arg is None or val > best + 1e-10 * max(1, abs(best))):
            best, arg = val, s
    return arg, best


@pytest.fixture(scope="session")
def synthetic_spec():
    return ObjectiveSpec.kernel(synthetic_matrix(SyntheticSpec()))


def one_based(*ranges):
    out = []
    for lo, hi in ranges:
        out.extend(range(lo - 1, hi))
    return tuple(out)
