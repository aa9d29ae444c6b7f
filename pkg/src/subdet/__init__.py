"""Cardinality-constrained subdeterminant maximization.

Exhaustive search, greedy and exchange heuristics, a genetic algorithm and
a k-DPP best-of-M sampler, all over the same objective: log det K[S] for a
kernel K, or log det X[S]^T X[S] for a design matrix X.
"""

from .dpp import DPPConfig, elementary_symmetric, sample_kdpp, solve_dpp
from .errors import (
    InstanceTooLargeError,
    InvalidSubsetError,
    NotPositiveDefiniteError,
    NumericalError,
    ObjectiveUndefinedError,
    SubdetError,
    ValidationError,
)
from .exact import solve_exact
from .ga import GAConfig, solve_ga
from .generators import (
    FactorialSpec,
    SyntheticSpec,
    covariance_from_observations,
    factorial_design,
    synthetic_matrix,
)
from .greedy import refine_exchange, solve_greedy_backward, solve_greedy_forward
from .linalg import eigendecompose, log_det_spd, principal_submatrix
from .objective import ObjectiveSpec, kdpp_pmf, log_objective, marginal_kernel
from .results import SearchResult

__version__ = "0.1.0"
