"""Benchmark instances: the banded synthetic kernel, full factorial candidate
sets, and sample covariances from observation tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDataError, ValidationError
from .linalg import symmetric_matrix

SPECIAL_BAND = 10
CODINGS = ("unit", "contrast")


@dataclass(frozen=True)
class SyntheticSpec:
    """Parameters of the structured n x n kernel.

    With ``m = n - k + 1`` (1-based): diagonal entries are ``d`` before
    position m and ``d + delta`` from m on. An off-diagonal entry (i, j) is
    governed by ``max(i, j)``: ``b`` when it equals m, ``c`` when it lies in
    m+1 .. m+9, and ``a`` otherwise.
    """

    n: int = 100
    k: int = 60
    a: float = 0.2
    b: float = 0.9
    c: float = 0.65
    d: float = 7.0
    delta: float = 1.0

    def __post_init__(self):
        if not self.n >= self.k >= SPECIAL_BAND:
            raise ValidationError(
                f"synthetic instance needs n >= k >= {SPECIAL_BAND}, got n={self.n}, k={self.k}"
            )
        if not self.d > 0:
            raise ValidationError(f"synthetic instance needs d > 0, got {self.d}")


def synthetic_entry(spec: SyntheticSpec, i: int, j: int) -> float:
    """Entry (i, j) of the synthetic kernel, 1-based, straight from the case table."""
    m = spec.n - spec.k + 1
    if i == j:
        return spec.d if i < m else spec.d + spec.delta
    row = i if i > j else j
    if row == m:
        return spec.b
    if m + 1 <= row <= m + SPECIAL_BAND - 1:
        return spec.c
    return spec.a


def synthetic_matrix(spec: SyntheticSpec) -> np.ndarray:
    n, m = spec.n, spec.n - spec.k + 1
    pos = np.arange(1, n + 1)
    governing = np.maximum.outer(pos, pos)
    out = np.full((n, n), float(spec.a))
    out[governing == m] = spec.b
    out[(governing > m) & (governing < m + SPECIAL_BAND)] = spec.c
    np.fill_diagonal(out, np.where(pos < m, spec.d, spec.d + spec.delta))
    return symmetric_matrix(out)


@dataclass(frozen=True)
class FactorialSpec:
    """Full factorial candidate set.

    ``coding='unit'`` spaces each factor's levels evenly on [-1, 1].
    ``coding='contrast'`` uses linear orthogonal-polynomial contrasts
    (..., -1, 0, 1, ... for odd level counts, ..., -3, -1, 1, 3, ... for even).
    """

    levels: tuple[int, ...] = (5, 2, 2)
    coding: str = "unit"
    intercept: bool = True

    def __post_init__(self):
        object.__setattr__(self, "levels", tuple(int(x) for x in self.levels))
        if not self.levels:
            raise ValidationError("factorial design needs at least one factor")
        if any(x < 2 for x in self.levels):
            raise ValidationError(f"every factor needs >= 2 levels, got {self.levels}")
        if self.coding not in CODINGS:
            raise ValidationError(f"coding must be one of {CODINGS}, got {self.coding!r}")


def factor_levels(count: int, coding: str = "unit") -> np.ndarray:
    if coding == "unit":
        return np.linspace(-1.0, 1.0, count)
    centered = np.arange(count) - (count - 1) / 2
    return centered if count % 2 else 2 * centered


def factorial_design(spec: FactorialSpec) -> np.ndarray:
    """One row per level combination, last factor varying fastest."""
    coded = [factor_levels(c, spec.coding) for c in spec.levels]
    rows = np.array(list(itertools.product(*coded)), dtype=float)
    if spec.intercept:
        rows = np.hstack([np.ones((rows.shape[0], 1)), rows])
    return rows


def covariance_from_observations(data) -> np.ndarray:
    """Unbiased sample covariance (divisor T - 1) of a T x n observation table."""
    data = np.asarray(data, dtype=float)
    if data.ndim != 2:
        raise ValidationError(f"observations must be a 2-D table, got shape {data.shape}")
    if data.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 observations, got {data.shape[0]}")
    if not np.all(np.isfinite(data)):
        raise ValidationError("observations contain missing or non-finite values")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (data.shape[0] - 1)
    return symmetric_matrix(0.5 * (cov + cov.T))


def parse_generator(text: str) -> tuple[str, dict[str, str]]:
    """Split ``name:key=value,key=value`` into the name and a dict.

    Bare comma-separated tokens extend the previous value, so
    ``factorial:levels=5,2,2`` yields ``{"levels": "5,2,2"}``. A lone
    positional argument (``covariance-from:obs.csv``) is stored under
    ``"path"``.
    """
    name, _, rest = text.partition(":")
    name = name.strip()
    params: dict[str, str] = {}
    last = None
    for token in filter(None, (t.strip() for t in rest.split(","))):
        if "=" in token:
            key, _, value = token.partition("=")
            last = key.strip()
            params[last] = value.strip()
        elif last is None:
            last = "path"
            params[last] = token
        else:
            params[last] += "," + token
    return name, params


def _number(params, key, default, kind=float):
    try:
        return kind(params.get(key, default))
    except ValueError:
        raise ValidationError(f"bad value for {key!r}: {params[key]!r}") from None


def synthetic_from_params(params: dict[str, str]) -> SyntheticSpec:
    unknown = set(params) - {"n", "k", "a", "b", "c", "d", "delta"}
    if unknown:
        raise ValidationError(f"unknown synthetic parameters: {sorted(unknown)}")
    base = SyntheticSpec()
    return SyntheticSpec(
        n=_number(params, "n", base.n, int),
        k=_number(params, "k", base.k, int),
        a=_number(params, "a", base.a),
        b=_number(params, "b", base.b),
        c=_number(params, "c", base.c),
        d=_number(params, "d", base.d),
        delta=_number(params, "delta", base.delta),
    )


def factorial_from_params(params: dict[str, str]) -> FactorialSpec:
    unknown = set(params) - {"levels", "coding", "intercept"}
    if unknown:
        raise ValidationError(f"unknown factorial parameters: {sorted(unknown)}")
    try:
        levels = tuple(int(x) for x in params.get("levels", "5,2,2").split(","))
    except ValueError:
        raise ValidationError(f"bad factor levels: {params['levels']!r}") from None
    intercept = params.get("intercept", "1").lower() not in ("0", "false", "no", "off")
    return FactorialSpec(levels, params.get("coding", "unit"), intercept)
