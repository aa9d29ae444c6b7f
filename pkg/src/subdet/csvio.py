"""CSV readers and writers for matrices, designs, observations and traces."""

from __future__ import annotations

import csv
import logging
import math
from typing import IO, Iterable, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import symmetric_matrix

log = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-9
MISSING = {"", "na", "nan", "null", "none", "?"}


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _read_rows(path) -> tuple[list[str] | None, list[list[str]]]:
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError(f"{path}: file is empty")
    header = None
    if not _is_number(rows[0][0].strip()):
        header, rows = [c.strip() for c in rows[0]], rows[1:]
    return header, rows


def _numeric_table(path, rows: list[list[str]]) -> np.ndarray:
    width = len(rows[0]) if rows else 0
    out = np.empty((len(rows), width))
    for i, row in enumerate(rows):
        if len(row) != width:
            raise ValidationError(f"{path}: row {i + 1} has {len(row)} fields, expected {width}")
        try:
            out[i] = [float(c) for c in row]
        except ValueError:
            raise ValidationError(f"{path}: non-numeric entry in row {i + 1}") from None
    return out


def read_matrix_csv(path) -> np.ndarray:
    """Square matrix, symmetrized after a 1e-9 symmetry check."""
    _, rows = _read_rows(path)
    a = _numeric_table(path, rows)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"{path}: expected a square matrix, got {a.shape}")
    return symmetric_matrix(a, tol=SYMMETRY_TOL)


def read_design_csv(path) -> np.ndarray:
    _, rows = _read_rows(path)
    x = _numeric_table(path, rows)
    if x.shape[0] == 0:
        raise ValidationError(f"{path}: design has no rows")
    return x


def read_observations_csv(path) -> tuple[list[str], np.ndarray]:
    """Header of variable names plus one row per time point.

    Rows with a missing entry are dropped (and logged).
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise ValidationError(f"{path}: file is empty")
    names, body = [c.strip() for c in rows[0]], rows[1:]
    kept, dropped = [], 0
    for i, row in enumerate(body):
        if len(row) != len(names):
            raise ValidationError(f"{path}: row {i + 2} has {len(row)} fields, expected {len(names)}")
        cells = [c.strip() for c in row]
        if any(c.lower() in MISSING for c in cells):
            dropped += 1
            continue
        try:
            values = [float(c) for c in cells]
        except ValueError:
            raise ValidationError(f"{path}: non-numeric entry in row {i + 2}") from None
        if not all(math.isfinite(v) for v in values):
            dropped += 1
            continue
        kept.append(values)
    if dropped:
        log.warning("%s: dropped %d row(s) with missing values", path, dropped)
    data = np.array(kept, dtype=float).reshape(len(kept), len(names))
    return names, data


def write_matrix_csv(fh: IO[str], a: np.ndarray, header: Sequence[str] | None = None):
    writer = csv.writer(fh, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    for row in np.atleast_2d(a):
        writer.writerow([repr(float(v)) for v in row])


def write_trace_csv(fh: IO[str], trace: Iterable[tuple[int, float]]):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["iteration", "best_log_objective"])
    for it, value in trace:
        writer.writerow([it, repr(float(value))])


def read_trace_csv(path) -> list[tuple[int, float]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        return [(int(r["iteration"]), float(r["best_log_objective"])) for r in reader]


def format_subset(subset: Iterable[int]) -> str:
    """Space-separated 1-based indices."""
    return " ".join(str(i + 1) for i in subset)


def write_pmf_csv(fh: IO[str], pmf: dict[tuple[int, ...], float]):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(["subset", "probability"])
    for subset, p in pmf.items():
        writer.writerow([format_subset(subset), repr(float(p))])


def read_pmf_csv(path) -> dict[tuple[int, ...], float]:
    """Inverse of write_pmf_csv; returns 0-based subsets."""
    with open(path, newline="") as fh:
        return {
            tuple(int(x) - 1 for x in r["subset"].split()): float(r["probability"])
            for r in csv.DictReader(fh)
        }
