"""Command-line interface: ``subdet solve | generate | pmf``.

Indices in all output are 1-based. Exit status is 0 on success, 2 on a
validation error and 3 on a numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from . import csvio
from .dpp import DPPConfig, default_workers, solve_dpp
from .errors import NumericalError, ObjectiveUndefinedError, SubdetError, ValidationError
from .exact import DEFAULT_GUARD, solve_exact
from .ga import GAConfig, solve_ga
from .generators import (
    covariance_from_observations,
    factorial_design,
    factorial_from_params,
    parse_generator,
    synthetic_from_params,
    synthetic_matrix,
)
from .greedy import refine_exchange, solve_greedy_backward, solve_greedy_forward
from .objective import ObjectiveSpec, kdpp_pmf

log = logging.getLogger("subdet")

METHODS = ("exact", "greedy", "backward", "exchange", "ga", "dpp")
GA_KEYS = {f.name for f in fields(GAConfig)}


@dataclass
class RunRecord:
    method: str
    instance: str
    k: int
    seed: int | None
    config: dict = field(default_factory=dict)
    best_subset: list[int] = field(default_factory=list)
    best_log_objective: float = float("nan")
    evaluations: int = 0
    wall_time_ms: float = 0.0
    trace_path: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self))

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls(**json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        row = asdict(self)
        row["config"] = json.dumps(row["config"])
        row["best_subset"] = " ".join(str(i) for i in row["best_subset"])
        row["best_log_objective"] = repr(row["best_log_objective"])
        writer = csv.DictWriter(buf, fieldnames=list(row), lineterminator="\n")
        writer.writeheader()
        writer.writerow({k: "" if v is None else v for k, v in row.items()})
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "RunRecord":
        row = next(csv.DictReader(io.StringIO(text)))
        return cls(
            method=row["method"],
            instance=row["instance"],
            k=int(row["k"]),
            seed=int(row["seed"]) if row["seed"] else None,
            config=json.loads(row["config"]),
            best_subset=[int(x) for x in row["best_subset"].split()],
            best_log_objective=float(row["best_log_objective"]),
            evaluations=int(row["evaluations"]),
            wall_time_ms=float(row["wall_time_ms"]),
            trace_path=row["trace_path"] or None,
        )


def build_instance(generator: str) -> tuple[str, object]:
    """Materialize a generator spec; returns (kind, array) with kind in
    {"kernel", "design"}."""
    name, params = parse_generator(generator)
    if name == "synthetic":
        return "kernel", synthetic_matrix(synthetic_from_params(params))
    if name == "factorial":
        return "design", factorial_design(factorial_from_params(params))
    if name in ("covariance", "covariance-from"):
        if "path" not in params:
            raise ValidationError("covariance generator needs a path, e.g. covariance-from:obs.csv")
        _, data = csvio.read_observations_csv(params["path"])
        return "kernel", covariance_from_observations(data)
    raise ValidationError(f"unknown generator {name!r} (synthetic, factorial, covariance-from)")


def load_instance(args) -> tuple[ObjectiveSpec, str]:
    if args.matrix:
        return ObjectiveSpec.kernel(csvio.read_matrix_csv(args.matrix)), args.matrix
    if args.design:
        return ObjectiveSpec.design(csvio.read_design_csv(args.design)), args.design
    kind, array = build_instance(args.generate)
    spec = ObjectiveSpec.kernel(array) if kind == "kernel" else ObjectiveSpec.design(array)
    return spec, args.generate


def read_config_file(path) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{path}:{lineno}: expected key = value")
        out[key.strip().replace("-", "_")] = value.strip()
    return out


def _ga_config(args) -> GAConfig:
    values: dict = {}
    if args.config:
        for key, raw in read_config_file(args.config).items():
            if key not in GA_KEYS:
                raise ValidationError(f"{args.config}: unknown GA setting {key!r}")
            values[key] = raw
    for key in GA_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    types = {"population_size": int, "tournament_size": int, "generations": int, "seed": int}
    try:
        typed = {k: types.get(k, float)(v) for k, v in values.items()}
    except ValueError as exc:
        raise ValidationError(f"bad GA setting: {exc}") from None
    return GAConfig(**typed)


def _parse_start(text: str) -> list[int]:
    try:
        return [int(x) - 1 for x in text.replace(",", " ").split()]
    except ValueError:
        raise ValidationError(f"bad --start subset {text!r}") from None


def cmd_solve(args) -> RunRecord:
    spec, instance = load_instance(args)
    k = spec.check_k(args.k)
    seed = args.seed
    config: dict = {}
    method = args.method
    if method == "exact":
        workers = args.workers or 1
        config = {"guard": args.guard, "workers": workers}
        result = solve_exact(spec, k, guard=args.guard, workers=workers)
    elif method == "greedy":
        result = solve_greedy_forward(spec, k)
    elif method == "backward":
        result = solve_greedy_backward(spec, k)
    elif method == "exchange":
        if args.start:
            start = _parse_start(args.start)
            config = {"start": args.start}
        else:
            start = solve_greedy_forward(spec, k).best_subset
            config = {"start": "greedy"}
        result = refine_exchange(spec, start)
    elif method == "ga":
        cfg = _ga_config(args)
        result = solve_ga(spec, k, cfg)
        seed = result.seed
        config = {key: getattr(cfg, key) for key in sorted(GA_KEYS) if key != "seed"}
    else:
        workers = args.workers or default_workers()
        cfg = DPPConfig(k=k, iterations=args.iterations, seed=seed, workers=workers,
                        design_degree=args.design_degree)
        result = solve_dpp(spec, cfg)
        seed = result.seed
        config = {"iterations": cfg.iterations, "workers": workers,
                  "design_degree": cfg.design_degree}
    if len(result.best_subset) != k:
        raise NumericalError(f"solver returned {len(result.best_subset)} indices, expected {k}")
    if not math.isfinite(result.best_log_objective):
        raise ObjectiveUndefinedError(f"objective undefined for every {k}-subset the solver visited")

    trace_path = None
    if args.trace_out:
        with open(args.trace_out, "w", newline="") as fh:
            csvio.write_trace_csv(fh, result.trace)
        trace_path = str(args.trace_out)
    return RunRecord(
        method=method,
        instance=instance,
        k=k,
        seed=seed,
        config=config,
        best_subset=[i + 1 for i in result.best_subset],
        best_log_objective=result.best_log_objective,
        evaluations=result.evaluations,
        wall_time_ms=round(result.wall_time * 1000.0, 3),
        trace_path=trace_path,
    )


def cmd_generate(args):
    kind, array = build_instance(args.spec)
    header = [f"x{j + 1}" for j in range(array.shape[1])] if kind == "design" else None
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csvio.write_matrix_csv(fh, array, header)
    else:
        csvio.write_matrix_csv(sys.stdout, array, header)


def cmd_pmf(args):
    if args.matrix:
        matrix = csvio.read_matrix_csv(args.matrix)
    else:
        kind, matrix = build_instance(args.generate)
        if kind != "kernel":
            raise ValidationError("pmf needs a kernel instance, not a design")
    pmf = kdpp_pmf(matrix, args.k)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            csvio.write_pmf_csv(fh, pmf)
    else:
        csvio.write_pmf_csv(sys.stdout, pmf)


def _add_source(p, design: bool = True):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--matrix", help="kernel matrix CSV")
    if design:
        src.add_argument("--design", help="design matrix CSV (rows = candidate points)")
    src.add_argument("--generate", metavar="SPEC",
                     help="inline generator, e.g. synthetic:n=100,k=60 or factorial:levels=5,2,2")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="subdet", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="run a solver on an instance")
    solve.add_argument("--method", required=True, choices=METHODS)
    _add_source(solve)
    solve.add_argument("--k", type=int, required=True)
    solve.add_argument("--seed", type=int)
    solve.add_argument("--workers", type=int,
                       help="worker processes for exact/dpp (default: $SUBDET_WORKERS or CPU count)")
    solve.add_argument("--iterations", type=int, default=10_000, help="DPP sample budget")
    solve.add_argument("--design-degree", type=int, default=3,
                       help="degree of the DPP proposal kernel for design instances")
    solve.add_argument("--guard", type=int, default=DEFAULT_GUARD,
                       help="maximum C(n,k) for exhaustive search")
    solve.add_argument("--start", help="exchange start subset, 1-based (default: greedy output)")
    solve.add_argument("--config", help="GA key = value settings file")
    ga = solve.add_argument_group("genetic algorithm")
    ga.add_argument("--population-size", dest="population_size", type=int)
    ga.add_argument("--p-cross", dest="p_cross", type=float)
    ga.add_argument("--p-mutprop", dest="p_mutprop", type=float)
    ga.add_argument("--p-mut", dest="p_mut", type=float)
    ga.add_argument("--elite-fraction", dest="elite_fraction", type=float)
    ga.add_argument("--tournament-size", dest="tournament_size", type=int)
    ga.add_argument("--generations", type=int)
    solve.add_argument("--format", choices=("json", "csv"), default="json")
    solve.add_argument("--trace-out", help="write the best-so-far trace as CSV")

    gen = sub.add_parser("generate", help="write a generated instance as CSV")
    gen.add_argument("spec", help="synthetic:..., factorial:levels=..., covariance-from:FILE")
    gen.add_argument("--out")

    pmf = sub.add_parser("pmf", help="exact k-DPP probability table (n <= 20)")
    _add_source(pmf, design=False)
    pmf.add_argument("--k", type=int, required=True)
    pmf.add_argument("--out")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command == "solve":
            record = cmd_solve(args)
            sys.stdout.write(record.to_json() + "\n" if args.format == "json" else record.to_csv())
        elif args.command == "generate":
            cmd_generate(args)
        else:
            cmd_pmf(args)
    except (ValidationError, OSError) as exc:
        print(f"subdet: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"subdet: numerical failure: {exc}", file=sys.stderr)
        return 3
    except SubdetError as exc:
        print(f"subdet: error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
