"""Command-line front end.

``adasamp run`` executes one experiment cell (problem x acquisition x
discretizer, all replications), saves raw records and writes the report CSVs;
``adasamp report`` regenerates the CSVs from previously saved records.  Every
flag can also be given in a flat ``key = value`` config file; explicit flags
override the file.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

from . import problems
from .discretize import DiscretizerConfig, DiscretizerKind
from .harness import (
    ConfigError,
    ExperimentConfig,
    default_discretizer,
    load_records,
    run_grid,
    save_records,
    write_reports,
)

DISC_KINDS = {
    "uniform": DiscretizerKind.UNIFORM,
    "sobol": DiscretizerKind.SOBOL,
    "dynamic": DiscretizerKind.DYNAMIC_COORDINATE,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="adasamp", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one experiment cell and write reports")
    run.add_argument("--config", help="flat key = value file mirroring the flags")
    run.add_argument("--problem", choices=["rastrigin", "rosenbrock", "levy", "external"])
    run.add_argument("--dim", type=int, help="problem dimension (default 6)")
    run.add_argument("--acq", help="acquisition strategy, e.g. sEI, qEI, DYCORS, EEPA+")
    run.add_argument("--disc", choices=sorted(DISC_KINDS), help="candidate generation scheme")
    run.add_argument("--budget", type=int, help="total evaluation budget (default 400)")
    run.add_argument("--batch", type=int, help="batch size q (default 4)")
    run.add_argument("--init", type=int, help="initial design size (default 2(d+1), d+1 external)")
    run.add_argument("--reps", type=int, help="number of replications (default 1)")
    run.add_argument("--seed", type=int, help="base seed (default 0)")
    run.add_argument("--out", help="output directory (default ./adasamp-out)")
    run.add_argument("--parallel", type=int, help="worker processes (default 1)")
    run.add_argument("--n-candidates", type=int, help="candidate set size per iteration")
    run.add_argument("--external-cmd", help="objective executable for --problem external")
    run.add_argument("--timeout", type=float, help="external objective timeout seconds")

    report = sub.add_parser("report", help="regenerate CSV reports from stored records")
    report.add_argument("--out", required=True, help="directory holding records.jsonl")
    return parser


def read_config_file(path: str) -> dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment line."""
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"malformed config line (expected key = value): {raw!r}")
        key, _, value = line.partition("=")
        values[key.strip()] = value.strip()
    return values


_FILE_KEYS = {
    "problem": str, "dim": int, "acq": str, "disc": str, "budget": int,
    "batch": int, "init": int, "reps": int, "seed": int, "out": str,
    "parallel": int, "n-candidates": int, "external-cmd": str, "timeout": float,
}


def _merge_config(args: argparse.Namespace) -> argparse.Namespace:
    """Fill unset flags from the config file, then apply hard defaults."""
    if getattr(args, "config", None):
        file_values = read_config_file(args.config)
        unknown = set(file_values) - set(_FILE_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key, cast in _FILE_KEYS.items():
            attr = key.replace("-", "_")
            if getattr(args, attr, None) is None and key in file_values:
                setattr(args, attr, cast(file_values[key]))
    defaults = dict(problem="rastrigin", dim=6, acq="EEPA+", budget=400, batch=4,
                    reps=1, seed=0, out="adasamp-out", parallel=1, timeout=problems.DEFAULT_TIMEOUT)
    for key, value in defaults.items():
        if getattr(args, key, None) is None:
            setattr(args, key, value)
    return args


def _build_experiment(args: argparse.Namespace) -> ExperimentConfig:
    if args.problem == "external":
        if not args.external_cmd:
            raise ConfigError("--problem external requires --external-cmd")
        problem = problems.external_problem(
            shlex.split(args.external_cmd), dim=args.dim, timeout=args.timeout
        )
    else:
        problem = problems.synthetic_problem(args.problem, args.dim)
    disc = default_discretizer(args.acq, args.dim)
    if args.disc is not None:
        disc = DiscretizerConfig(kind=DISC_KINDS[args.disc], n_candidates=disc.n_candidates)
    if args.n_candidates is not None:
        disc = disc.with_candidates(args.n_candidates)
    return ExperimentConfig(
        problem=problem,
        acquisition=args.acq,
        budget=args.budget,
        batch_q=args.batch,
        discretizer=disc,
        n_init=args.init,
        replications=args.reps,
        base_seed=args.seed,
    )


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "report":
        records = load_records(args.out)
        write_reports(records, args.out)
        print(f"reports written to {args.out}")
        return 0

    try:
        args = _merge_config(args)
        config = _build_experiment(args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    def progress(record):
        status = "FAILED: " + record.error if record.failed else f"best={record.final_value:.6g}"
        print(
            f"[{record.acquisition}/{record.discretizer}] replication {record.replication_id}: {status}",
            file=sys.stderr,
        )

    records = run_grid([config], parallelism=args.parallel, progress=progress)
    save_records(records, args.out)
    n_ok = sum(not r.failed for r in records)
    if n_ok:
        write_reports(records, args.out)
        print(f"{n_ok}/{len(records)} replications ok; reports written to {args.out}")
    else:
        print(f"all {len(records)} replications failed; raw records saved to {args.out}",
              file=sys.stderr)
    return 1 if any(r.failed for r in records) else 0


if __name__ == "__main__":
    sys.exit(main())
