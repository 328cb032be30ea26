"""Experiment driver: the adaptive sampling loop, replication grids and
report writing.

One *run* evaluates a Latin-hypercube initial design, then loops fit-model /
discretize / select / evaluate until the budget is spent, recording the
best-so-far trace.  A *grid* executes many (config x replication) cells,
isolating failures per cell, and the report writer turns the collected
records into plot-ready CSV files plus a rank summary across strategies.

Everything is deterministic given ``(config, base_seed)``: replications use
independent RNG streams keyed by their replication id, and each iteration
derives child streams, so reruns and parallel schedules produce identical
records (wall-clock aside).
"""

from __future__ import annotations

import csv
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Iterable

import numpy as np
from scipy.spatial.distance import cdist
from threadpoolctl import threadpool_limits

from . import discretize, problems, surrogate
from .acquisition import analytic, geometric, monte_carlo
from .core import (
    BudgetState,
    Dataset,
    EvaluationError,
    ObjectiveSense,
    RngStream,
    append_evaluations,
    canonicalize,
    decanonicalize,
    incumbent,
)
from .discretize import CoordinateSchedule, DiscretizerConfig, DiscretizerKind
from .surrogate import GpFitError, GpModel, KernelConfig

SEQUENTIAL_STRATEGIES = ("sEI", "sPI", "sUCB", "sMES")
MC_BATCH_STRATEGIES = ("qEI", "qPI", "qUCB")
ALL_STRATEGIES = SEQUENTIAL_STRATEGIES + MC_BATCH_STRATEGIES + (
    "qKG",
    "Wscore",
    "DYCORS",
    "EEPA+",
    "random",
    "SOP",
)

# Trust-region style shrink of the dynamic perturbation radius.
SIGMA_SHRINK_AFTER = 3
SIGMA_MIN_FACTOR = 2.0**-6


class ConfigError(ValueError):
    """The experiment configuration cannot be run as given."""


@dataclass(frozen=True)
class ExperimentConfig:
    """One grid cell: problem, strategy, discretizer, budgets and seeds."""

    problem: problems.ProblemSpec
    acquisition: str
    budget: int
    batch_q: int = 4
    discretizer: DiscretizerConfig | None = None
    n_init: int | None = None
    replications: int = 1
    base_seed: int = 0
    mc: monte_carlo.McConfig = field(default_factory=monte_carlo.McConfig)
    ucb_delta: float = 0.1
    mes_samples: int = 10
    lhd_restarts: int = 50

    def __post_init__(self):
        if self.acquisition not in ALL_STRATEGIES:
            raise ConfigError(
                f"unknown acquisition {self.acquisition!r}; choose from {ALL_STRATEGIES}"
            )
        if self.acquisition == "SOP":
            raise ConfigError(
                "SOP is recognized but not implemented: its multi-layer center "
                "selection (Tabu list, perturbation-radius admission, hypervolume "
                "tracking) is specified only in the original SOP publication. "
                "Use EEPA+ or DYCORS for a distance-based batch sampler."
            )
        if self.discretizer is None:
            object.__setattr__(self, "discretizer", default_discretizer(self.acquisition, self.problem.dim))
        if self.acquisition == "DYCORS" and self.discretizer.kind is not DiscretizerKind.DYNAMIC_COORDINATE:
            raise ConfigError("DYCORS is the weighted score over dynamic coordinate candidates")
        if self.acquisition == "EEPA+" and self.discretizer.kind is not DiscretizerKind.DYNAMIC_COORDINATE:
            raise ConfigError("EEPA+ perturbs the incumbent; it requires the dynamic discretizer")
        if self.n_init is None:
            object.__setattr__(self, "n_init", default_n_init(self.problem))
        if self.n_init < 2:
            raise ConfigError("n_init must be >= 2 (GP fit precondition)")
        if self.budget < self.n_init:
            raise ConfigError("budget must cover the initial design")
        if self.batch_q < 1:
            raise ConfigError("batch size must be >= 1")
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")

    @property
    def effective_q(self) -> int:
        return 1 if self.acquisition in SEQUENTIAL_STRATEGIES else self.batch_q

    def cell_key(self) -> tuple[str, int, str, str]:
        return (self.problem.name, self.problem.dim, self.acquisition, self.discretizer.kind.value)


def default_discretizer(acquisition: str, dim: int) -> DiscretizerConfig:
    """Dynamic candidates for distance-based strategies, uniform otherwise."""
    kind = (
        DiscretizerKind.DYNAMIC_COORDINATE
        if acquisition in ("EEPA+", "Wscore", "DYCORS")
        else DiscretizerKind.UNIFORM
    )
    return DiscretizerConfig(kind=kind, n_candidates=1000 if dim <= 10 else 5000)


def default_n_init(problem: problems.ProblemSpec) -> int:
    if isinstance(problem.evaluate, problems.ExternalCommand):
        return problem.dim + 1
    return 2 * (problem.dim + 1)


@dataclass
class RunRecord:
    """Best-so-far trace of one replication (native objective sense)."""

    problem: str
    dim: int
    acquisition: str
    discretizer: str
    replication_id: int
    sense: str = ObjectiveSense.MINIMIZE.value
    rows: list[tuple[int, float, float]] = field(default_factory=list)  # (evals, best, wall s)
    final_point: list[float] | None = None
    final_value: float | None = None
    failed: bool = False
    error: str = ""

    def to_json(self) -> str:
        return json.dumps(self.__dict__, sort_keys=True)

    @classmethod
    def from_json(cls, line: str) -> "RunRecord":
        data = json.loads(line)
        data["rows"] = [tuple(row) for row in data["rows"]]
        return cls(**data)


@dataclass(frozen=True)
class RankSummary:
    problem: str
    dim: int
    acquisition: str
    discretizer: str
    rank: int
    mean_final: float
    var_final: float


def _evaluate(problem: problems.ProblemSpec, unit_point: np.ndarray) -> float:
    """Map a unit-space point to the problem box and evaluate (native sense)."""
    x = problem.bounds.from_unit(np.clip(unit_point, 0.0, 1.0))
    value = problem.evaluate(x)
    if not np.isfinite(value):
        raise EvaluationError(f"objective returned non-finite value {value!r}")
    return float(value)


class _Strategy:
    """One proposal step; subclasses may keep per-run state (weight cycles)."""

    def __init__(self, config: ExperimentConfig):
        self.config = config

    def propose(
        self,
        model: GpModel,
        dataset: Dataset,
        disc: DiscretizerConfig,
        schedule: CoordinateSchedule,
        k: int,
        evals_so_far: int,
        rng: RngStream,
    ) -> np.ndarray:
        raise NotImplementedError

    def _candidates(self, dataset, disc, schedule, rng) -> np.ndarray:
        dim = self.config.problem.dim
        if disc.kind is DiscretizerKind.UNIFORM:
            return discretize.uniform_candidates(disc, dim, rng)
        if disc.kind is DiscretizerKind.SOBOL:
            return discretize.sobol_candidates(disc, dim, rng)
        best_point, _ = incumbent(dataset)
        return discretize.dynamic_candidates(disc, schedule, best_point, rng)


class _AnalyticSequential(_Strategy):
    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        cand = self._candidates(dataset, disc, schedule, rng.child(0))
        post = surrogate.predict(model, cand)
        name = self.config.acquisition
        if name == "sEI":
            scores = analytic.ei_score(post.mean, post.std, model.incumbent_value)
        elif name == "sPI":
            scores = analytic.pi_score(post.mean, post.std, model.incumbent_value)
        elif name == "sUCB":
            ucb = analytic.UcbSchedule(delta=self.config.ucb_delta, cardinality=len(cand))
            scores = analytic.ucb_score(post.mean, post.std, ucb, t=evals_so_far)
        else:  # sMES
            samples = analytic.sample_max_values(model, cand, self.config.mes_samples, rng.child(1))
            scores = analytic.mes_score(post.mean, post.std, samples)
        return analytic.select_best(scores, cand)[None, :]


class _McBatch(_Strategy):
    KINDS = {
        "qEI": monte_carlo.ImprovementKind.EI,
        "qPI": monte_carlo.ImprovementKind.PI,
        "qUCB": monte_carlo.ImprovementKind.UCB,
    }

    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        cand = self._candidates(dataset, disc, schedule, rng.child(0))
        beta = None
        if self.config.acquisition == "qUCB":
            ucb = analytic.UcbSchedule(delta=self.config.ucb_delta, cardinality=len(cand))
            beta = ucb.beta(evals_so_far)
        return monte_carlo.greedy_batch_select(
            model, cand, k, self.KINDS[self.config.acquisition], self.config.mc,
            rng.child(1), ucb_beta=beta,
        )


class _KgBatch(_Strategy):
    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        cand = self._candidates(dataset, disc, schedule, rng.child(0))
        pool = np.vstack([cand, dataset.points])
        return monte_carlo.qkg_batch_select(
            model, cand, k, self.config.mc, rng.child(1), candidate_pool=pool
        )


class _WeightedScore(_Strategy):
    """Weighted-score batch; with dynamic candidates this is the DYCORS recipe."""

    def __init__(self, config):
        super().__init__(config)
        self.cycle = geometric.WeightCycle()

    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        cand = self._candidates(dataset, disc, schedule, rng.child(0))
        f_hat = -surrogate.predict(model, cand).mean
        delta = cdist(cand, dataset.points).min(axis=1)
        available = np.ones(len(cand), dtype=bool)
        chosen: list[int] = []
        for _ in range(min(k, len(cand))):
            idx = np.flatnonzero(available)
            scored = [
                geometric.ScoredCandidate(cand[i], float(f_hat[i]), float(delta[i]))
                for i in idx
            ]
            w = geometric.weighted_score(scored, self.cycle)
            self.cycle.advance()
            j = idx[int(np.argmin(w))]
            chosen.append(int(j))
            available[j] = False
            delta = np.minimum(delta, cdist(cand, cand[j][None, :]).ravel())
        return cand[chosen]


class _EepaPlus(_Strategy):
    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        return geometric.eepa_plus_iteration(dataset, model, disc, schedule, k, rng.child(0))


class _RandomSearch(_Strategy):
    """Uniform candidates, uniformly random selection; the no-model baseline."""

    def propose(self, model, dataset, disc, schedule, k, evals_so_far, rng):
        cand = self._candidates(dataset, disc, schedule, rng.child(0))
        pick = rng.child(1).generator().choice(len(cand), size=min(k, len(cand)), replace=False)
        return cand[pick]


def _make_strategy(config: ExperimentConfig) -> _Strategy:
    name = config.acquisition
    if name in SEQUENTIAL_STRATEGIES:
        return _AnalyticSequential(config)
    if name in MC_BATCH_STRATEGIES:
        return _McBatch(config)
    if name == "qKG":
        return _KgBatch(config)
    if name in ("Wscore", "DYCORS"):
        return _WeightedScore(config)
    if name == "EEPA+":
        return _EepaPlus(config)
    if name == "random":
        return _RandomSearch(config)
    raise ConfigError(f"unknown acquisition {name!r}")  # pragma: no cover


def run_single(config: ExperimentConfig, replication_id: int) -> RunRecord:
    """Execute one replication of the adaptive sampling loop.

    The loop evaluates the initial design, then repeats: fit the GP,
    generate candidates, let the strategy pick at most ``min(q, remaining)``
    points, evaluate them and append.  Shorter-than-requested batches (a
    Pareto front smaller than the batch size) simply leave budget for later
    iterations; the run always consumes the budget exactly.

    BLAS pools are pinned to one thread for the duration: the per-iteration
    factorizations are too small to parallelize profitably, and replications
    are the intended unit of parallel work.
    """
    with threadpool_limits(limits=1):
        return _run_single_serial(config, replication_id)


def _run_single_serial(config: ExperimentConfig, replication_id: int) -> RunRecord:
    problem = config.problem
    record = RunRecord(
        problem=problem.name,
        dim=problem.dim,
        acquisition=config.acquisition,
        discretizer=config.discretizer.kind.value,
        replication_id=replication_id,
        sense=problem.sense.value,
    )
    started = time.perf_counter()
    rng = RngStream(config.base_seed, replication_id)
    budget = BudgetState(total=config.budget, remaining=config.budget, batch_size=config.batch_q)
    dataset = Dataset()
    try:
        design = discretize.lhd_maximin(
            config.n_init, problem.dim, rng.child(0), restarts=config.lhd_restarts
        )
        pairs = [
            (u, canonicalize(_evaluate(problem, u), problem.sense)) for u in design
        ]
        dataset = append_evaluations(dataset, pairs, budget)
        kernel_cfg = KernelConfig.from_initial_design(dataset.values)
        record.rows.append(_trace_row(budget, dataset, problem.sense, started))

        strategy = _make_strategy(config)
        disc = config.discretizer
        sigma_floor = config.discretizer.perturb_sigma * SIGMA_MIN_FACTOR
        consecutive_failures = 0
        iteration = 0
        while budget.remaining > 0:
            iteration += 1
            model = surrogate.fit(dataset, kernel_cfg)
            k = min(config.effective_q, budget.remaining)
            schedule = CoordinateSchedule(
                dim=problem.dim, t=budget.spent, start=config.n_init, total=config.budget
            )
            batch = strategy.propose(
                model, dataset, disc, schedule, k, budget.spent, rng.child(iteration)
            )
            batch = np.atleast_2d(batch)[:k]
            if batch.size == 0:
                raise EvaluationError("strategy proposed no evaluable points")
            _, best_before = incumbent(dataset)
            pairs = [
                (u, canonicalize(_evaluate(problem, u), problem.sense)) for u in batch
            ]
            dataset = append_evaluations(dataset, pairs, budget)
            _, best_after = incumbent(dataset)
            if disc.kind is DiscretizerKind.DYNAMIC_COORDINATE:
                if best_after > best_before + 1e-12:
                    consecutive_failures = 0
                else:
                    consecutive_failures += 1
                    if consecutive_failures >= SIGMA_SHRINK_AFTER:
                        disc = disc.with_sigma(max(disc.perturb_sigma / 2.0, sigma_floor))
                        consecutive_failures = 0
            record.rows.append(_trace_row(budget, dataset, problem.sense, started))
        best_point, best_value = incumbent(dataset)
        record.final_point = [float(v) for v in problem.bounds.from_unit(best_point)]
        record.final_value = decanonicalize(best_value, problem.sense)
    except (GpFitError, EvaluationError) as exc:
        record.failed = True
        record.error = f"{type(exc).__name__}: {exc}"
    return record


def _trace_row(budget: BudgetState, dataset: Dataset, sense: ObjectiveSense, started: float):
    _, best = incumbent(dataset)
    return (budget.spent, decanonicalize(best, sense), time.perf_counter() - started)


def _run_cell(args: tuple[ExperimentConfig, int]) -> RunRecord:
    return run_single(*args)


def run_grid(
    configs: Iterable[ExperimentConfig],
    parallelism: int = 1,
    progress: Callable[[RunRecord], None] | None = None,
) -> list[RunRecord]:
    """Run every (config, replication) cell, isolating per-cell failures.

    With ``parallelism > 1`` cells execute in separate processes; records come
    back in deterministic (config, replication) order either way.
    """
    cells = [(config, rep) for config in configs for rep in range(config.replications)]
    if parallelism <= 1:
        records = []
        for cell in cells:
            record = _run_cell(cell)
            if progress is not None:
                progress(record)
            records.append(record)
        return records
    with ProcessPoolExecutor(max_workers=parallelism) as pool:
        records = []
        for record in pool.map(_run_cell, cells):
            if progress is not None:
                progress(record)
            records.append(record)
    return records


def save_records(records: Iterable[RunRecord], out_dir: str | Path) -> Path:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "records.jsonl"
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")
    return path


def load_records(out_dir: str | Path) -> list[RunRecord]:
    path = Path(out_dir) / "records.jsonl"
    with open(path, encoding="utf-8") as fh:
        return [RunRecord.from_json(line) for line in fh if line.strip()]


def write_reports(records: list[RunRecord], out_dir: str | Path) -> list[RankSummary]:
    """Write convergence/summary/ranks/quantile CSVs; returns the rankings.

    Rankings order strategies per (problem, dim) by the mean final value in
    the problem's favorable direction, breaking ties by lower variance.
    Failed replications are excluded from statistics but counted.
    """
    ok = [r for r in records if not r.failed]
    if not ok:
        raise ValueError("no successful records to report")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with _csv_writer(out / "convergence.csv") as writer:
        writer.writerow(["problem", "dim", "acq", "disc", "replication", "evaluations", "best_value"])
        for r in ok:
            for evals, best, _wall in r.rows:
                writer.writerow(
                    [r.problem, r.dim, r.acquisition, r.discretizer, r.replication_id, evals, _fmt(best)]
                )

    cells: dict[tuple, list[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.problem, r.dim, r.acquisition, r.discretizer), []).append(r)

    summary_rows = []
    for key in sorted(cells):
        group = cells[key]
        finals = [r.final_value for r in group if not r.failed]
        failed = sum(r.failed for r in group)
        mean = float(np.mean(finals)) if finals else float("nan")
        var = float(np.var(finals)) if finals else float("nan")
        summary_rows.append([*key, len(finals), failed, mean, var])
    with _csv_writer(out / "summary.csv") as writer:
        writer.writerow(
            ["problem", "dim", "acq", "disc", "reps_ok", "reps_failed", "mean_final", "var_final"]
        )
        for row in summary_rows:
            writer.writerow(row[:6] + [_fmt(row[6]), _fmt(row[7])])

    sense_of = {(r.problem, r.dim): r.sense for r in records}
    ranks: list[RankSummary] = []
    by_problem: dict[tuple, list] = {}
    for row in summary_rows:
        if row[4] > 0:  # reps_ok
            by_problem.setdefault((row[0], row[1]), []).append(row)
    for (prob, dim), rows in sorted(by_problem.items()):
        sign = 1.0 if sense_of[(prob, dim)] == ObjectiveSense.MINIMIZE.value else -1.0
        rows.sort(key=lambda row: (sign * row[6], row[7], row[2], row[3]))
        for position, row in enumerate(rows, start=1):
            ranks.append(RankSummary(prob, dim, row[2], row[3], position, row[6], row[7]))
    with _csv_writer(out / "ranks.csv") as writer:
        writer.writerow(["problem", "dim", "acq", "rank", "mean_final", "var_final"])
        for r in ranks:
            writer.writerow([r.problem, r.dim, r.acquisition, r.rank, _fmt(r.mean_final), _fmt(r.var_final)])

    with _csv_writer(out / "quantiles.csv") as writer:
        writer.writerow(["problem", "dim", "acq", "disc", "evaluations", "q25", "median", "q75"])
        for key in sorted(cells):
            group = [r for r in cells[key] if not r.failed]
            if not group:
                continue
            start = min(r.rows[0][0] for r in group)
            stop = max(r.rows[-1][0] for r in group)
            for evals in range(start, stop + 1):
                traces = [_best_at(r, evals) for r in group]
                traces = [t for t in traces if t is not None]
                if not traces:
                    continue
                q25, q50, q75 = np.percentile(traces, [25, 50, 75])
                writer.writerow([*key, evals, _fmt(q25), _fmt(q50), _fmt(q75)])
    return ranks


def _best_at(record: RunRecord, evals: int) -> float | None:
    """Best-so-far at an evaluation count (forward fill over trace rows)."""
    best = None
    for count, value, _wall in record.rows:
        if count <= evals:
            best = value
        else:
            break
    return best


class _csv_writer:
    def __init__(self, path: Path):
        self.path = path

    def __enter__(self):
        self.fh = open(self.path, "w", encoding="utf-8", newline="")
        return csv.writer(self.fh, lineterminator="\n")

    def __exit__(self, *exc):
        self.fh.close()
        return False


def _fmt(value: float) -> str:
    return format(float(value), ".10g")
