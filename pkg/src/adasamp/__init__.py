"""adasamp: surrogate-based adaptive sampling for expensive black boxes.

A small numpy/scipy toolkit for budgeted global optimization: a fixed
hyperparameter Gaussian-process surrogate, the classic variance-based
acquisition functions (PI, EI, UCB, MES, KG and their Monte-Carlo batch
forms), distance-based alternatives (weighted score / DYCORS and the
Pareto-front batch sampler), pluggable candidate-set discretization, a
benchmark suite, and a replication harness with CSV reports.
"""

from .core import (
    Bounds,
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
from .harness import (
    ConfigError,
    ExperimentConfig,
    RankSummary,
    RunRecord,
    run_grid,
    run_single,
    write_reports,
)
from .problems import ProblemSpec, external_problem, synthetic_problem
from .surrogate import GpFitError, GpModel, KernelConfig, Posterior

__version__ = "0.1.0"

__all__ = [
    "Bounds",
    "BudgetState",
    "ConfigError",
    "CoordinateSchedule",
    "Dataset",
    "DiscretizerConfig",
    "DiscretizerKind",
    "EvaluationError",
    "ExperimentConfig",
    "GpFitError",
    "GpModel",
    "KernelConfig",
    "ObjectiveSense",
    "Posterior",
    "ProblemSpec",
    "RankSummary",
    "RngStream",
    "RunRecord",
    "append_evaluations",
    "canonicalize",
    "decanonicalize",
    "external_problem",
    "incumbent",
    "run_grid",
    "run_single",
    "synthetic_problem",
    "write_reports",
    "__version__",
]
