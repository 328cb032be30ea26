"""Objective suite: synthetic benchmarks plus a subprocess protocol for
external black boxes.

The synthetic functions are the standard multimodal minimization benchmarks
on their canonical boxes (Rastrigin on [-5.12, 5.12]^d, Rosenbrock on
[-5, 10]^d, Levy on [-10, 10]^d), each with its analytic minimum of 0.
External objectives wrap any executable that reads one line of coordinates on
stdin and prints the objective value: the simplest contract that can front a
simulator.
"""

from __future__ import annotations

import subprocess
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Bounds, EvaluationError, ObjectiveSense

DEFAULT_TIMEOUT = 300.0


@dataclass(frozen=True)
class ProblemSpec:
    """A named objective with its box, sense and (optionally) known optimum."""

    name: str
    dim: int
    bounds: Bounds
    sense: ObjectiveSense
    evaluate: Callable[[np.ndarray], float]
    known_optimum: tuple[np.ndarray, float] | None = None

    def __post_init__(self):
        if self.bounds.dim != self.dim:
            raise ValueError("bounds dimension does not match problem dimension")
        if self.known_optimum is not None:
            point, _ = self.known_optimum
            if np.any(point < self.bounds.lower) or np.any(point > self.bounds.upper):
                raise ValueError("known optimum lies outside the bounds")


def rastrigin(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(10.0 * x.size + np.sum(x * x - 10.0 * np.cos(2.0 * np.pi * x)))


def rosenbrock(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.sum(100.0 * (x[1:] - x[:-1] ** 2) ** 2 + (1.0 - x[:-1]) ** 2))


def levy(x: np.ndarray) -> float:
    x = np.asarray(x, dtype=float)
    w = 1.0 + (x - 1.0) / 4.0
    head = np.sin(np.pi * w[0]) ** 2
    tail = (w[-1] - 1.0) ** 2 * (1.0 + np.sin(2.0 * np.pi * w[-1]) ** 2)
    body = np.sum((w[:-1] - 1.0) ** 2 * (1.0 + 10.0 * np.sin(np.pi * w[:-1] + 1.0) ** 2))
    return float(head + body + tail)


def synthetic_problem(name: str, dim: int) -> ProblemSpec:
    """Look up one of the bundled minimization benchmarks by name."""
    registry = {
        "rastrigin": (rastrigin, (-5.12, 5.12), np.zeros(dim)),
        "rosenbrock": (rosenbrock, (-5.0, 10.0), np.ones(dim)),
        "levy": (levy, (-10.0, 10.0), np.ones(dim)),
    }
    if name not in registry:
        raise ValueError(f"unknown synthetic problem {name!r}; choose from {sorted(registry)}")
    fn, (lo, hi), argmin = registry[name]
    return ProblemSpec(
        name=name,
        dim=dim,
        bounds=Bounds.cube(lo, hi, dim),
        sense=ObjectiveSense.MINIMIZE,
        evaluate=fn,
        known_optimum=(argmin, 0.0),
    )


@dataclass(frozen=True)
class ExternalCommand:
    """Executable objective: one process invocation per evaluation.

    Protocol: the point is written to stdin as space-separated decimals on a
    single newline-terminated line; the first whitespace token of stdout is
    parsed as the objective value.  A nonzero exit, an unparsable or
    non-finite value, or exceeding the timeout raises
    :class:`~adasamp.core.EvaluationError` -- expensive evaluations must never
    be silently retried.
    """

    command: tuple[str, ...]
    timeout: float = DEFAULT_TIMEOUT

    def __call__(self, x: np.ndarray) -> float:
        line = " ".join(format(v, ".17g") for v in np.asarray(x, dtype=float)) + "\n"
        try:
            proc = subprocess.run(
                self.command,
                input=line,
                capture_output=True,
                text=True,
                timeout=self.timeout,
            )
        except subprocess.TimeoutExpired as exc:
            raise EvaluationError(
                f"objective command timed out after {self.timeout}s"
            ) from exc
        if proc.returncode != 0:
            raise EvaluationError(
                f"objective command exited with status {proc.returncode}: {proc.stderr.strip()!r}"
            )
        tokens = proc.stdout.split()
        if not tokens:
            raise EvaluationError("objective command produced no output")
        try:
            value = float(tokens[0])
        except ValueError as exc:
            raise EvaluationError(f"cannot parse objective value from {tokens[0]!r}") from exc
        if not np.isfinite(value):
            raise EvaluationError(f"objective command returned non-finite value {value!r}")
        return value


def external_problem(
    command: tuple[str, ...] | list[str],
    dim: int,
    bounds: Bounds | None = None,
    sense: ObjectiveSense = ObjectiveSense.MINIMIZE,
    timeout: float = DEFAULT_TIMEOUT,
    name: str = "external",
) -> ProblemSpec:
    """Wrap an executable black box as a problem over the given box."""
    return ProblemSpec(
        name=name,
        dim=dim,
        bounds=bounds if bounds is not None else Bounds.cube(0.0, 1.0, dim),
        sense=sense,
        evaluate=ExternalCommand(tuple(command), timeout),
    )


def external_objective(spec: ProblemSpec, x: np.ndarray) -> float:
    """Evaluate a problem at a native-space point, checking the box."""
    x = np.asarray(x, dtype=float)
    if np.any(x < spec.bounds.lower - 1e-12) or np.any(x > spec.bounds.upper + 1e-12):
        raise ValueError("point lies outside the problem bounds")
    return spec.evaluate(x)
