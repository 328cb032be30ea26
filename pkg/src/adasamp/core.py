"""Shared domain types: bounds, objective sense, the evaluated archive, RNG streams.

Every module in the package works in the unit hypercube ``[0, 1]^d``; a
:class:`Bounds` object maps unit-space points to the problem's native box at
evaluation time.  All objective values are stored in *canonical maximization*
form, so minimization problems are negated once at the evaluation boundary and
never again (see :func:`canonicalize`).
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

# Two points closer than this (Euclidean, unit space) are treated as the same
# point; re-evaluating them would destabilize the GP Cholesky factor.
DUPLICATE_TOL = 1e-12


class EvaluationError(RuntimeError):
    """An objective evaluation failed (bad output, nonzero exit, timeout)."""


class BudgetError(RuntimeError):
    """An evaluation was requested with no budget remaining."""


class ObjectiveSense(enum.Enum):
    """Whether the native objective is minimized or maximized."""

    MINIMIZE = "min"
    MAXIMIZE = "max"


def canonicalize(value: float, sense: ObjectiveSense) -> float:
    """Map a native objective value to canonical maximization form.

    Minimization values are negated; maximization values pass through.  The
    function is an involution: applying it twice with the same sense returns
    the original value.
    """
    if not np.all(np.isfinite(np.asarray(value))):
        raise ValueError(f"objective value must be finite, got {value!r}")
    return -value if sense is ObjectiveSense.MINIMIZE else value


def decanonicalize(value: float, sense: ObjectiveSense) -> float:
    """Inverse of :func:`canonicalize` (the same sign flip)."""
    return canonicalize(value, sense)


@dataclass(frozen=True)
class Bounds:
    """Box constraints of the native problem space."""

    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        lower = np.asarray(self.lower, dtype=float)
        upper = np.asarray(self.upper, dtype=float)
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if lower.ndim != 1 or lower.shape != upper.shape or lower.size < 1:
            raise ValueError("bounds must be two equal-length 1-d arrays, d >= 1")
        if not np.all(lower < upper):
            raise ValueError("each lower bound must be strictly below its upper bound")

    @classmethod
    def cube(cls, lo: float, hi: float, dim: int) -> "Bounds":
        return cls(np.full(dim, lo), np.full(dim, hi))

    @property
    def dim(self) -> int:
        return self.lower.size

    def to_unit(self, x: np.ndarray) -> np.ndarray:
        return (np.asarray(x, dtype=float) - self.lower) / (self.upper - self.lower)

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        return self.lower + np.asarray(u, dtype=float) * (self.upper - self.lower)


@dataclass(frozen=True)
class RngStream:
    """Deterministic, splittable random stream.

    Identical ``(seed, stream_id, path)`` triples yield bit-identical draw
    sequences; distinct ``stream_id`` values (one per replication) and child
    paths give statistically independent streams.  ``generator()`` returns a
    *fresh* generator each call, so replaying an operation with the same
    stream reproduces it exactly.
    """

    seed: int
    stream_id: int = 0
    path: tuple = ()

    def child(self, *keys: int) -> "RngStream":
        """Derive an independent sub-stream (per iteration, per purpose)."""
        return RngStream(self.seed, self.stream_id, self.path + tuple(keys))

    def generator(self) -> np.random.Generator:
        seq = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.stream_id, *self.path))
        return np.random.Generator(np.random.PCG64(seq))


@dataclass
class BudgetState:
    """Remaining true-function evaluation budget; one unit per evaluation."""

    total: int
    remaining: int
    batch_size: int

    def __post_init__(self):
        if not (0 <= self.remaining <= self.total):
            raise ValueError("remaining budget must lie in [0, total]")
        if self.batch_size < 1:
            raise ValueError("batch size must be >= 1")

    def spend(self, n: int) -> None:
        if n > self.remaining:
            raise BudgetError(f"requested {n} evaluations with {self.remaining} remaining")
        self.remaining -= n

    @property
    def spent(self) -> int:
        return self.total - self.remaining


@dataclass(frozen=True)
class Dataset:
    """Evaluated archive: unit-space points with canonical (max-form) values.

    ``best_index`` always points at the canonical maximum, lowest index
    winning ties, so replays under a fixed seed are reproducible.
    """

    points: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        values = np.asarray(self.values, dtype=float).ravel()
        if points.size == 0:
            points = points.reshape(0, points.shape[1] if points.ndim == 2 else 0)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)
        if len(points) != len(values):
            raise ValueError("points and values must have equal length")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def best_index(self) -> int:
        if len(self) == 0:
            raise ValueError("empty dataset has no incumbent")
        return int(np.argmax(self.values))


def incumbent(dataset: Dataset) -> tuple[np.ndarray, float]:
    """Best (unit-space point, canonical value) pair evaluated so far."""
    i = dataset.best_index
    return dataset.points[i], float(dataset.values[i])


def append_evaluations(
    dataset: Dataset,
    batch: list[tuple[np.ndarray, float]],
    budget: BudgetState | None = None,
) -> Dataset:
    """Grow the archive by a batch of (unit point, canonical value) pairs.

    Budget is consumed for every pair (the expensive evaluation already
    happened) but near-duplicate points -- within :data:`DUPLICATE_TOL` of an
    archived point -- are skipped with a warning instead of being stored, to
    protect downstream Cholesky factorizations.
    """
    cleaned = []
    for point, value in batch:
        p = np.asarray(point, dtype=float).ravel()
        if not np.all(np.isfinite(p)) or not np.isfinite(value):
            raise ValueError("evaluation contains non-finite data")
        if np.any(p < -1e-12) or np.any(p > 1 + 1e-12):
            raise ValueError(f"point {p} lies outside the unit cube")
        cleaned.append((np.clip(p, 0.0, 1.0), float(value)))
    if budget is not None:
        budget.spend(len(cleaned))
    pts = dataset.points
    vals = dataset.values
    for p, value in cleaned:
        if len(pts) and cdist(pts, p[None, :]).min() < DUPLICATE_TOL:
            warnings.warn(
                "skipping duplicate of an already-evaluated point "
                "(budget consumed, archive unchanged)",
                stacklevel=2,
            )
            continue
        pts = p[None, :] if len(pts) == 0 else np.vstack([pts, p])
        vals = np.append(vals, float(value))
    return Dataset(pts, vals)
