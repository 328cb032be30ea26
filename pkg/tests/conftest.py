"""Shared fixtures and helpers for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from adasamp.core import Dataset, RngStream
from adasamp.surrogate import GpModel, KernelConfig, fit


def make_dataset(points, values) -> Dataset:
    return Dataset(np.asarray(points, dtype=float), np.asarray(values, dtype=float))


def make_model(points, values, cfg: KernelConfig | None = None, **fit_kwargs) -> GpModel:
    cfg = cfg or KernelConfig()
    return fit(make_dataset(points, values), cfg, **fit_kwargs)


def random_model(gen: np.random.Generator, n: int = 8, dim: int = 2, value_scale: float = 1.0):
    """A GP fitted to random unit-cube data; returns (model, dataset)."""
    points = gen.random((n, dim))
    values = gen.standard_normal(n) * value_scale
    dataset = make_dataset(points, values)
    cfg = KernelConfig.from_initial_design(values)
    return fit(dataset, cfg), dataset


@pytest.fixture
def gen() -> np.random.Generator:
    return np.random.default_rng(20240817)


@pytest.fixture
def stream() -> RngStream:
    return RngStream(seed=20240817)
