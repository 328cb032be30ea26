"""Acquisition functions: analytic (closed-form), Monte-Carlo batch, and
distance-based geometric strategies."""

from . import analytic, geometric, monte_carlo

__all__ = ["analytic", "geometric", "monte_carlo"]
