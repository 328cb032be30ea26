"""Closed-form, variance-based acquisition scores: PI, EI, UCB and MES.

All scores are written for canonical maximization and accept scalars or
NumPy arrays (broadcasting elementwise).  Standard-normal quantities go
through ``scipy.special`` so that tails stay accurate: ``log_ndtr`` keeps the
MES entropy term finite far below the sampled maxima.

Sequential selection (one point per iteration) is argmax of the score over a
finite candidate set, with the lowest index winning ties.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import log_ndtr, ndtr

from .. import surrogate
from ..core import RngStream
from ..surrogate import GpModel

# Below this predictive standard deviation the z-score limits apply.
DEGENERATE_STD = 1e-12

_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _norm_pdf(z):
    return np.exp(-0.5 * np.square(z) - _LOG_SQRT_2PI)


def pi_score(mean, std, incumbent_value):
    """Probability that a normal posterior beats the incumbent value."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    z = (mean - incumbent_value) / np.where(std > DEGENERATE_STD, std, 1.0)
    return np.where(std > DEGENERATE_STD, ndtr(z), (mean > incumbent_value).astype(float))


def ei_score(mean, std, incumbent_value):
    """Expected improvement over the incumbent; non-negative by construction."""
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    imp = mean - incumbent_value
    z = imp / np.where(std > DEGENERATE_STD, std, 1.0)
    ei = imp * ndtr(z) + std * _norm_pdf(z)
    return np.where(std > DEGENERATE_STD, np.maximum(ei, 0.0), np.maximum(imp, 0.0))


@dataclass(frozen=True)
class UcbSchedule:
    """Confidence-width schedule ``beta_t = 2 log(|X| t^2 pi^2 / (6 delta))``.

    ``t`` counts true-function evaluations and ``cardinality`` is the size of
    the discretized candidate set; ``delta`` trades regret-bound confidence
    against exploration width.
    """

    delta: float = 0.1
    cardinality: int = 1000

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")
        if self.cardinality < 1:
            raise ValueError("cardinality must be >= 1")

    def beta(self, t: int) -> float:
        if t < 1:
            raise ValueError("evaluation counter t must be >= 1")
        return 2.0 * math.log(self.cardinality * t * t * math.pi**2 / (6.0 * self.delta))


def ucb_score(mean, std, schedule: UcbSchedule, t: int):
    """Optimistic bound ``mean + sqrt(beta_t) * std``."""
    return np.asarray(mean, dtype=float) + math.sqrt(schedule.beta(t)) * np.asarray(std, dtype=float)


@dataclass(frozen=True)
class MaxValueSamples:
    """Approximate draws of the objective's maximum and the fitted Gumbel."""

    y_star: np.ndarray
    gumbel_loc: float
    gumbel_scale: float


def sample_max_values(
    model: GpModel,
    candidates: np.ndarray,
    n_samples: int,
    rng: RngStream,
) -> MaxValueSamples:
    """Sample plausible maxima of the objective over a candidate set.

    The CDF of the max under independent posterior marginals,
    ``P(max <= y) = prod_i Phi((y - mu_i) / sigma_i)``, is matched by a
    Gumbel(a, b) through its 0.25/0.5/0.75 quantiles (found by bisection),
    then sampled by inverse transform.  Draws are truncated below at the
    incumbent value, which the true maximum cannot undercut.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    cand = np.atleast_2d(candidates)
    if cand.shape[0] == 0:
        raise ValueError("candidate set must be non-empty")
    post = surrogate.predict(model, cand)
    mu, sd = post.mean, post.std
    incumbent_value = model.incumbent_value
    gen = rng.generator()

    if np.all(sd <= DEGENERATE_STD):
        loc = float(np.max(mu))
        y = np.full(n_samples, max(loc, incumbent_value))
        return MaxValueSamples(y, loc, 0.0)

    safe_sd = np.maximum(sd, DEGENERATE_STD)

    def log_cdf_max(y: float) -> float:
        return float(np.sum(log_ndtr((y - mu) / safe_sd)))

    lo = float(np.max(mu) - 12.0 * np.max(sd) - 1.0)
    hi = float(np.max(mu + 8.0 * sd) + 1.0)
    if not (log_cdf_max(lo) < math.log(0.25) and log_cdf_max(hi) > math.log(0.75)):
        warnings.warn(
            "max-value CDF quantiles could not be bracketed; "
            "falling back to incumbent + 2 max std",
            stacklevel=2,
        )
        y = np.full(n_samples, incumbent_value + 2.0 * float(np.max(sd)))
        return MaxValueSamples(y, float(y[0]), 0.0)

    quantiles = []
    for p in (0.25, 0.5, 0.75):
        a, b = lo, hi
        target = math.log(p)
        for _ in range(80):
            m = 0.5 * (a + b)
            if log_cdf_max(m) < target:
                a = m
            else:
                b = m
        quantiles.append(0.5 * (a + b))
    y25, y50, y75 = quantiles

    # Gumbel quantile function y_p = a - b log(-log p) solved at p = .25/.75
    # for the scale and at the median for the location.
    scale = (y75 - y25) / (math.log(math.log(4.0)) - math.log(math.log(4.0 / 3.0)))
    scale = max(scale, 0.0)
    loc = y50 + scale * math.log(math.log(2.0))
    if scale < 1e-15:
        y = np.full(n_samples, max(loc, incumbent_value))
        return MaxValueSamples(y, loc, 0.0)
    u = gen.random(n_samples)
    y = loc - scale * np.log(-np.log(u))
    y = np.maximum(y, incumbent_value)
    return MaxValueSamples(y, loc, scale)


def mes_score(mean, std, samples: MaxValueSamples):
    """Average information gain about the maximum value.

    For each sampled max ``y*`` and ``g = (y* - mean) / std`` the per-sample
    gain is ``g phi(g) / (2 Phi(g)) - log Phi(g)``; zero-variance points carry
    no entropy and score 0.
    """
    mean = np.asarray(mean, dtype=float)
    std = np.asarray(std, dtype=float)
    scalar = mean.ndim == 0
    mean, std = np.atleast_1d(mean), np.atleast_1d(std)
    safe_sd = np.maximum(std, DEGENERATE_STD)
    g = (samples.y_star[None, :] - mean[:, None]) / safe_sd[:, None]
    g = np.clip(g, -40.0, 40.0)  # score saturates; avoids exp overflow in masked lanes
    log_cdf = log_ndtr(g)
    ratio = np.exp(-0.5 * np.square(g) - _LOG_SQRT_2PI - log_cdf)  # phi(g)/Phi(g)
    term = 0.5 * g * ratio - log_cdf
    score = np.where(std[:, None] > DEGENERATE_STD, term, 0.0).mean(axis=1)
    score = np.maximum(score, 0.0)
    return float(score[0]) if scalar else score


def select_best(scores: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Argmax selection with lowest-index tie break; NaN scores are excluded."""
    scores = np.asarray(scores, dtype=float)
    cand = np.atleast_2d(candidates)
    if len(scores) != len(cand) or len(scores) == 0:
        raise ValueError("scores and candidates must be equal-length and non-empty")
    if np.any(np.isnan(scores)):
        warnings.warn("NaN acquisition scores excluded from selection", stacklevel=2)
        scores = np.where(np.isnan(scores), -np.inf, scores)
    if np.all(np.isneginf(scores)):
        raise ValueError("all candidate scores are NaN")
    return cand[int(np.argmax(scores))]
