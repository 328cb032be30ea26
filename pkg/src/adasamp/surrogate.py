"""Gaussian-process surrogate with fixed hyperparameters.

The model is a constant-mean GP with a Matérn kernel of smoothness 2.5 over
unit-space inputs.  Hyperparameters are never learned: the length scale
defaults to the mode of a Gamma(shape=3, rate=6) prior, and the output scale
and constant mean are set from the initial design.  Posterior mean and
variance follow the usual noiseless kriging equations

    mean(x) = m + K(X, x)' S^-1 (f - m),
    var(x)  = K(x, x) - K(X, x)' S^-1 K(X, x),

with S = K(X, X) + jitter * I factorized by Cholesky.  The jitter starts tiny
and doubles on factorization failure up to a hard cap, after which fitting
raises :class:`GpFitError`.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular
from scipy.spatial.distance import cdist

from .core import Dataset, RngStream

SQRT5 = np.sqrt(5.0)

# Jitter escalation, as multiples of the output scale.  The base value is
# small enough that noiseless interpolation stays within 1e-6 relative error
# even on badly conditioned designs.
BASE_JITTER = 1e-12
MAX_JITTER = 1e-4


class GpFitError(RuntimeError):
    """Kernel matrix could not be factorized even at the maximum jitter."""


@dataclass(frozen=True)
class KernelConfig:
    """Fixed GP hyperparameters.

    ``length_scale=None`` resolves to the mode ``(shape - 1) / rate`` of the
    gamma length-scale prior, the one fixed value we take from it.  Only
    smoothness 2.5 is supported.
    """

    smoothness: float = 2.5
    length_scale: float | np.ndarray | None = None
    output_scale: float = 1.0
    mean_const: float = 0.0
    length_scale_prior: tuple[float, float] = (3.0, 6.0)  # (shape, rate)

    def __post_init__(self):
        if self.smoothness != 2.5:
            raise ValueError("only Matérn smoothness 2.5 is supported")
        if self.output_scale <= 0:
            raise ValueError("output_scale must be positive")
        if self.length_scale is not None and np.any(np.asarray(self.length_scale) <= 0):
            raise ValueError("length_scale must be positive")

    @property
    def resolved_length_scale(self) -> float | np.ndarray:
        if self.length_scale is None:
            shape, rate = self.length_scale_prior
            return (shape - 1.0) / rate
        return self.length_scale

    @classmethod
    def from_initial_design(cls, values: np.ndarray) -> "KernelConfig":
        """Fix output scale and constant mean from initial-design values."""
        v = np.asarray(values, dtype=float)
        return cls(output_scale=max(float(np.var(v)), 1e-12), mean_const=float(np.mean(v)))


def matern25(xa: np.ndarray, xb: np.ndarray, cfg: KernelConfig) -> float:
    """Matérn-2.5 kernel between two unit-space points."""
    ls = cfg.resolved_length_scale
    h = np.linalg.norm((np.asarray(xa, float) - np.asarray(xb, float)) / ls)
    s = SQRT5 * h
    return float(cfg.output_scale * (1.0 + s + s * s / 3.0) * np.exp(-s))


def kernel_matrix(xa: np.ndarray, xb: np.ndarray, cfg: KernelConfig) -> np.ndarray:
    """Matérn-2.5 cross-kernel matrix, shape ``(len(xa), len(xb))``."""
    ls = np.broadcast_to(np.asarray(cfg.resolved_length_scale, float), (xa.shape[1],))
    s = SQRT5 * cdist(xa / ls, xb / ls)
    return cfg.output_scale * (1.0 + s + s * s / 3.0) * np.exp(-s)


@dataclass(frozen=True)
class GpModel:
    """Immutable fitted GP: training data, Cholesky factor and solve state."""

    train_points: np.ndarray       # (n, d) unit-space inputs
    train_values: np.ndarray       # (n,) values centered by cfg.mean_const
    chol_factor: np.ndarray        # lower-triangular L with L L' = K + jitter I
    alpha: np.ndarray              # (K + jitter I)^-1 train_values
    jitter: float                  # absolute jitter actually used
    cfg: KernelConfig

    def __len__(self) -> int:
        return len(self.train_values)

    @property
    def incumbent_value(self) -> float:
        """Largest (canonical) training value, mean offset restored."""
        return float(np.max(self.train_values) + self.cfg.mean_const)


@dataclass(frozen=True)
class Posterior:
    mean: np.ndarray
    variance: np.ndarray
    cross_cov: np.ndarray | None = None

    @property
    def std(self) -> np.ndarray:
        return np.sqrt(self.variance)


def fit(dataset: Dataset, cfg: KernelConfig, base_jitter: float = BASE_JITTER) -> GpModel:
    """Fit the GP, escalating jitter by doubling until Cholesky succeeds.

    ``base_jitter`` is relative to the output scale; zero attempts an exact
    factorization first and escalates from :data:`BASE_JITTER` on failure.
    """
    if len(dataset) < 2:
        raise ValueError("GP fit needs at least 2 training points")
    x = dataset.points
    f = dataset.values - cfg.mean_const
    k = kernel_matrix(x, x, cfg)
    jitter = base_jitter * cfg.output_scale
    cap = MAX_JITTER * cfg.output_scale
    eye = np.eye(len(x))
    while True:
        try:
            chol = np.linalg.cholesky(k + jitter * eye)
            if not np.all(np.isfinite(chol)):
                raise np.linalg.LinAlgError("factor contains non-finite entries")
            break
        except np.linalg.LinAlgError:
            jitter = BASE_JITTER * cfg.output_scale if jitter == 0.0 else 2.0 * jitter
            if jitter > cap:
                raise GpFitError(
                    f"Cholesky failed for {len(x)} points even at jitter {cap:.3g}"
                ) from None
    alpha = cho_solve((chol, True), f)
    return GpModel(x, f, chol, alpha, jitter, cfg)


def predict(model: GpModel, queries: np.ndarray, want_joint: bool = False) -> Posterior:
    """Posterior mean/variance (and optionally full covariance) at queries.

    Pure function: identical model and queries give identical output.
    Variances are clamped at zero; when the joint covariance is requested its
    diagonal is synchronized with the clamped variances.
    """
    q = np.atleast_2d(np.asarray(queries, dtype=float))
    if q.shape[0] == 0:
        raise ValueError("queries must be non-empty")
    kxq = kernel_matrix(model.train_points, q, model.cfg)
    mean = model.cfg.mean_const + kxq.T @ model.alpha
    v = solve_triangular(model.chol_factor, kxq, lower=True)
    variance = np.clip(model.cfg.output_scale - np.sum(v * v, axis=0), 0.0, None)
    cross = None
    if want_joint:
        cross = kernel_matrix(q, q, model.cfg) - v.T @ v
        np.fill_diagonal(cross, variance)
    return Posterior(mean, variance, cross)


def sample_joint(
    model: GpModel,
    queries: np.ndarray,
    n_samples: int,
    rng: RngStream,
) -> np.ndarray:
    """Draw joint posterior samples, shape ``(n_samples, len(queries))``.

    Samples are ``mean + L z`` with ``z`` standard normal.  A Cholesky factor
    of the posterior covariance is attempted first; if the covariance is not
    numerically PSD its negative eigenvalues are clipped at zero (with a
    warning when the deficiency is material rather than roundoff).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    post = predict(model, queries, want_joint=True)
    factor = covariance_factor(post.cross_cov)
    z = rng.generator().standard_normal((n_samples, len(post.mean)))
    return post.mean[None, :] + z @ factor.T


def covariance_factor(cov: np.ndarray) -> np.ndarray:
    """Square root ``F`` with ``F F' = cov``; eigen-clipped if not PSD."""
    scale = max(float(np.max(np.diag(cov), initial=0.0)), 1.0)
    try:
        return np.linalg.cholesky(cov + 1e-16 * scale * np.eye(len(cov)))
    except np.linalg.LinAlgError:
        pass
    eigvals, eigvecs = np.linalg.eigh(cov)
    if eigvals.min() < -1e-10 * scale:
        warnings.warn(
            f"posterior covariance not PSD (min eigenvalue {eigvals.min():.3g}); "
            "clipping at zero",
            stacklevel=2,
        )
    return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))
