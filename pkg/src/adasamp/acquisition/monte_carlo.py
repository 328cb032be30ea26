"""Monte-Carlo batch acquisitions: qEI / qPI / qUCB and discrete knowledge
gradient with fantasy updates.

Batch improvement scores draw joint posterior samples over the batch via the
reparameterization ``Y = mean + F z`` (``F`` a covariance factor, ``z`` fixed
standard-normal base samples), apply a per-sample utility, take the max over
batch members and average over samples.  Greedy selection grows the batch one
candidate at a time over a finite candidate set.

The knowledge gradient scores a candidate by how much the max posterior mean
over a fixed pool is expected to rise after observing the candidate.  Fantasy
observations update the model through an exact rank-one extension of the
Cholesky factor, so each fantasy is equivalent to a from-scratch refit.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .. import surrogate
from ..core import RngStream
from ..surrogate import GpModel, covariance_factor, kernel_matrix


class ImprovementKind(enum.Enum):
    EI = "ei"
    PI = "pi"
    UCB = "ucb"


@dataclass(frozen=True)
class McConfig:
    """Sampling effort for the MC acquisitions."""

    n_mc: int = 4096
    n_fantasy: int = 32
    batch_q: int = 1
    pi_temperature: float = 1e-3

    def __post_init__(self):
        if self.n_mc < 128:
            raise ValueError("n_mc must be >= 128")
        if self.n_fantasy < 8:
            raise ValueError("n_fantasy must be >= 8")
        if self.batch_q < 1:
            raise ValueError("batch_q must be >= 1")


def q_improvement_score(
    model: GpModel,
    batch: np.ndarray,
    incumbent_value: float,
    kind: ImprovementKind,
    cfg: McConfig,
    rng: RngStream,
    ucb_beta: float | None = None,
    smooth: bool = True,
) -> float:
    """MC estimate of the joint batch utility.

    Per posterior sample the utility of the batch is the max over members of
    the pointwise utility: improvement over the incumbent (EI), the
    improvement indicator (PI, smoothed by a sigmoid of width
    ``pi_temperature`` unless ``smooth=False``), or the reparameterized
    optimistic value ``mean + sqrt(beta pi / 2) |Y - mean|`` (UCB, which
    requires ``ucb_beta``).
    """
    pts = np.atleast_2d(batch)
    samples = surrogate.sample_joint(model, pts, cfg.n_mc, rng)
    if kind is ImprovementKind.EI:
        util = np.maximum(samples - incumbent_value, 0.0)
    elif kind is ImprovementKind.PI:
        if smooth:
            util = _sigmoid((samples - incumbent_value) / cfg.pi_temperature)
        else:
            util = (samples > incumbent_value).astype(float)
    elif kind is ImprovementKind.UCB:
        if ucb_beta is None:
            raise ValueError("UCB improvement needs ucb_beta")
        mean = surrogate.predict(model, pts).mean
        util = mean[None, :] + math.sqrt(ucb_beta * math.pi / 2.0) * np.abs(samples - mean[None, :])
    else:  # pragma: no cover - exhaustive enum
        raise ValueError(kind)
    return float(np.mean(np.max(util, axis=1)))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def greedy_batch_select(
    model: GpModel,
    candidates: np.ndarray,
    q: int,
    kind: ImprovementKind,
    cfg: McConfig,
    rng: RngStream,
    ucb_beta: float | None = None,
) -> np.ndarray:
    """Grow a batch of ``q`` points greedily from a finite candidate set.

    Each step adds the candidate maximizing the joint score of the partial
    batch, holding the base samples fixed within the step (common random
    numbers) so the argmax is deterministic under a fixed stream.
    """
    cand = np.atleast_2d(candidates)
    if len(cand) < q:
        raise ValueError(f"need at least q={q} candidates, got {len(cand)}")
    incumbent_value = model.incumbent_value
    selected: list[int] = []
    for step in range(q):
        step_rng = rng.child(step)
        best_j, best_score = -1, -np.inf
        for j in range(len(cand)):
            if j in selected:
                continue
            batch = cand[selected + [j]]
            score = q_improvement_score(
                model, batch, incumbent_value, kind, cfg, step_rng, ucb_beta=ucb_beta
            )
            if score > best_score:
                best_j, best_score = j, score
        selected.append(best_j)
    return cand[selected]


@dataclass(frozen=True)
class FantasyModel:
    """GP extended by one hypothesized observation via rank-one update.

    Predictions through the extended factorization agree with a from-scratch
    refit on the augmented data to within numerical tolerance.
    """

    base: GpModel
    fantasy_point: np.ndarray
    fantasy_value: float
    updated_alpha: np.ndarray
    updated_chol: np.ndarray

    def as_model(self) -> GpModel:
        return GpModel(
            train_points=np.vstack([self.base.train_points, self.fantasy_point[None, :]]),
            train_values=np.append(self.base.train_values, self.fantasy_value - self.base.cfg.mean_const),
            chol_factor=self.updated_chol,
            alpha=self.updated_alpha,
            jitter=self.base.jitter,
            cfg=self.base.cfg,
        )


def fantasize(model: GpModel, point: np.ndarray, value: float) -> FantasyModel:
    """Extend the Cholesky factor and solve state with one (point, value) pair.

    ``value`` is an uncentered observation.  The new pivot is floored at the
    model jitter, which is what a refit with jitter escalation would produce
    for a degenerate (already-observed) point.
    """
    x = np.asarray(point, dtype=float).ravel()
    l_old = model.chol_factor
    kxs = kernel_matrix(model.train_points, x[None, :], model.cfg)[:, 0]
    w = solve_triangular(l_old, kxs, lower=True)
    s2 = model.cfg.output_scale + model.jitter - float(w @ w)
    s = math.sqrt(max(s2, model.jitter))
    n = len(model)
    chol = np.zeros((n + 1, n + 1))
    chol[:n, :n] = l_old
    chol[n, :n] = w
    chol[n, n] = s
    f_ext = np.append(model.train_values, value - model.cfg.mean_const)
    # forward/back substitution through the extended factor
    y = solve_triangular(chol, f_ext, lower=True)
    alpha = solve_triangular(chol.T, y, lower=False)
    return FantasyModel(model, x, value, alpha, chol)


def kg_score(
    model: GpModel,
    candidate: np.ndarray,
    candidate_pool: np.ndarray,
    cfg: McConfig,
    rng: RngStream,
) -> float:
    """Knowledge gradient of one candidate over a finite pool.

    Draws ``n_fantasy`` values from the candidate's posterior, updates the
    model for each and averages the resulting rise of the max posterior mean
    over the pool.  Because the updated mean is linear in the fantasied value,
    all fantasies share one rank-one update and differ only by a scalar.
    """
    pool = np.atleast_2d(candidate_pool)
    if len(pool) == 0:
        raise ValueError("candidate pool must be non-empty")
    x = np.asarray(candidate, dtype=float).ravel()
    post_x = surrogate.predict(model, x[None, :])
    mu_x, sd_x = float(post_x.mean[0]), float(post_x.std[0])

    pool_mean = surrogate.predict(model, pool).mean
    mu_star_now = float(np.max(pool_mean))

    # Updated pool mean for fantasy value y:
    #   mean_new(z) = mean(z) + cov_post(z, x) * (y - mu_x) / (var_post(x) + jitter)
    # computed through the same quantities as the rank-one Cholesky update.
    l_old = model.chol_factor
    kxs = kernel_matrix(model.train_points, x[None, :], model.cfg)[:, 0]
    w = solve_triangular(l_old, kxs, lower=True)
    s2 = max(model.cfg.output_scale + model.jitter - float(w @ w), model.jitter)
    kxp = kernel_matrix(model.train_points, pool, model.cfg)
    vp = solve_triangular(l_old, kxp, lower=True)
    cov_xp = kernel_matrix(x[None, :], pool, model.cfg)[0] - w @ vp

    z = rng.generator().standard_normal(cfg.n_fantasy)
    fantasy_y = mu_x + sd_x * z
    gains = cov_xp[None, :] * ((fantasy_y - mu_x) / s2)[:, None]
    mu_star_new = np.max(pool_mean[None, :] + gains, axis=1)
    return max(float(np.mean(mu_star_new - mu_star_now)), -1e-9)


def qkg_batch_select(
    model: GpModel,
    candidates: np.ndarray,
    q: int,
    cfg: McConfig,
    rng: RngStream,
    candidate_pool: np.ndarray | None = None,
) -> np.ndarray:
    """Select ``q`` points by sequential KG with mean-value fantasies.

    After each selection the model is fantasized at the chosen point with its
    posterior mean, which collapses that point's value of information and
    steers later selections elsewhere.
    """
    cand = np.atleast_2d(candidates)
    if len(cand) < q:
        raise ValueError(f"need at least q={q} candidates, got {len(cand)}")
    pool = cand if candidate_pool is None else np.atleast_2d(candidate_pool)
    current = model
    chosen: list[np.ndarray] = []
    for step in range(q):
        step_rng = rng.child(step)
        scores = np.array([kg_score(current, c, pool, cfg, step_rng) for c in cand])
        j = int(np.argmax(scores))
        point = cand[j]
        chosen.append(point)
        mean_value = float(surrogate.predict(current, point[None, :]).mean[0])
        current = fantasize(current, point, mean_value).as_model()
    return np.array(chosen)
