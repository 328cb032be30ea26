"""Distance-based acquisitions: weighted score and Pareto-front batch sampling.

Both strategies trade the surrogate's predicted value (exploitation) against
the distance to already-evaluated points (exploration), but in different
ways: the weighted score aggregates the two linearly under a cycling weight,
while the Pareto sampler keeps the whole non-dominated set and picks a
diverse batch from it.

Convention: ``f_hat`` is the predicted objective in *minimization* sign and
``delta`` the Euclidean distance (unit space) to the closest evaluated point,
so candidates want small ``f_hat`` and large ``delta``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .. import discretize, surrogate
from ..core import Dataset, RngStream, incumbent
from ..surrogate import GpModel

NORMALIZATION_EPS = 1e-12


@dataclass
class WeightCycle:
    """Cycling response weight ``w_r``; the distance weight is ``1 - w_r``."""

    response_weights: tuple[float, ...] = (0.3, 0.5, 0.8, 0.95)
    position: int = 0

    def __post_init__(self):
        if not all(0.0 <= w <= 1.0 for w in self.response_weights):
            raise ValueError("response weights must lie in [0, 1]")

    @property
    def w_r(self) -> float:
        return self.response_weights[self.position % len(self.response_weights)]

    def advance(self) -> None:
        self.position = (self.position + 1) % len(self.response_weights)


@dataclass(frozen=True)
class ScoredCandidate:
    """Candidate with predicted value (min sign) and distance to the archive."""

    point: np.ndarray
    f_hat: float
    delta: float


@dataclass(frozen=True)
class ParetoFront:
    """Non-dominated candidates under (minimize f_hat, maximize delta)."""

    members: tuple[ScoredCandidate, ...]
    indices: tuple[int, ...]  # positions in the original candidate list

    def __len__(self) -> int:
        return len(self.members)


def weighted_score(candidates: list[ScoredCandidate], cycle: WeightCycle) -> np.ndarray:
    """Weighted aggregate of normalized value and distance scores (lower wins).

    Value scores normalize ``f_hat`` to [0, 1] (best = 0) and distance scores
    normalize ``delta`` reversed (farthest = 0); a degenerate spread of either
    quantity zeroes that component.
    """
    if len(candidates) == 0:
        raise ValueError("need at least one candidate")
    f_hat = np.array([c.f_hat for c in candidates])
    delta = np.array([c.delta for c in candidates])
    f_spread = f_hat.max() - f_hat.min()
    d_spread = delta.max() - delta.min()
    v_r = (f_hat - f_hat.min()) / f_spread if f_spread >= NORMALIZATION_EPS else np.zeros_like(f_hat)
    v_d = (delta.max() - delta) / d_spread if d_spread >= NORMALIZATION_EPS else np.zeros_like(delta)
    w_r = cycle.w_r
    return (1.0 - w_r) * v_d + w_r * v_r


def pareto_front(candidates: list[ScoredCandidate]) -> ParetoFront:
    """Exact non-dominated set via sort-and-sweep, O(n log n).

    Candidates are ordered by ascending ``f_hat`` (ties: descending ``delta``,
    then input order) and kept whenever their ``delta`` strictly exceeds the
    best seen, which also collapses exact duplicates onto the lowest index.
    """
    if len(candidates) == 0:
        raise ValueError("need at least one candidate")
    f_hat = np.array([c.f_hat for c in candidates])
    delta = np.array([c.delta for c in candidates])
    order = np.lexsort((np.arange(len(candidates)), -delta, f_hat))
    keep: list[int] = []
    best_delta = -np.inf
    for i in order:
        if delta[i] > best_delta:
            keep.append(int(i))
            best_delta = delta[i]
    keep.sort()
    return ParetoFront(tuple(candidates[i] for i in keep), tuple(keep))


def eepa_batch(front: ParetoFront, q: int, dataset: Dataset) -> list[ScoredCandidate]:
    """Pick up to ``q`` diverse members of the front.

    A front no larger than the batch is returned whole (unused budget is the
    caller's to carry over).  Otherwise the batch is seeded with the member of
    smallest ``f_hat`` and filled by repeatedly adding the member farthest
    (maximin) from everything evaluated or already selected, eliminating
    near-duplicates of the seed.
    """
    if len(front) == 0:
        raise ValueError("front must be non-empty")
    if len(front) <= q:
        return list(front.members)
    members = list(front.members)
    seed = min(range(len(members)), key=lambda i: (members[i].f_hat, i))
    selected = [members[seed]]
    remaining = [m for i, m in enumerate(members) if i != seed]
    reference = selected[0].point[None, :]
    if len(dataset):
        reference = np.vstack([dataset.points, reference])
    while len(selected) < q and remaining:
        pts = np.vstack([m.point for m in remaining])
        dists = cdist(pts, reference).min(axis=1)
        j = int(np.argmax(dists))
        selected.append(remaining.pop(j))
        reference = np.vstack([reference, selected[-1].point[None, :]])
    return selected


def score_candidates(model: GpModel, candidates: np.ndarray, dataset: Dataset) -> list[ScoredCandidate]:
    """Attach min-sign predictions and archive distances to raw points."""
    cand = np.atleast_2d(candidates)
    mean = surrogate.predict(model, cand).mean
    delta = cdist(cand, dataset.points).min(axis=1)
    return [
        ScoredCandidate(point=cand[i], f_hat=float(-mean[i]), delta=float(delta[i]))
        for i in range(len(cand))
    ]


def eepa_plus_iteration(
    dataset: Dataset,
    model: GpModel,
    disc: "discretize.DiscretizerConfig",
    schedule: "discretize.CoordinateSchedule",
    q: int,
    rng: RngStream,
) -> np.ndarray:
    """One Pareto-based sampling step around the incumbent.

    Generates dynamic coordinate perturbations of the incumbent, scores them,
    builds the non-dominated front and returns a diverse batch of at most
    ``q`` points (fewer when the front is smaller, saving budget).
    """
    if len(dataset) == 0:
        raise ValueError("dataset must be non-empty")
    best_point, _ = incumbent(dataset)
    cand = discretize.dynamic_candidates(disc, schedule, best_point, rng)
    if len(cand) == 0:
        cand = discretize.dynamic_candidates(
            disc.with_candidates(2 * disc.n_candidates), schedule, best_point, rng.child(1)
        )
        if len(cand) == 0:
            raise RuntimeError("discretizer produced no in-bounds candidates")
    scored = score_candidates(model, cand, dataset)
    front = pareto_front(scored)
    batch = eepa_batch(front, q, dataset)
    return np.vstack([m.point for m in batch])
