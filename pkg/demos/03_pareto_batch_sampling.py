"""Anatomy of one Pareto-based batch sampling iteration.

Shows the pipeline behind the EEPA+ strategy: perturb a decaying subset of
the incumbent's coordinates, build the non-dominated front over (predicted
value, distance to the archive), then pick a diverse batch from the front.
When the front is smaller than the batch size the leftover budget simply
stays unspent for later iterations.

Run:  python demos/03_pareto_batch_sampling.py
"""

import numpy as np

from adasamp import Dataset, KernelConfig, RngStream, canonicalize, incumbent
from adasamp.acquisition.geometric import eepa_batch, pareto_front, score_candidates
from adasamp.discretize import (
    CoordinateSchedule,
    DiscretizerConfig,
    DiscretizerKind,
    dynamic_candidates,
    lhd_maximin,
)
from adasamp.problems import synthetic_problem
from adasamp.surrogate import fit

problem = synthetic_problem("rastrigin", 6)
rng = RngStream(seed=3)

design = lhd_maximin(14, problem.dim, rng.child(0))
values = np.array(
    [canonicalize(problem.evaluate(problem.bounds.from_unit(u)), problem.sense) for u in design]
)
dataset = Dataset(design, values)
model = fit(dataset, KernelConfig.from_initial_design(values))
best_point, best_value = incumbent(dataset)
print(f"incumbent after the initial design: f = {-best_value:.3f}")

# Candidate cloud around the incumbent. Early in the run the coordinate
# selection probability is at its maximum, so most coordinates move.
disc = DiscretizerConfig(kind=DiscretizerKind.DYNAMIC_COORDINATE, n_candidates=800)
schedule = CoordinateSchedule(dim=problem.dim, t=14, start=14, total=400)
print(f"coordinate selection probability now: {schedule.probability(1 / problem.dim):.3f}")
candidates = dynamic_candidates(disc, schedule, best_point, rng.child(1))

scored = score_candidates(model, candidates, dataset)
front = pareto_front(scored)
print(f"candidates: {len(scored)}; non-dominated front: {len(front)}")
print("front corners (f_hat = predicted value to minimize, delta = novelty):")
members = sorted(front.members, key=lambda m: m.f_hat)
for m in (members[0], members[len(members) // 2], members[-1]):
    print(f"  f_hat = {m.f_hat:8.3f}   delta = {m.delta:.4f}")

for q in (2, 4, 8, len(front) + 5):
    batch = eepa_batch(front, q, dataset)
    note = "(front exhausted, budget carried over)" if len(batch) < q else ""
    print(f"batch request q={q:2d} -> {len(batch)} points {note}")

batch = eepa_batch(front, 4, dataset)
print("\nselected batch (seeded by best predicted value, filled by maximin):")
for i, m in enumerate(batch):
    x = problem.bounds.from_unit(m.point)
    print(f"  {i}: f_hat = {m.f_hat:8.3f} delta = {m.delta:.4f} x[:2] = ({x[0]:6.2f}, {x[1]:6.2f})")
