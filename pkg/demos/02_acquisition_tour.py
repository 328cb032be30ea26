"""Score one candidate set with every acquisition family and compare picks.

On a 2-d Rastrigin with a small evaluated archive, this prints which
candidate each strategy would evaluate next and why: the improvement-based
scores chase the predicted optimum, UCB and MES lean on uncertainty, the
knowledge gradient values information about the pool maximum, and the
weighted score trades predicted value against distance to the archive.

Run:  python demos/02_acquisition_tour.py
"""

import numpy as np

from adasamp import Dataset, KernelConfig, RngStream, canonicalize
from adasamp.acquisition import analytic, geometric, monte_carlo
from adasamp.discretize import DiscretizerConfig, DiscretizerKind, lhd_maximin, uniform_candidates
from adasamp.problems import synthetic_problem
from adasamp.surrogate import fit, predict

problem = synthetic_problem("rastrigin", 2)
rng = RngStream(seed=11)

design = lhd_maximin(10, problem.dim, rng.child(0))
values = np.array(
    [canonicalize(problem.evaluate(problem.bounds.from_unit(u)), problem.sense) for u in design]
)
dataset = Dataset(design, values)
model = fit(dataset, KernelConfig.from_initial_design(values))
incumbent_value = model.incumbent_value
print(f"archive: {len(dataset)} points, incumbent (canonical) = {incumbent_value:.3f}")

disc = DiscretizerConfig(kind=DiscretizerKind.UNIFORM, n_candidates=400)
candidates = uniform_candidates(disc, problem.dim, rng.child(1))
post = predict(model, candidates)

def show(name, scores, maximize=True):
    best = int(np.argmax(scores) if maximize else np.argmin(scores))
    u = candidates[best]
    x = problem.bounds.from_unit(u)
    print(f"  {name:7s} -> candidate {best:3d} at x = ({x[0]:6.2f}, {x[1]:6.2f})"
          f"   mean={post.mean[best]:8.3f} std={post.std[best]:6.3f}")

print("\nsequential (one point per iteration):")
show("PI", analytic.pi_score(post.mean, post.std, incumbent_value))
show("EI", analytic.ei_score(post.mean, post.std, incumbent_value))
ucb = analytic.UcbSchedule(delta=0.1, cardinality=len(candidates))
show("UCB", analytic.ucb_score(post.mean, post.std, ucb, t=len(dataset)))
mv = analytic.sample_max_values(model, candidates, 10, rng.child(2))
show("MES", analytic.mes_score(post.mean, post.std, mv))

print("\nbatch of q=3 via greedy Monte-Carlo qEI:")
mc = monte_carlo.McConfig(n_mc=1024)
batch = monte_carlo.greedy_batch_select(
    model, candidates[:120], 3, monte_carlo.ImprovementKind.EI, mc, rng.child(3)
)
for i, u in enumerate(batch):
    x = problem.bounds.from_unit(u)
    print(f"  member {i}: x = ({x[0]:6.2f}, {x[1]:6.2f})")

print("\nknowledge gradient on a 30-candidate pool:")
pool = candidates[:30]
kg = [monte_carlo.kg_score(model, c, pool, mc, rng.child(4)) for c in pool]
show("KG", np.array(kg))

print("\nweighted score (low = good) across one weight cycle:")
scored = geometric.score_candidates(model, candidates, dataset)
cycle = geometric.WeightCycle()
for _ in range(4):
    w = geometric.weighted_score(scored, cycle)
    show(f"w_r={cycle.w_r:.2f}", w, maximize=False)
    cycle.advance()
