"""Fit the fixed-hyperparameter GP surrogate and poke at its posterior.

Walks the core modeling loop on a 1-d slice of the Levy function: evaluate a
handful of points, fit, then look at interpolation, uncertainty growth away
from the data, and joint posterior samples.

Run:  python demos/01_surrogate_basics.py
"""

import numpy as np

from adasamp import Dataset, KernelConfig, RngStream, canonicalize
from adasamp.problems import synthetic_problem
from adasamp.surrogate import fit, predict, sample_joint

problem = synthetic_problem("levy", 1)
rng = RngStream(seed=7)

# Evaluate 6 points spread over the box. Values are stored in canonical
# maximization form, so this minimization problem is negated once here.
train_u = np.linspace(0.05, 0.95, 6)[:, None]
train_f = np.array(
    [canonicalize(problem.evaluate(problem.bounds.from_unit(u)), problem.sense) for u in train_u]
)
dataset = Dataset(train_u, train_f)

cfg = KernelConfig.from_initial_design(train_f)
model = fit(dataset, cfg)
print(f"fitted GP on {len(dataset)} points "
      f"(output_scale={cfg.output_scale:.3f}, mean_const={cfg.mean_const:.3f}, jitter={model.jitter:.2e})")

# The posterior interpolates the data and reverts to the prior far away.
post = predict(model, train_u)
print(f"max interpolation error at training points: {np.max(np.abs(post.mean - train_f)):.2e}")
print(f"max predictive std at training points:      {np.max(post.std):.2e}")

grid = np.linspace(0, 1, 9)[:, None]
post = predict(model, grid)
print("\n  u      mean(canonical)  std")
for u, m, s in zip(grid.ravel(), post.mean, post.std):
    print(f"  {u:.3f}  {m:15.4f}  {s:.4f}")

# Joint samples respect the posterior correlation structure: nearby inputs
# move together, and the spread at each point matches the marginal std.
samples = sample_joint(model, grid, n_samples=2000, rng=rng)
print("\nempirical std of 2000 joint samples vs predicted std:")
print("  empirical:", np.round(samples.std(axis=0), 4))
print("  predicted:", np.round(post.std, 4))
