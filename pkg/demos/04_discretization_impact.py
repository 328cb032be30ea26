"""Mini study: how the candidate-generation scheme changes strategy quality.

A scaled-down version of the discretization experiment: the weighted-score
strategy and sequential EI each run with uniform versus dynamic candidate
sets on Rastrigin (d=4, budget 120, 5 replications). Expect the weighted
score to improve sharply under dynamic perturbation (that combination is the
DYCORS recipe) while EI moves much less.

Runs in a couple of minutes:  python demos/04_discretization_impact.py
"""

import numpy as np

from adasamp import ExperimentConfig
from adasamp.discretize import DiscretizerConfig, DiscretizerKind
from adasamp.harness import run_grid
from adasamp.problems import synthetic_problem

problem = synthetic_problem("rastrigin", 4)

def cell(acq, kind):
    return ExperimentConfig(
        problem=problem,
        acquisition=acq,
        budget=120,
        batch_q=4,
        discretizer=DiscretizerConfig(kind=kind, n_candidates=400),
        n_init=10,
        replications=5,
        base_seed=2024,
    )

cells = {
    ("Wscore", "uniform"): cell("Wscore", DiscretizerKind.UNIFORM),
    ("Wscore", "dynamic"): cell("Wscore", DiscretizerKind.DYNAMIC_COORDINATE),
    ("sEI", "uniform"): cell("sEI", DiscretizerKind.UNIFORM),
    ("sEI", "dynamic"): cell("sEI", DiscretizerKind.DYNAMIC_COORDINATE),
}

records = run_grid(list(cells.values()), parallelism=2)

medians = {}
for (acq, disc) in cells:
    finals = [
        r.final_value for r in records if r.acquisition == acq and r.discretizer == disc
    ]
    medians[(acq, disc)] = float(np.median(finals))
    print(f"{acq:6s} + {disc:8s}: median final = {medians[(acq, disc)]:7.2f}   reps = {np.round(sorted(finals), 1)}")

wscore_gap = medians[("Wscore", "uniform")] - medians[("Wscore", "dynamic")]
ei_gap = medians[("sEI", "uniform")] - medians[("sEI", "dynamic")]
print(f"\nweighted-score gain from dynamic candidates: {wscore_gap:+.2f}")
print(f"sequential-EI gain from dynamic candidates:  {ei_gap:+.2f}")
print("(five replications are noisy; at d=6 / budget 400 / 10 reps the weighted-score")
print(" gap is an order of magnitude larger than EI's)")
