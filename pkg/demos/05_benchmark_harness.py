"""Run a small strategy-comparison grid and write the CSV reports.

Three strategies race on Levy (d=2) under a shared budget; the harness runs
every (strategy x replication) cell, then the report writer emits
convergence traces, per-cell summaries, a rank table, and quantile bands
into ./demo-out. The same artifacts are produced by the command line:

    adasamp run --problem levy --dim 2 --acq EEPA+ --budget 60 --reps 5 --out demo-out

Run:  python demos/05_benchmark_harness.py
"""

from pathlib import Path

from adasamp import ExperimentConfig
from adasamp.harness import run_grid, save_records, write_reports
from adasamp.problems import synthetic_problem

problem = synthetic_problem("levy", 2)

def cell(acq):
    return ExperimentConfig(
        problem=problem,
        acquisition=acq,
        budget=60,
        batch_q=4,
        n_init=6,
        replications=5,
        base_seed=31415,
    )

records = run_grid([cell("EEPA+"), cell("sEI"), cell("random")], parallelism=2)

out = Path("demo-out")
save_records(records, out)
ranks = write_reports(records, out)

print(f"wrote {out}/records.jsonl plus convergence/summary/ranks/quantiles CSVs\n")
print("rank  strategy  mean final  variance")
for r in sorted(ranks, key=lambda r: r.rank):
    print(f"  {r.rank}   {r.acquisition:8s} {r.mean_final:9.4f}  {r.var_final:9.5f}")

failed = [r for r in records if r.failed]
print(f"\n{len(records) - len(failed)}/{len(records)} replications succeeded")
