"""End-to-end acceptance checks.

Each test prints one PASS/FAIL line (visible under ``pytest -s``) and asserts
the same condition.  The oracle-style checks re-derive every expected value
independently inside the test; the benchmark-scale checks reproduce the
qualitative strategy orderings at desk scale (10 replications).
"""

import math

import numpy as np
import pytest
from scipy.special import ndtr

from adasamp import surrogate
from adasamp.acquisition.analytic import UcbSchedule, ei_score, pi_score, ucb_score
from adasamp.acquisition.geometric import ScoredCandidate, pareto_front
from adasamp.acquisition.monte_carlo import (
    ImprovementKind,
    McConfig,
    kg_score,
    q_improvement_score,
)
from adasamp.core import Dataset, RngStream
from adasamp.discretize import DiscretizerConfig, DiscretizerKind
from adasamp.harness import ExperimentConfig, run_grid, run_single, write_reports
from adasamp.problems import synthetic_problem
from adasamp.surrogate import KernelConfig, fit, predict

pytestmark = pytest.mark.acceptance

GRID_SEED = 2026
GRID_REPS = 10


def _criterion(number: int, name: str, passed: bool, detail: str = ""):
    print(f"\nACCEPTANCE {number:>2} {name}: {'PASS' if passed else 'FAIL'}  {detail}")
    assert passed, f"criterion {number} ({name}): {detail}"


# --------------------------------------------------------------------------
# shared desk-scale benchmark grid (criteria 6 and 7)
# --------------------------------------------------------------------------

@pytest.fixture(scope="module")
def rastrigin6_finals():
    problem = synthetic_problem("rastrigin", 6)

    def cell(acq, kind):
        return ExperimentConfig(
            problem=problem,
            acquisition=acq,
            budget=400,
            batch_q=4,
            discretizer=DiscretizerConfig(kind=kind, n_candidates=1000),
            n_init=14,
            replications=GRID_REPS,
            base_seed=GRID_SEED,
        )

    uniform = DiscretizerKind.UNIFORM
    dynamic = DiscretizerKind.DYNAMIC_COORDINATE
    configs = {
        "EEPA+": cell("EEPA+", dynamic),
        "DYCORS": cell("DYCORS", dynamic),
        "sPI": cell("sPI", uniform),
        "sMES": cell("sMES", uniform),
        "random": cell("random", uniform),
        "Wscore-uniform": cell("Wscore", uniform),
        "sEI-uniform": cell("sEI", uniform),
        "sEI-dynamic": cell("sEI", dynamic),
    }
    records = run_grid(list(configs.values()), parallelism=2)
    finals: dict[str, list[float]] = {name: [] for name in configs}
    order = list(configs)
    for record in records:
        for name in order:
            config = configs[name]
            if (
                record.acquisition == config.acquisition
                and record.discretizer == config.discretizer.kind.value
            ):
                finals[name].append(record.final_value)
                break
    assert all(len(v) == GRID_REPS for v in finals.values())
    assert all(np.isfinite(v).all() for v in finals.values())
    return {k: np.asarray(v) for k, v in finals.items()}


# --------------------------------------------------------------------------
# 1. GP correctness
# --------------------------------------------------------------------------

def test_01_gp_posterior_correctness():
    gen = np.random.default_rng(11)
    worst_interp, worst_var = 0.0, 0.0
    for _ in range(100):
        dim = int(gen.choice([2, 6]))
        n = int(gen.integers(5, 51))
        points = gen.random((n, dim))
        values = gen.standard_normal(n) * float(gen.choice([1.0, 10.0, 100.0]))
        cfg = KernelConfig.from_initial_design(values)
        post = predict(fit(Dataset(points, values), cfg), points)
        worst_interp = max(
            worst_interp,
            float(np.max(np.abs(post.mean - values))) / (1.0 + float(np.max(np.abs(values)))),
        )
        worst_var = max(worst_var, float(np.max(post.variance)))
    ok = worst_interp <= 1e-6 and worst_var <= 1e-6
    _criterion(1, "GP interpolation and variance", ok,
               f"max rel mean error {worst_interp:.3g}, max train variance {worst_var:.3g}")


# --------------------------------------------------------------------------
# 2. closed-form acquisition oracles vs Monte Carlo
# --------------------------------------------------------------------------

def test_02_closed_form_matches_monte_carlo():
    gen = np.random.default_rng(22)
    n = 1_000_000
    worst_z_ei, worst_z_pi = 0.0, 0.0
    for _ in range(50):
        mean = float(gen.uniform(-2, 2))
        std = float(gen.uniform(0.05, 3.0))
        inc = float(gen.uniform(-2, 2))
        draws = gen.normal(mean, std, n)
        improvements = np.maximum(draws - inc, 0.0)
        se_ei = float(improvements.std()) / math.sqrt(n) + 1e-10
        z_ei = abs(float(ei_score(mean, std, inc)) - float(improvements.mean())) / (3 * se_ei + 1e-7)
        p_hat = float((draws > inc).mean())
        se_pi = math.sqrt(max(p_hat * (1 - p_hat), 0.0) / n) + 1e-10
        z_pi = abs(float(pi_score(mean, std, inc)) - p_hat) / (3 * se_pi + 2.0 / n)
        worst_z_ei, worst_z_pi = max(worst_z_ei, z_ei), max(worst_z_pi, z_pi)

    worst_z_qei = 0.0
    n_mc = 2**16
    for trial in range(50):
        state = np.random.default_rng(1000 + trial)
        n_train = int(state.integers(4, 12))
        points = state.random((n_train, 2))
        values = state.standard_normal(n_train)
        cfg = KernelConfig.from_initial_design(values)
        model = fit(Dataset(points, values), cfg)
        query = state.random((1, 2))
        post = predict(model, query)
        inc = model.incumbent_value
        got = q_improvement_score(
            model, query, inc, ImprovementKind.EI, McConfig(n_mc=n_mc), RngStream(trial)
        )
        want = float(ei_score(post.mean[0], post.std[0], inc))
        oracle = np.maximum(state.normal(post.mean[0], post.std[0], 200_000) - inc, 0.0)
        se = float(oracle.std()) / math.sqrt(n_mc) + 1e-10
        # Beyond ~4 sigma the estimator sees at most a handful of improving
        # draws, so the z-test regime breaks down; the floor is the resolution
        # of a mean built from a few lumpy contributions of size O(std/n).
        resolution = 16.0 * float(post.std[0]) / n_mc
        worst_z_qei = max(worst_z_qei, abs(got - want) / (3 * se + resolution))

    ok = worst_z_ei <= 1.0 and worst_z_pi <= 1.0 and worst_z_qei <= 1.0
    _criterion(2, "EI/PI/qEI closed forms vs MC", ok,
               f"worst |err|/(3 SE): EI {worst_z_ei:.2f}, PI {worst_z_pi:.2f}, qEI {worst_z_qei:.2f}")


# --------------------------------------------------------------------------
# 3. Pareto front vs brute-force domination oracle
# --------------------------------------------------------------------------

def _brute_force_front(f_hat: np.ndarray, delta: np.ndarray) -> list[int]:
    n = len(f_hat)
    better_eq = (f_hat[:, None] <= f_hat[None, :]) & (delta[:, None] >= delta[None, :])
    strict = (f_hat[:, None] < f_hat[None, :]) | (delta[:, None] > delta[None, :])
    duplicate = (f_hat[:, None] == f_hat[None, :]) & (delta[:, None] == delta[None, :])
    earlier = np.arange(n)[:, None] < np.arange(n)[None, :]
    dominates = (better_eq & strict) | (duplicate & earlier)
    np.fill_diagonal(dominates, False)
    return [i for i in range(n) if not dominates[:, i].any()]


def test_03_pareto_front_matches_oracle():
    gen = np.random.default_rng(33)
    mismatches = 0
    for _ in range(1000):
        n = int(gen.integers(1, 501))
        if gen.random() < 0.5:  # integer grids provoke ties and duplicates
            f_hat = gen.integers(0, 12, n).astype(float)
            delta = gen.integers(0, 12, n).astype(float)
        else:
            f_hat = gen.standard_normal(n)
            delta = gen.random(n)
        cands = [ScoredCandidate(np.array([0.0]), float(f), float(d)) for f, d in zip(f_hat, delta)]
        if list(pareto_front(cands).indices) != _brute_force_front(f_hat, delta):
            mismatches += 1
    _criterion(3, "Pareto front vs O(n^2) oracle", mismatches == 0,
               f"{mismatches}/1000 mismatching instances")


# --------------------------------------------------------------------------
# 4. knowledge-gradient sanity
# --------------------------------------------------------------------------

def test_04_kg_sanity():
    worst_floor, worst_at_data = -np.inf, 0.0
    ok = True
    for trial in range(50):
        gen = np.random.default_rng(4000 + trial)
        n = int(gen.integers(4, 10))
        points = gen.random((n, 2))
        values = gen.standard_normal(n)
        model = fit(Dataset(points, values), KernelConfig.from_initial_design(values))
        pool = np.vstack([gen.random((15, 2)), points])
        cfg = McConfig(n_fantasy=64)
        free_scores = [
            kg_score(model, gen.random(2), pool, cfg, RngStream(trial, k)) for k in range(3)
        ]
        worst_floor = max(worst_floor, -min(free_scores))
        ok &= all(s >= -1e-9 for s in free_scores)
        # at an already-evaluated point the fantasy spread is ~zero, so the
        # MC standard error is ~zero and the score must be numerically zero
        evaluated = points[int(gen.integers(0, n))]
        post = predict(model, evaluated[None, :])
        se = float(post.std[0]) / math.sqrt(cfg.n_fantasy)
        score = kg_score(model, evaluated, pool, cfg, RngStream(trial, 9))
        worst_at_data = max(worst_at_data, abs(score))
        ok &= abs(score) <= 3 * se + 1e-7
    _criterion(4, "KG non-negative and zero at data", ok,
               f"min score {-worst_floor:.2g}, worst |KG| at evaluated point {worst_at_data:.2g}")


# --------------------------------------------------------------------------
# 5. UCB beta schedule
# --------------------------------------------------------------------------

def test_05_ucb_beta_schedule():
    # Independent recomputation of the schedule at |X|=1000, t=1, delta=0.1.
    expected = 2.0 * math.log(1000 * 1**2 * math.pi**2 / (6 * 0.1))
    schedule = UcbSchedule(delta=0.1, cardinality=1000)
    beta = schedule.beta(1)
    score_gap = float(ucb_score(0.0, 1.0, schedule, t=1))
    ok = abs(beta - expected) <= 1e-3 and abs(score_gap - math.sqrt(expected)) <= 1e-6
    _criterion(5, "UCB beta schedule", ok,
               f"beta={beta:.6f}, recomputed={expected:.6f} (sqrt={math.sqrt(expected):.4f})")


# --------------------------------------------------------------------------
# 6. qualitative reproduction: distance-based beats variance-based (d=6)
# --------------------------------------------------------------------------

def test_06_rastrigin6_strategy_ordering(rastrigin6_finals):
    med = {k: float(np.median(v)) for k, v in rastrigin6_finals.items()}
    random_bar = 0.8 * med["random"]
    ok = True
    for name in ("EEPA+", "DYCORS"):
        ok &= med[name] < med["sPI"]
        ok &= med[name] < med["sMES"]
        ok &= med[name] <= random_bar
    detail = ", ".join(
        f"{k}={med[k]:.2f}" for k in ("EEPA+", "DYCORS", "sPI", "sMES", "random")
    )
    _criterion(6, "EEPA+/DYCORS beat sPI/sMES/random on Rastrigin d=6", ok, detail)


# --------------------------------------------------------------------------
# 7. qualitative reproduction: discretization sensitivity
# --------------------------------------------------------------------------

def test_07_discretization_sensitivity(rastrigin6_finals):
    med = {k: float(np.median(v)) for k, v in rastrigin6_finals.items()}
    wscore_gap = med["Wscore-uniform"] - med["DYCORS"]  # DYCORS = Wscore + dynamic
    ei_gap = abs(med["sEI-uniform"] - med["sEI-dynamic"])
    ok = med["DYCORS"] < med["Wscore-uniform"] and ei_gap < wscore_gap
    _criterion(
        7, "dynamic discretization matters more for Wscore than EI", ok,
        f"Wscore uni={med['Wscore-uniform']:.2f} dyn={med['DYCORS']:.2f} (gap {wscore_gap:.2f}); "
        f"sEI uni={med['sEI-uniform']:.2f} dyn={med['sEI-dynamic']:.2f} (gap {ei_gap:.2f})",
    )


# --------------------------------------------------------------------------
# 8. budget ledger with batch carry-over
# --------------------------------------------------------------------------

def test_08_budget_ledger_exact():
    # Tiny candidate sets force Pareto fronts smaller than the batch, so some
    # iterations return short batches and the saved budget is spent later.
    config = ExperimentConfig(
        problem=synthetic_problem("rastrigin", 2),
        acquisition="EEPA+",
        budget=30,
        batch_q=4,
        discretizer=DiscretizerConfig(kind=DiscretizerKind.DYNAMIC_COORDINATE, n_candidates=3),
        n_init=6,
        base_seed=88,
    )
    record = run_single(config, 0)
    counts = [row[0] for row in record.rows]
    increments = [b - a for a, b in zip(counts, counts[1:])]
    ok = (
        not record.failed
        and counts[-1] == 30
        and any(k < 4 for k in increments)
        and all(1 <= k <= 4 for k in increments)
    )
    _criterion(8, "evaluation ledger equals budget exactly", ok,
               f"total={counts[-1]}, batch sizes {sorted(set(increments))}")


# --------------------------------------------------------------------------
# 9. determinism of report rows
# --------------------------------------------------------------------------

def test_09_deterministic_convergence_rows(tmp_path):
    def one(out):
        config = ExperimentConfig(
            problem=synthetic_problem("levy", 2),
            acquisition="DYCORS",
            budget=30,
            batch_q=4,
            discretizer=DiscretizerConfig(kind=DiscretizerKind.DYNAMIC_COORDINATE, n_candidates=80),
            n_init=6,
            replications=2,
            base_seed=99,
        )
        records = run_grid([config])
        write_reports(records, out)
        return (out / "convergence.csv").read_bytes()

    first = one(tmp_path / "a")
    second = one(tmp_path / "b")
    _criterion(9, "byte-identical convergence rows on replay", first == second,
               f"{len(first)} bytes compared")


# --------------------------------------------------------------------------
# 10. high-dimensional smoke run
# --------------------------------------------------------------------------

def test_10_rastrigin30_smoke():
    config = ExperimentConfig(
        problem=synthetic_problem("rastrigin", 30),
        acquisition="EEPA+",
        budget=500,
        batch_q=4,
        discretizer=DiscretizerConfig(kind=DiscretizerKind.DYNAMIC_COORDINATE, n_candidates=5000),
        n_init=62,
        replications=3,
        base_seed=GRID_SEED,
    )
    records = run_grid([config], parallelism=2)
    improvements = []
    ok = True
    for record in records:
        ok &= not record.failed
        init_best = record.rows[0][1]
        final_best = record.final_value
        improvements.append(1.0 - final_best / init_best)
        ok &= final_best <= 0.5 * init_best
    _criterion(10, "Rastrigin d=30 smoke run", ok,
               "improvements " + ", ".join(f"{imp:.1%}" for imp in improvements))
