import sys

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adasamp.core import EvaluationError, ObjectiveSense
from adasamp.problems import (
    external_objective,
    external_problem,
    levy,
    rastrigin,
    rosenbrock,
    synthetic_problem,
)


class TestRastrigin:
    def test_global_minimum(self):
        assert rastrigin(np.zeros(6)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value(self):
        # 1 - 10 cos(2 pi) + 10 = 1 for the first coordinate, zeros elsewhere
        assert rastrigin(np.array([1.0, 0, 0, 0, 0, 0])) == pytest.approx(1.0, abs=1e-9)

    @given(st.lists(st.floats(-5.12, 5.12), min_size=1, max_size=8))
    def test_even_function(self, xs):
        x = np.array(xs)
        assert rastrigin(x) == pytest.approx(rastrigin(-x), rel=1e-12, abs=1e-9)

    def test_nonnegative(self, gen):
        for _ in range(100):
            assert rastrigin(gen.uniform(-5.12, 5.12, 6)) >= 0.0


class TestRosenbrock:
    def test_global_minimum(self):
        assert rosenbrock(np.ones(6)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_values(self):
        assert rosenbrock(np.zeros(2)) == pytest.approx(1.0)
        assert rosenbrock(np.array([-1.0, 1.0])) == pytest.approx(4.0)

    def test_nonnegative(self, gen):
        for _ in range(100):
            assert rosenbrock(gen.uniform(-5, 10, 6)) >= 0.0


class TestLevy:
    def test_global_minimum(self):
        assert levy(np.ones(6)) == pytest.approx(0.0, abs=1e-12)

    def test_hand_value_1d(self):
        # w = 0.75: sin^2(0.75 pi) + 0.0625 (1 + sin^2(1.5 pi)) = 0.5 + 0.125
        assert levy(np.array([0.0])) == pytest.approx(0.625, abs=1e-12)

    def test_finite_and_nonnegative_sweep(self, gen):
        points = gen.uniform(-10, 10, size=(10_000, 4))
        values = np.array([levy(p) for p in points])
        assert np.all(np.isfinite(values)) and np.all(values >= 0.0)


class TestProblemSpecs:
    @pytest.mark.parametrize("name,optimum", [
        ("rastrigin", 0.0), ("rosenbrock", 0.0), ("levy", 0.0),
    ])
    def test_known_optimum_attained(self, name, optimum):
        spec = synthetic_problem(name, 6)
        point, value = spec.known_optimum
        assert value == optimum
        assert spec.evaluate(point) == pytest.approx(optimum, abs=1e-12)
        assert spec.sense is ObjectiveSense.MINIMIZE

    def test_domains(self):
        assert synthetic_problem("rastrigin", 3).bounds.lower[0] == -5.12
        assert synthetic_problem("rosenbrock", 3).bounds.upper[0] == 10.0
        assert synthetic_problem("levy", 3).bounds.lower[0] == -10.0

    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError):
            synthetic_problem("ackley", 3)

    def test_unit_mapping_roundtrip(self, gen):
        spec = synthetic_problem("rosenbrock", 5)
        u = gen.random(5)
        assert np.allclose(spec.bounds.to_unit(spec.bounds.from_unit(u)), u, atol=1e-15)


def _stub_problem(body: str, timeout: float = 5.0):
    return external_problem([sys.executable, "-c", body], dim=2, timeout=timeout)


class TestExternalObjective:
    def test_protocol_round_trip(self):
        spec = _stub_problem(
            "import sys; parts = sys.stdin.readline().split(); print(float(parts[0]) + float(parts[1]))"
        )
        got = external_objective(spec, np.array([0.25, 0.5]))
        assert got == pytest.approx(0.75)

    def test_constant_stub(self):
        spec = _stub_problem("input(); print('1.0')")
        assert external_objective(spec, np.array([0.1, 0.2])) == 1.0

    def test_nan_output_rejected(self):
        spec = _stub_problem("input(); print('nan')")
        with pytest.raises(EvaluationError, match="non-finite"):
            external_objective(spec, np.array([0.1, 0.2]))

    def test_garbage_output_rejected(self):
        spec = _stub_problem("input(); print('not-a-number')")
        with pytest.raises(EvaluationError, match="parse"):
            external_objective(spec, np.array([0.1, 0.2]))

    def test_nonzero_exit_rejected(self):
        spec = _stub_problem("import sys; input(); sys.exit(3)")
        with pytest.raises(EvaluationError, match="status 3"):
            external_objective(spec, np.array([0.1, 0.2]))

    def test_timeout_enforced(self):
        spec = _stub_problem("import time; input(); time.sleep(30); print(1.0)", timeout=0.5)
        with pytest.raises(EvaluationError, match="timed out"):
            external_objective(spec, np.array([0.1, 0.2]))

    def test_out_of_bounds_point_rejected(self):
        spec = _stub_problem("input(); print('1.0')")
        with pytest.raises(ValueError, match="outside"):
            external_objective(spec, np.array([1.5, 0.0]))
