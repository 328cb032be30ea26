import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from adasamp.core import (
    Bounds,
    BudgetError,
    BudgetState,
    Dataset,
    ObjectiveSense,
    RngStream,
    append_evaluations,
    canonicalize,
    decanonicalize,
    incumbent,
)
from conftest import make_dataset

MIN, MAX = ObjectiveSense.MINIMIZE, ObjectiveSense.MAXIMIZE

finite_floats = st.floats(allow_nan=False, allow_infinity=False, width=64)


class TestCanonicalize:
    def test_minimize_flips_sign(self):
        assert canonicalize(3.5, MIN) == -3.5

    def test_maximize_is_identity(self):
        assert canonicalize(3.5, MAX) == 3.5

    def test_zero_fixed_point(self):
        assert canonicalize(0.0, MIN) == 0.0

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -float("inf")])
    def test_rejects_non_finite(self, bad):
        with pytest.raises(ValueError):
            canonicalize(bad, MIN)

    @given(finite_floats)
    def test_involution(self, v):
        assert canonicalize(canonicalize(v, MIN), MIN) == v

    @given(finite_floats, st.sampled_from([MIN, MAX]))
    def test_decanonicalize_roundtrip(self, v, sense):
        assert decanonicalize(canonicalize(v, sense), sense) == v


class TestIncumbent:
    def test_first_max_tie_break(self):
        ds = make_dataset([[0.1], [0.2], [0.3], [0.4]], [1, 5, 5, 2])
        point, value = incumbent(ds)
        assert value == 5 and point[0] == 0.2

    def test_singleton(self):
        ds = make_dataset([[0.5, 0.5]], [7.0])
        point, value = incumbent(ds)
        assert value == 7.0 and np.allclose(point, [0.5, 0.5])

    def test_degenerate_tie_picks_index_zero(self):
        ds = make_dataset([[0.1], [0.2], [0.3]], [4, 4, 4])
        point, _ = incumbent(ds)
        assert point[0] == 0.1

    def test_empty_dataset_errors(self):
        with pytest.raises(ValueError):
            incumbent(Dataset())


class TestAppendEvaluations:
    def test_grows_archive(self, gen):
        ds = make_dataset(gen.random((14, 3)), gen.standard_normal(14))
        batch = [(gen.random(3), float(v)) for v in gen.standard_normal(4)]
        grown = append_evaluations(ds, batch)
        assert len(grown) == 18
        assert len(ds) == 14  # the input dataset is untouched

    def test_duplicate_skipped_with_warning_but_budget_consumed(self):
        ds = make_dataset([[0.25, 0.25]], [1.0])
        budget = BudgetState(total=10, remaining=5, batch_size=2)
        with pytest.warns(UserWarning, match="duplicate"):
            grown = append_evaluations(ds, [(np.array([0.25, 0.25]), 1.0)], budget)
        assert len(grown) == 1
        assert budget.remaining == 4

    def test_exhausted_budget_errors(self):
        ds = make_dataset([[0.5]], [0.0])
        budget = BudgetState(total=1, remaining=0, batch_size=1)
        with pytest.raises(BudgetError):
            append_evaluations(ds, [(np.array([0.1]), 2.0)], budget)

    def test_out_of_bounds_point_errors(self):
        with pytest.raises(ValueError):
            append_evaluations(Dataset(), [(np.array([1.5, 0.5]), 0.0)])

    def test_non_finite_value_errors(self):
        with pytest.raises(ValueError):
            append_evaluations(Dataset(), [(np.array([0.5]), float("nan"))])


class TestBounds:
    def test_validation(self):
        with pytest.raises(ValueError):
            Bounds(np.array([0.0, 1.0]), np.array([1.0, 1.0]))

    @given(st.integers(1, 6), st.data())
    def test_unit_roundtrip(self, dim, data):
        lo = data.draw(st.lists(st.floats(-100, 99), min_size=dim, max_size=dim))
        width = data.draw(st.lists(st.floats(0.1, 50), min_size=dim, max_size=dim))
        bounds = Bounds(np.array(lo), np.array(lo) + np.array(width))
        u = np.array(data.draw(st.lists(st.floats(0, 1), min_size=dim, max_size=dim)))
        back = bounds.to_unit(bounds.from_unit(u))
        assert np.allclose(back, u, atol=1e-12)

    def test_cube(self):
        b = Bounds.cube(-5.12, 5.12, 6)
        assert b.dim == 6
        assert np.allclose(b.from_unit(np.full(6, 0.5)), np.zeros(6))


class TestRngStream:
    def test_identical_streams_replay(self):
        a = RngStream(42, 3).generator().random(8)
        b = RngStream(42, 3).generator().random(8)
        assert np.array_equal(a, b)

    def test_distinct_stream_ids_differ(self):
        a = RngStream(42, 0).generator().random(8)
        b = RngStream(42, 1).generator().random(8)
        assert not np.array_equal(a, b)

    def test_children_are_independent_and_reproducible(self):
        parent = RngStream(7)
        a1 = parent.child(5).generator().random(4)
        a2 = parent.child(5).generator().random(4)
        b = parent.child(6).generator().random(4)
        assert np.array_equal(a1, a2)
        assert not np.array_equal(a1, b)


class TestBudgetState:
    def test_spend_tracks_remaining(self):
        budget = BudgetState(total=10, remaining=10, batch_size=4)
        budget.spend(4)
        assert budget.remaining == 6 and budget.spent == 4

    def test_overspend_rejected(self):
        budget = BudgetState(total=3, remaining=2, batch_size=4)
        with pytest.raises(BudgetError):
            budget.spend(3)

    def test_invalid_state_rejected(self):
        with pytest.raises(ValueError):
            BudgetState(total=3, remaining=4, batch_size=1)
