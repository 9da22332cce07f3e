"""Water-filling allocator: exact cases, KKT invariants, and the grid oracle."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attnalloc import (
    AllocationProblem,
    InfeasibleError,
    allocate_uniform,
    allocate_weighted,
    brute_force_allocate,
)
from attnalloc.allocate import (
    SearchSpaceError,
    allocation_summary,
    objective_value,
    save_allocation,
)


def test_equal_weights_split_evenly():
    result = allocate_weighted(AllocationProblem(np.ones(3), 60.0, 15.0))
    assert np.allclose(result.capacities, [20.0, 20.0, 20.0])


def test_floor_clamp_two_objects():
    # unconstrained split (32, 8) violates the 15 K floor; the light object
    # clamps and the heavy one takes the remainder
    result = allocate_weighted(AllocationProblem(np.array([4.0, 1.0]), 40.0, 15.0))
    assert np.allclose(result.capacities, [25.0, 15.0])


def test_symmetric_default_budget():
    n = 56
    result = allocate_weighted(AllocationProblem(np.full(n, 2.5), n * 20.0, 15.0))
    assert np.allclose(result.capacities, np.full(n, 20.0))


def test_uniform_baseline():
    result = allocate_uniform(3, 60.0, 15.0)
    assert np.allclose(result.capacities, [20.0, 20.0, 20.0])
    assert result.objective is None
    assert allocate_uniform(1, 37.5, 15.0).capacities[0] == 37.5


def test_infeasible_budget_names_deficit():
    with pytest.raises(InfeasibleError, match="deficit"):
        AllocationProblem(np.ones(4), 50.0, 15.0)
    with pytest.raises(InfeasibleError):
        allocate_uniform(4, 50.0, 15.0)


def test_floor_must_exceed_one():
    with pytest.raises(ValueError):
        AllocationProblem(np.ones(2), 10.0, 1.0)


def test_zero_weight_gets_exactly_floor():
    result = allocate_weighted(AllocationProblem(np.array([3.0, 0.0]), 60.0, 15.0))
    assert result.capacities[1] == 15.0
    assert result.capacities[0] == pytest.approx(45.0)


def test_budget_exhausted_at_tight_feasibility():
    result = allocate_weighted(AllocationProblem(np.array([5.0, 1.0]), 30.0, 15.0))
    assert np.allclose(result.capacities, [15.0, 15.0])
    assert result.lagrange_multiplier is None


def test_large_budget_limit_proportional():
    w = np.array([1.0, 2.0, 5.0])
    result = allocate_weighted(AllocationProblem(w, 1e6, 15.0))
    assert np.allclose(result.capacities / 1e6, w / w.sum(), atol=1e-3)


def test_brute_force_matches_known_answer():
    result = brute_force_allocate(AllocationProblem(np.array([4.0, 1.0]), 40.0, 15.0), 0.01)
    assert np.allclose(result.capacities, [25.0, 15.0], atol=1e-9)


def test_brute_force_single_object():
    result = brute_force_allocate(AllocationProblem(np.array([2.0]), 33.0, 15.0), 0.01)
    assert result.capacities[0] == 33.0


def test_brute_force_rejects_large_searches():
    with pytest.raises(SearchSpaceError):
        brute_force_allocate(AllocationProblem(np.ones(5), 100.0, 15.0), 0.01)
    with pytest.raises(SearchSpaceError):
        brute_force_allocate(AllocationProblem(np.ones(3), 1e5, 15.0), 0.01)


def test_objective_value_ignores_zero_weights():
    assert objective_value([0.0, 2.0], [15.0, np.e ** 2]) == pytest.approx(4.0)
    assert objective_value([0.0], [123.0]) == 0.0


@given(
    weights=st.lists(st.floats(0.05, 10.0), min_size=1, max_size=24),
    slack=st.floats(0.0, 500.0),
    floor=st.floats(2.0, 30.0),
)
@settings(max_examples=200, deadline=None)
def test_solver_invariants(weights, slack, floor):
    w = np.array(weights)
    n = w.size
    problem = AllocationProblem(w, n * floor + slack, floor)
    result = allocate_weighted(problem)
    c = result.capacities

    assert abs(c.sum() - problem.budget) <= 1e-9 * max(1.0, problem.budget)
    assert c.min() >= floor - 1e-12

    order = np.argsort(w, kind="stable")
    assert (np.diff(c[order]) >= -1e-9).all()

    uniform = allocate_uniform(n, problem.budget, floor)
    assert objective_value(w, c) >= objective_value(w, uniform.capacities) - 1e-9


@given(
    weights=st.lists(st.floats(0.05, 10.0), min_size=2, max_size=16),
    scale=st.sampled_from([1e-3, 1e3, 7.25]),
)
@settings(max_examples=100, deadline=None)
def test_scale_invariance_exact(weights, scale):
    w = np.array(weights)
    budget = w.size * 22.0
    base = allocate_weighted(AllocationProblem(w, budget, 15.0))
    scaled = allocate_weighted(AllocationProblem(w * scale, budget, 15.0))
    assert np.array_equal(base.capacities, scaled.capacities)


def test_summary_and_csv(tmp_path):
    problem = AllocationProblem(np.array([4.0, 1.0]), 40.0, 15.0)
    result = allocate_weighted(problem)
    summary = allocation_summary(problem, result)
    assert summary["budget_relative_error"] <= 1e-9
    assert summary["min_capacity_k"] >= 15.0

    path = tmp_path / "alloc.csv"
    save_allocation(problem.weights, result, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "object_id,weight,capacity_k"
    assert len(lines) == 3
    assert lines[1].startswith("0,4.0,25.0")
