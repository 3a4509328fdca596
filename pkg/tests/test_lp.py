import numpy as np
import pytest

from roguewk import LpInstance, solve, solve_by_vertex_enumeration
from roguewk.lp import LpError


def random_instance(rng, max_m=5, max_d=4):
    m = int(rng.integers(1, max_m + 1))
    d = int(rng.integers(1, max_d + 1))
    return LpInstance(
        objective=rng.uniform(-0.5, 1.0, m),
        costs=rng.uniform(-0.5, 1.0, (m, d)),
        rate=float(rng.uniform(0.05, 1.0)),
    )


def assert_feasible(inst, sol, tol=1e-9):
    assert np.all(sol.pi >= -tol)
    assert sol.pi.sum() + sol.null_mass == pytest.approx(1.0, abs=1e-9)
    assert np.all(inst.costs.T @ sol.pi <= inst.rate + tol)
    assert sol.value == pytest.approx(float(inst.objective @ sol.pi), abs=1e-9)


class TestWorkedExamples:
    def test_budget_limited_fractional_pull(self):
        inst = LpInstance(np.array([0.8]), np.array([[0.4]]), 0.2)
        for solver in (solve, solve_by_vertex_enumeration):
            sol = solver(inst)
            assert sol.pi[0] == pytest.approx(0.5, abs=1e-9)
            assert sol.null_mass == pytest.approx(0.5, abs=1e-9)
            assert sol.value == pytest.approx(0.4, abs=1e-9)

    def test_two_arm_vertex_pin(self):
        inst = LpInstance(np.array([0.5, 0.7]), np.array([[0.2], [0.9]]), 0.5)
        for solver in (solve, solve_by_vertex_enumeration):
            sol = solver(inst)
            assert sol.value == pytest.approx(41.0 / 70.0, abs=1e-9)
            assert sol.pi == pytest.approx([4.0 / 7.0, 3.0 / 7.0], abs=1e-9)

    def test_free_arms_concentrate_on_best(self):
        inst = LpInstance(np.array([0.3, 0.9, 0.5]), np.zeros((3, 2)), 0.4)
        for solver in (solve, solve_by_vertex_enumeration):
            sol = solver(inst)
            assert sol.pi == pytest.approx([0.0, 1.0, 0.0], abs=1e-9)


def test_solvers_agree_on_random_instances():
    rng = np.random.default_rng(100)
    for _ in range(200):
        inst = random_instance(rng)
        a = solve(inst)
        b = solve_by_vertex_enumeration(inst)
        assert abs(a.value - b.value) <= 1e-9
        assert_feasible(inst, a)
        assert_feasible(inst, b)


def test_objective_scaling_preserves_solution():
    rng = np.random.default_rng(101)
    for _ in range(40):
        inst = random_instance(rng)
        lam = float(rng.uniform(0.1, 5.0))
        scaled = LpInstance(lam * inst.objective, inst.costs, inst.rate)
        base = solve(inst)
        up = solve(scaled)
        assert up.value == pytest.approx(lam * base.value, rel=1e-10, abs=1e-10)
        # the scaled optimum is feasible and optimal for the original
        assert np.all(inst.costs.T @ up.pi <= inst.rate + 1e-9)
        assert float(inst.objective @ up.pi) == pytest.approx(base.value, abs=1e-9)


def test_value_monotone_in_rate():
    rng = np.random.default_rng(102)
    for _ in range(40):
        inst = random_instance(rng)
        values = [solve(LpInstance(inst.objective, inst.costs, r)).value
                  for r in (0.05, 0.2, 0.5, 1.0)]
        assert np.all(np.diff(values) >= -1e-10)


def test_duplicated_arms_leave_value_unchanged():
    rng = np.random.default_rng(103)
    for _ in range(25):
        inst = random_instance(rng, max_m=3)
        dup = LpInstance(
            np.concatenate([inst.objective, inst.objective[:1]]),
            np.vstack([inst.costs, inst.costs[:1]]),
            inst.rate,
        )
        assert solve(dup).value == pytest.approx(solve(inst).value, abs=1e-9)
        assert solve_by_vertex_enumeration(dup).value == pytest.approx(
            solve_by_vertex_enumeration(inst).value, abs=1e-9)


def test_vertex_solution_dominates_random_feasible_points():
    rng = np.random.default_rng(104)
    inst = LpInstance(rng.uniform(-0.5, 1, 4), rng.uniform(-0.5, 1, (4, 3)),
                      float(rng.uniform(0.1, 0.8)))
    best = solve_by_vertex_enumeration(inst)
    # uniform samples over the relaxed simplex, filtered for budget feasibility
    points = rng.dirichlet(np.ones(5), size=100_000)[:, :4]
    feasible = points[np.all(points @ inst.costs <= inst.rate + 1e-12, axis=1)]
    assert feasible.size > 0
    values = feasible @ inst.objective
    assert best.value >= values.max() - 1e-9


def test_tie_break_is_lexicographic_and_deterministic():
    inst = LpInstance(np.array([0.5, 0.5]), np.array([[0.1], [0.1]]), 0.5)
    a = solve(inst)
    b = solve_by_vertex_enumeration(inst)
    assert a.pi == pytest.approx(b.pi, abs=1e-9)
    assert a.pi == pytest.approx([0.0, 1.0], abs=1e-9)
    again = solve(inst)
    assert np.array_equal(a.pi, again.pi)


def test_dimension_and_rate_guards():
    with pytest.raises(LpError):
        LpInstance(np.array([0.5]), np.array([[0.1]]), 0.0)
    with pytest.raises(LpError):
        solve_by_vertex_enumeration(
            LpInstance(np.ones(7), np.full((7, 1), 0.1), 0.5))
    with pytest.raises(LpError):
        LpInstance(np.array([np.inf]), np.array([[0.1]]), 0.5)
