"""Oracle tests: grid search, coordinate ascent, and solution comparison."""

from __future__ import annotations

import math

import numpy as np
import pytest

from opsched import (
    OracleConfig,
    ProblemInstance,
    Schedule,
    UnsupportedSizeError,
    UtilityFunction,
    check_feasibility,
    compare,
    coordinate_ascent,
    grid_oracle,
    solution_from_schedule,
    solve,
)
from opsched.oracle import GRID_FEASIBILITY_TOL

from conftest import sample_instance

LOG1P = UtilityFunction(family="log_one_plus")


class TestGridOracle:
    def test_single_task_full_work(self):
        # T=2 from x0=0.6 never reaches x_max, so working the whole horizon
        # is feasible and optimal by monotonicity
        instance = ProblemInstance(
            n=1, t_horizon=2.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        solution = grid_oracle(instance)
        assert solution.schedule.rests[0] == pytest.approx(0.0, abs=1e-9)
        assert solution.schedule.works[0] == pytest.approx(2.0, abs=1e-9)
        assert solution.objective == pytest.approx(math.log(3.0), abs=1e-9)

    def test_degenerate_tiny_horizon(self):
        instance = ProblemInstance(
            n=1, t_horizon=1e-9, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        solution = grid_oracle(instance)
        assert solution.objective == pytest.approx(0.0, abs=1e-8)

    def test_matches_solver_on_two_task_instances(self):
        rng = np.random.default_rng(5)
        for index in range(6):
            instance = sample_instance(rng, (2,), index, families=("log_one_plus",))
            solver = solve(instance)
            oracle = grid_oracle(
                instance,
                OracleConfig(grid_step=instance.t_horizon / 60.0, refinement_rounds=6),
            )
            assert abs(solver.objective - oracle.objective) <= 1e-3
            assert solver.objective >= oracle.objective - 1e-3

    def test_never_returns_infeasible(self):
        rng = np.random.default_rng(17)
        for index in range(5):
            instance = sample_instance(rng, (1, 2), index)
            solution = grid_oracle(instance, OracleConfig(refinement_rounds=2))
            report = check_feasibility(instance, solution.schedule, GRID_FEASIBILITY_TOL)
            assert report.feasible

    def test_rejects_large_instances(self):
        instance = ProblemInstance(
            n=3, t_horizon=7.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        with pytest.raises(UnsupportedSizeError, match="coordinate_ascent"):
            grid_oracle(instance)


class TestCoordinateAscent:
    def test_reference_interior_objective(self, example_interior):
        solution = coordinate_ascent(example_interior, OracleConfig(starts=32, seed=3))
        assert solution.objective >= 3.6304 - 1e-3
        assert abs(solution.objective - solve(example_interior).objective) <= 1e-3

    def test_all_zero_start_on_slack_instance(self):
        # a single deterministic start from the all-zero schedule converges
        # to the saturating rest-to-floor / work-to-ceiling pattern
        instance = ProblemInstance(
            n=2, t_horizon=40.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        ascent = coordinate_ascent(instance, OracleConfig(starts=1, seed=0))
        expected = solve(instance)
        for got, want in zip(ascent.schedule.works, expected.schedule.works):
            assert got == pytest.approx(want, abs=1e-3)
        for got, want in zip(ascent.schedule.rests, expected.schedule.rests):
            assert got == pytest.approx(want, abs=1e-3)

    def test_deterministic_for_fixed_seed(self, example_boundary):
        config = OracleConfig(starts=4, seed=123)
        first = coordinate_ascent(example_boundary, config)
        second = coordinate_ascent(example_boundary, config)
        assert first.schedule == second.schedule
        assert first.objective == second.objective

    def test_eval_budget_exhaustion_flag(self, example_interior):
        solution = coordinate_ascent(
            example_interior, OracleConfig(starts=4, seed=1, max_evals=200)
        )
        assert "eval_budget_exhausted" in solution.diagnostics.flags
        report = check_feasibility(example_interior, solution.schedule, GRID_FEASIBILITY_TOL)
        assert report.feasible

    def test_rejects_large_instances(self):
        instance = ProblemInstance(
            n=9, t_horizon=20.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        with pytest.raises(UnsupportedSizeError):
            coordinate_ascent(instance)


class TestCompare:
    def test_identical_solutions_match(self, example_interior):
        solution = solve(example_interior)
        report = compare(solution, solution, tol=1e-9, instance=example_interior)
        assert report.verdict == "match"
        assert report.objective_gap_abs == 0.0
        assert report.schedule_linf == 0.0

    def test_solver_vs_grid_oracle(self):
        rng = np.random.default_rng(31)
        instance = sample_instance(rng, (2,), 1, families=("log_one_plus",))
        solver = solve(instance)
        oracle = grid_oracle(
            instance, OracleConfig(grid_step=instance.t_horizon / 60.0, refinement_rounds=6)
        )
        report = compare(solver, oracle, tol=1e-3, instance=instance)
        assert report.verdict == "match"
        for entry in report.lemma_checks.values():
            assert entry["a"] is True

    def test_truncated_schedule_dominated(self, example_interior):
        solver = solve(example_interior)
        pairs = [(seg.rest, seg.work) for seg in solver.schedule.segments]
        pairs[-1] = (pairs[-1][0], 0.0)
        truncated = solution_from_schedule(example_interior, Schedule.from_pairs(pairs))
        report = compare(solver, truncated, tol=1e-6, instance=example_interior)
        assert report.verdict == "a_dominates"
        assert report.objective_gap_abs > 0

    def test_to_dict_keys(self, example_interior):
        solution = solve(example_interior)
        payload = compare(solution, solution, tol=1e-9, instance=example_interior).to_dict()
        assert set(payload) == {
            "objective_gap_abs",
            "objective_gap_rel",
            "schedule_linf",
            "lemma_checks",
            "verdict",
        }


class TestSolutionFromSchedule:
    def test_infers_slack_label(self):
        instance = ProblemInstance(
            n=2, t_horizon=40.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        solution = solution_from_schedule(instance, solve(instance).schedule)
        assert solution.case.tag.value == "SLACK"

    def test_infers_structured_label(self, example_interior):
        solution = solution_from_schedule(example_interior, solve(example_interior).schedule)
        assert solution.case.tag.value == "STRUCTURED"
        assert solution.case.m == 2
        assert solution.case.boundary is False
        assert solution.t1_tilde == pytest.approx(2.4013, abs=1e-3)
