"""Structural solver tests: case analysis, budget roots, golden solutions."""

from __future__ import annotations

import math

import numpy as np
import pytest

from opsched import (
    CaseTag,
    InfeasibleCombinationError,
    InvalidArgumentError,
    ProblemInstance,
    Solution,
    UtilityFunction,
    budget,
    check_feasibility,
    classify_case,
    greedy_saturating_schedule,
    lemma5_classify,
    policy2_pre_work_ratio,
    solve,
    solve_t2_for_budget,
    total_utility,
    verify_stationarity,
)
from opsched.solver import CaseLabel, Ordering

from conftest import sample_instance

LOG1P = UtilityFunction(family="log_one_plus")


def n2_instance(t_horizon: float, x0: float = 0.6) -> ProblemInstance:
    return ProblemInstance(
        n=2, t_horizon=t_horizon, alpha=0.125, x_min=0.4, x_max=0.85, x0=x0, utility=LOG1P
    )


class TestGreedySaturating:
    def test_start_at_floor_means_no_first_rest(self):
        instance = ProblemInstance(
            n=2, t_horizon=50.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.4, utility=LOG1P
        )
        schedule, _ = greedy_saturating_schedule(instance)
        assert schedule.segments[0].rest == 0.0

    def test_reference_durations(self):
        # oracle: closed-form logs of the saturating pattern
        schedule, total = greedy_saturating_schedule(n2_instance(40.0))
        assert schedule.segments[0].rest == pytest.approx(3.243721, abs=1e-6)
        assert schedule.segments[0].work == pytest.approx(11.090355, abs=1e-6)
        assert schedule.segments[1].rest == pytest.approx(6.030174, abs=1e-6)
        assert schedule.segments[1].work == pytest.approx(11.090355, abs=1e-6)
        assert total == pytest.approx(31.454605, abs=1e-5)

    def test_returned_regardless_of_fit(self):
        schedule, total = greedy_saturating_schedule(n2_instance(1.0))
        assert total > 1.0
        assert len(schedule.segments) == 2


class TestClassifyCase:
    def test_no_rest_example(self, example_no_rest):
        assert classify_case(example_no_rest).tag is CaseTag.NO_REST_EQUAL_SPLIT

    def test_boundary_example(self, example_boundary):
        label = classify_case(example_boundary)
        assert label.tag is CaseTag.STRUCTURED
        assert label.m == 2
        assert label.boundary is True

    def test_interior_example(self, example_interior):
        label = classify_case(example_interior)
        assert label.tag is CaseTag.STRUCTURED
        assert label.m == 2
        assert label.boundary is False

    def test_slack_example(self):
        assert classify_case(n2_instance(40.0)).tag is CaseTag.SLACK


class TestPolicy2PreWorkRatio:
    def test_zero_work_gives_ceiling(self):
        assert policy2_pre_work_ratio(0.0, 0.85, 0.125) == 0.85

    def test_reference_values(self):
        assert policy2_pre_work_ratio(2.6740, 0.85, 0.125) == pytest.approx(
            0.790466, abs=1e-6
        )
        assert policy2_pre_work_ratio(2.2610, 0.85, 0.125) == pytest.approx(
            0.801009, abs=1e-6
        )

    def test_roundtrip_to_ceiling(self):
        from opsched import work_transition

        for t2 in (0.3, 1.7, 4.0):
            x_bar = policy2_pre_work_ratio(t2, 0.85, 0.125)
            assert work_transition(x_bar, t2, 0.125) == pytest.approx(0.85, abs=1e-12)

    def test_too_large_work(self):
        with pytest.raises(InvalidArgumentError):
            policy2_pre_work_ratio(100.0, 0.85, 0.125)


class TestBudget:
    def test_reference_boundary_parameters(self, example_boundary):
        assert budget(example_boundary, 2, 2.7726, 2.6740) == pytest.approx(8.8, abs=1e-3)

    def test_reference_interior_parameters(self, example_interior):
        assert budget(example_interior, 2, 2.4013, 2.2610) == pytest.approx(7.4, abs=1e-3)

    def test_degenerate_no_first_rest(self, example_boundary):
        # m = 0 with the work time that exactly spans x0 -> x_max needs no
        # first rest: the total is N*t2 + (N-1)*rest(x_max -> x0)
        from opsched import rest_time_to_reach, work_time_to_reach

        inst = example_boundary
        t2 = work_time_to_reach(inst.x0, inst.x_max, inst.alpha)
        expected = inst.n * t2 + (inst.n - 1) * rest_time_to_reach(
            inst.x_max, inst.x0, inst.alpha
        )
        assert budget(inst, 0, 0.0, t2) == pytest.approx(expected, abs=1e-9)

    def test_strictly_increasing_in_t2(self, example_interior):
        # domain floor for (m=2, t1=2.0) is the work time from the phase-1
        # exit ratio up to x_max, about 1.55
        values = [budget(example_interior, 2, 2.0, t2) for t2 in (1.6, 2.0, 2.5, 3.0)]
        assert all(b > a for a, b in zip(values, values[1:]))

    def test_domain_errors(self, example_interior):
        with pytest.raises(InfeasibleCombinationError, match="x_max"):
            budget(example_interior, 2, 5.0, 2.0)  # phase-1 overshoots the ceiling
        with pytest.raises(InfeasibleCombinationError, match="x_min"):
            budget(example_interior, 0, 0.0, 12.0)  # pre-work ratio below the floor
        with pytest.raises(InfeasibleCombinationError, match="too short"):
            budget(example_interior, 0, 0.0, 1.0)  # would need a negative first rest
        with pytest.raises(InvalidArgumentError):
            budget(example_interior, 3, 1.0, 1.0)


class TestSolveT2ForBudget:
    def test_reference_boundary_root(self, example_boundary):
        root = solve_t2_for_budget(example_boundary, 2, 2.7726)
        assert root.t2 == pytest.approx(2.6740, abs=1e-3)
        assert root.slack == 0.0

    def test_reference_interior_root(self, example_interior):
        root = solve_t2_for_budget(example_interior, 2, 2.4013)
        assert root.t2 == pytest.approx(2.2610, abs=1e-3)

    def test_budget_roundtrip(self, example_interior):
        for t1 in (1.5, 2.0, 2.4):
            root = solve_t2_for_budget(example_interior, 2, t1)
            assert budget(example_interior, 2, t1, root.t2) == pytest.approx(
                example_interior.t_horizon, abs=1e-9
            )

    def test_residual_slack_flag(self):
        # a short no-rest phase with one alternating task cannot absorb a
        # 30-unit horizon even resting to the floor: flagged, not an error
        instance = ProblemInstance(
            n=3, t_horizon=30.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        root = solve_t2_for_budget(instance, 2, 1.0)
        assert root.slack > 0.0
        assert budget(instance, 2, 1.0, root.t2) == pytest.approx(
            instance.t_horizon - root.slack, abs=1e-9
        )

    def test_infeasible_combination(self):
        instance = n2_instance(3.0, x0=0.6)
        # even the shortest alternating schedule for m=0 cannot fit T=3
        with pytest.raises(InfeasibleCombinationError):
            solve_t2_for_budget(instance, 0, 0.0)


class TestSolveGolden:
    def test_no_rest_example(self, example_no_rest):
        solution = solve(example_no_rest)
        assert solution.case.tag is CaseTag.NO_REST_EQUAL_SPLIT
        for seg in solution.schedule.segments:
            assert seg.rest == 0.0
            assert seg.work == pytest.approx(2.3333, abs=1e-3)
        report = check_feasibility(example_no_rest, solution.schedule)
        assert report.terminal_ratio == pytest.approx(0.8332, abs=1e-3)

    def test_boundary_example(self, example_boundary):
        solution = solve(example_boundary)
        assert solution.case == CaseLabel(tag=CaseTag.STRUCTURED, m=2, boundary=True)
        assert solution.t1_tilde == pytest.approx(2.7726, abs=1e-3)
        assert solution.t2_tilde == pytest.approx(2.6740, abs=1e-3)
        assert solution.r2_tilde == pytest.approx(0.5808, abs=1e-3)
        assert solution.r1_tilde is None
        works = solution.schedule.works
        rests = solution.schedule.rests
        assert works[0] == works[1] == solution.t1_tilde
        assert rests[0] == rests[1] == 0.0
        assert rests[2] == pytest.approx(solution.r2_tilde, abs=1e-12)

    def test_interior_example(self, example_interior):
        solution = solve(example_interior)
        assert solution.case == CaseLabel(tag=CaseTag.STRUCTURED, m=2, boundary=False)
        assert solution.t1_tilde == pytest.approx(2.4013, abs=1e-3)
        assert solution.t2_tilde == pytest.approx(2.2610, abs=1e-3)
        assert solution.r1_tilde == pytest.approx(0.3364, abs=1e-3)
        assert solution.schedule.rests[2] == pytest.approx(0.3364, abs=1e-3)

    def test_slack_schedule_saturates(self):
        instance = n2_instance(40.0)
        solution = solve(instance)
        assert solution.case.tag is CaseTag.SLACK
        report = check_feasibility(instance, solution.schedule)
        for task in report.tasks:
            assert task.x_pre == pytest.approx(instance.x_min, abs=1e-9)
            assert task.x_post == pytest.approx(instance.x_max, abs=1e-9)

    def test_objective_matches_schedule(self, example_interior):
        solution = solve(example_interior)
        assert solution.objective == pytest.approx(
            total_utility(solution.schedule, example_interior.utility), abs=1e-12
        )

    def test_phase_ordering_observation(self, example_boundary, example_interior):
        for instance in (example_boundary, example_interior):
            solution = solve(instance)
            assert solution.t1_tilde > solution.t2_tilde

    def test_m_sweep_dominance(self, example_boundary, example_interior):
        for instance in (example_boundary, example_interior):
            solution = solve(instance)
            for candidate in solution.diagnostics.candidates:
                assert solution.objective >= candidate.objective - 1e-12

    def test_single_task(self):
        instance = ProblemInstance(
            n=1, t_horizon=2.0, alpha=0.125, x_min=0.4, x_max=0.85, x0=0.6, utility=LOG1P
        )
        solution = solve(instance)
        assert solution.schedule.rests[0] == pytest.approx(0.0, abs=1e-9)
        assert solution.schedule.works[0] == pytest.approx(2.0, abs=1e-9)
        assert solution.objective == pytest.approx(math.log(3.0), abs=1e-9)


class TestVerifyStationarity:
    def test_interior_reference_sides(self, example_interior):
        # rounded reference values: both sides near 0.2456
        u = example_interior.utility
        lhs = u.derivative(2.4013) * 0.835403
        rhs = u.derivative(2.2610) * 0.801010
        assert lhs == pytest.approx(0.2456, abs=1e-3)
        assert rhs == pytest.approx(0.2456, abs=1e-3)
        assert abs(lhs - rhs) / max(lhs, rhs) < 1e-3

    def test_solver_output_passes_tightly(self, example_interior):
        solution = solve(example_interior)
        report = verify_stationarity(example_interior, solution, tol=1e-6)
        assert report.applicable
        assert report.passed
        assert report.residual <= 1e-6

    def test_boundary_not_applicable(self, example_boundary):
        solution = solve(example_boundary)
        report = verify_stationarity(example_boundary, solution, tol=1e-6)
        assert not report.applicable
        assert "boundary" in report.reason

    def test_slack_not_applicable(self):
        instance = n2_instance(40.0)
        report = verify_stationarity(instance, solve(instance), tol=1e-6)
        assert not report.applicable


class TestLemma5Classifier:
    def test_boundary_branch(self, example_boundary):
        solution = solve(example_boundary)
        report = lemma5_classify(solution.case, 3, 2, 0.85, 0.790466)
        assert report.ordering is Ordering.T1_GREATER
        assert report.branch == "boundary"
        assert not report.discrepancy

    def test_task_count_branch(self):
        label = CaseLabel(tag=CaseTag.STRUCTURED, m=1, boundary=False)
        report = lemma5_classify(label, 4, 1, 0.8, 0.7)
        assert report.ordering is Ordering.T1_GREATER
        assert report.branch == "task_count"

    def test_ratio_branch_contradicts_observed_ordering(self):
        # the verbatim ratio rule on the interior reference quantities
        # predicts the opposite of the solved ordering; the discrepancy
        # flag documents that
        label = CaseLabel(tag=CaseTag.STRUCTURED, m=2, boundary=False)
        report = lemma5_classify(label, 3, 2, 0.835403, 0.801010)
        assert report.branch == "ratio"
        assert report.ratio_lhs == pytest.approx(0.394054, abs=1e-5)
        assert report.ratio_rhs == pytest.approx(0.248424, abs=1e-5)
        assert report.ordering is Ordering.T1_SMALLER
        assert report.discrepancy
        assert report.note

    def test_ratio_branch_agreeing_direction(self):
        label = CaseLabel(tag=CaseTag.STRUCTURED, m=2, boundary=False)
        # lhs < rhs predicts the no-rest phase works longer: no discrepancy
        report = lemma5_classify(label, 3, 2, 0.99, 0.5)
        assert report.ordering is Ordering.T1_GREATER
        assert not report.discrepancy

    def test_requires_structured(self):
        with pytest.raises(InvalidArgumentError):
            lemma5_classify(CaseLabel(tag=CaseTag.SLACK), 3, 2, 0.8, 0.7)


class TestSolvedPopulationProperties:
    def test_lemma_invariants_small_population(self):
        rng = np.random.default_rng(11)
        for index in range(24):
            instance = sample_instance(rng, (1, 2, 3, 4), index)
            solution = solve(instance)
            report = check_feasibility(instance, solution.schedule, tol=1e-9)
            assert report.feasible, report.violations
            for task in report.tasks:
                if task.rest > 1e-9:
                    assert task.x_post == pytest.approx(instance.x_max, abs=1e-9)
            if solution.case.tag is not CaseTag.SLACK:
                assert report.budget_used == pytest.approx(instance.t_horizon, abs=1e-9)

    def test_monotone_in_horizon(self, example_boundary):
        previous = -math.inf
        for t_horizon in np.arange(7.0, 10.01, 0.4):
            instance = ProblemInstance(
                n=3, t_horizon=float(t_horizon), alpha=0.125, x_min=0.4, x_max=0.85,
                x0=0.7, utility=LOG1P,
            )
            objective = solve(instance).objective
            assert objective >= previous - 1e-9
            previous = objective

    def test_interior_ordering_consequence(self):
        # at interior optima the first-order balance with a strictly
        # concave utility forces the no-rest phase to work longer
        rng = np.random.default_rng(23)
        seen = 0
        for index in range(40):
            instance = sample_instance(rng, (2, 3, 4), 3 * index + 1)
            solution = solve(instance)
            if solution.diagnostics.stationarity_residual is None:
                continue
            seen += 1
            assert solution.t1_tilde > solution.t2_tilde
        assert seen >= 3
