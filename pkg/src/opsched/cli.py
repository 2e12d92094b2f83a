"""Command-line front end.

Subcommands: ``solve``, ``verify``, ``oracle``, ``trace``, ``compare``,
and ``examples``.  Human summaries print six decimal places; JSON output
carries full precision and is byte-stable across runs for identical
inputs.

Exit codes: 0 success, 1 verification or acceptance failure, 2 user
error, 3 internal error.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Any

from .dynamics import trace as compute_trace
from .errors import (
    InfeasibleCombinationError,
    InternalSolverError,
    InvalidArgumentError,
    InvalidInstanceError,
    SchedulingError,
    SingularDerivativeError,
    UnreachableTargetError,
    UnsupportedSizeError,
)
from .model import ProblemInstance, Schedule, check_feasibility
from .oracle import OracleConfig, compare, coordinate_ascent, grid_oracle, solution_from_schedule
from .presets import REFERENCE_EXAMPLES
from .solver import CaseTag, Solution, solve, verify_stationarity

__all__ = ["main", "build_parser"]

_USER_ERRORS = (
    InvalidArgumentError,
    InvalidInstanceError,
    UnsupportedSizeError,
    UnreachableTargetError,
    SingularDerivativeError,
)


def _fmt(value: float | int | None) -> str:
    if value is None:
        return "-"
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, int):
        return str(value)
    return f"{value:.6f}"


def _dump_json(payload: Any) -> str:
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"

def _write_json(path: str | Path, payload: Any) -> None:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(_dump_json(payload), encoding="utf-8")


def _load_schedule_document(path: str | Path) -> Schedule:
    """Accept either a schedule array or a solution document."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if isinstance(data, dict) and "schedule" in data:
        data = data["schedule"]
    return Schedule.from_list(data)


def _print_solution_summary(instance: ProblemInstance, solution: Solution) -> None:
    label = solution.case
    print(f"case: {label.tag.value}")
    print(f"m: {_fmt(label.m)}")
    if label.tag is CaseTag.STRUCTURED:
        print(f"boundary: {_fmt(label.boundary)}")
    print(f"t1_tilde: {_fmt(solution.t1_tilde)}")
    print(f"t2_tilde: {_fmt(solution.t2_tilde)}")
    print(f"r1_tilde: {_fmt(solution.r1_tilde)}")
    print(f"r2_tilde: {_fmt(solution.r2_tilde)}")
    print(f"objective: {_fmt(solution.objective)}")
    used = solution.schedule.total_duration
    print(f"budget used: {_fmt(used)} of {_fmt(instance.t_horizon)}")
    if label.tag is CaseTag.SLACK:
        print(f"unused budget: {_fmt(instance.t_horizon - used)}")
    for i, seg in enumerate(solution.schedule.segments, start=1):
        print(f"task {i}: rest {_fmt(seg.rest)}  work {_fmt(seg.work)}")


def _cmd_solve(args: argparse.Namespace) -> int:
    instance = ProblemInstance.load(args.instance)
    solution = solve(instance)
    if args.out:
        _write_json(args.out, solution.to_dict())
    if args.format == "json":
        sys.stdout.write(_dump_json(solution.to_dict()))
    else:
        _print_solution_summary(instance, solution)
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    instance = ProblemInstance.load(args.instance)
    solution: Solution | None = None
    if args.from_solve:
        solution = solve(instance)
        schedule = solution.schedule
    elif args.schedule:
        schedule = _load_schedule_document(args.schedule)
    else:
        print("error: verify needs --schedule or --from-solve", file=sys.stderr)
        return 2

    report = check_feasibility(instance, schedule)
    failed = not report.feasible
    print(f"feasible: {_fmt(report.feasible)}")
    print(f"budget used: {_fmt(report.budget_used)} of {_fmt(report.budget_limit)}")
    for violation in report.violations:
        print(f"violation: {violation}")
    for task in report.tasks:
        print(
            f"task {task.index}: rest {_fmt(task.rest)}  work {_fmt(task.work)}  "
            f"x_pre {_fmt(task.x_pre)}  x_post {_fmt(task.x_post)}"
        )

    if solution is None and report.feasible:
        solution = solution_from_schedule(instance, schedule)
    if solution is not None:
        audit = verify_stationarity(instance, solution, tol=args.tol)
        if audit.applicable:
            print(f"stationarity residual: {audit.residual:.3e} "
                  f"({'pass' if audit.passed else 'FAIL'} at {args.tol:g})")
            failed = failed or not audit.passed
        else:
            print(f"stationarity: not applicable ({audit.reason})")
    if args.out:
        _write_json(args.out, report.to_dict())
    return 1 if failed else 0


def _oracle_config(args: argparse.Namespace) -> OracleConfig:
    return OracleConfig(
        grid_step=args.grid_step,
        starts=args.starts,
        seed=args.seed,
    )


def _run_oracle(instance: ProblemInstance, args: argparse.Namespace) -> Solution:
    method = args.method
    if method == "auto":
        method = "grid" if instance.n <= 2 else "ascent"
    config = _oracle_config(args)
    if method == "grid":
        return grid_oracle(instance, config)
    return coordinate_ascent(instance, config)


def _cmd_oracle(args: argparse.Namespace) -> int:
    instance = ProblemInstance.load(args.instance)
    solution = _run_oracle(instance, args)
    if args.out:
        _write_json(args.out, solution.to_dict())
    if args.format == "json":
        sys.stdout.write(_dump_json(solution.to_dict()))
    else:
        _print_solution_summary(instance, solution)
    return 0


def _cmd_trace(args: argparse.Namespace) -> int:
    instance = ProblemInstance.load(args.instance)
    if args.from_solve:
        schedule = solve(instance).schedule
    elif args.schedule:
        schedule = _load_schedule_document(args.schedule)
    else:
        print("error: trace needs --schedule or --from-solve", file=sys.stderr)
        return 2

    report = check_feasibility(instance, schedule)
    if not report.feasible:
        print("infeasible schedule; not tracing", file=sys.stderr)
        for violation in report.violations:
            print(f"violation: {violation}", file=sys.stderr)
        return 1

    path = compute_trace(instance, schedule, args.dt)
    buffer = io.StringIO()
    path.write_csv(buffer)
    csv_text = buffer.getvalue()
    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(csv_text, encoding="utf-8")
    else:
        sys.stdout.write(csv_text)
    if args.plot:
        from .plotting import render_trace_figure

        render_trace_figure(path, instance, args.plot)
    return 0


def _cmd_compare(args: argparse.Namespace) -> int:
    instance = ProblemInstance.load(args.instance)
    solver_solution = solve(instance)
    if args.schedule:
        other = solution_from_schedule(instance, _load_schedule_document(args.schedule))
    else:
        other = _run_oracle(instance, args)
    report = compare(solver_solution, other, tol=args.tol, instance=instance)
    payload = report.to_dict()
    if args.out:
        _write_json(args.out, payload)
    if args.format == "json":
        sys.stdout.write(_dump_json(payload))
    else:
        print(f"verdict: {report.verdict}")
        print(f"objective gap (solver - other): {report.objective_gap_abs:.3e}")
        print(f"relative gap: {report.objective_gap_rel:.3e}")
        print(f"schedule L-inf distance: {report.schedule_linf:.3e}")
        for name, entry in report.lemma_checks.items():
            print(f"{name}: solver={_fmt(entry['a'])} other={_fmt(entry['b'])}")
    return 1 if report.verdict == "b_dominates" else 0


def _examples_rows(
    key: str, instance: ProblemInstance, solution: Solution, expected: dict[str, float]
) -> list[tuple[str, str, float, float]]:
    report = check_feasibility(instance, solution.schedule)
    rows = []
    for name, want in expected.items():
        if name == "work_per_task":
            got = solution.schedule.works[0]
        elif name == "rest_per_task":
            got = max(solution.schedule.rests)
        elif name == "terminal_ratio":
            got = report.terminal_ratio
        elif name == "m":
            got = float(solution.case.m if solution.case.m is not None else -1)
        else:
            value = getattr(solution, name)
            got = float("nan") if value is None else float(value)
        rows.append((key, name, got, want))
    return rows


def _cmd_examples(args: argparse.Namespace) -> int:
    header = f"{'example':<12} {'quantity':<16} {'computed':>12} {'expected':>12} {'|diff|':>10} {'status':>7}"
    print(header)
    print("-" * len(header))
    any_fail = False
    for example in REFERENCE_EXAMPLES:
        solution = solve(example.instance)
        for key, name, got, want in _examples_rows(
            example.key, example.instance, solution, example.expected
        ):
            diff = abs(got - want)
            ok = diff <= example.tolerance
            any_fail = any_fail or not ok
            print(
                f"{key:<12} {name:<16} {got:>12.6f} {want:>12.6f} "
                f"{diff:>10.6f} {'pass' if ok else 'FAIL':>7}"
            )
        if args.out_dir:
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            _write_json(out_dir / f"{example.key}.solution.json", solution.to_dict())
            path = compute_trace(example.instance, solution.schedule, args.dt)
            with (out_dir / f"{example.key}.trace.csv").open("w", encoding="utf-8") as fh:
                path.write_csv(fh)
            from .plotting import render_trace_figure

            render_trace_figure(
                path,
                example.instance,
                out_dir / f"{example.key}.png",
                title=f"{example.key}: {example.description}",
            )
    print("overall:", "FAIL" if any_fail else "PASS")
    return 1 if any_fail else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="opsched",
        description=(
            "Optimal rest/work scheduling for a fatigue-limited operator: "
            "solve instances, verify schedules, cross-check against oracles, "
            "and export utilization traces."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    solve_p = sub.add_parser("solve", help="Solve an instance file.")
    solve_p.add_argument("--instance", required=True, metavar="JSON")
    solve_p.add_argument("--out", default=None, metavar="JSON")
    solve_p.add_argument("--format", choices=["json", "text"], default="text")
    solve_p.set_defaults(func=_cmd_solve)

    verify_p = sub.add_parser("verify", help="Check a schedule against an instance.")
    verify_p.add_argument("--instance", required=True, metavar="JSON")
    verify_p.add_argument("--schedule", default=None, metavar="JSON")
    verify_p.add_argument("--from-solve", action="store_true")
    verify_p.add_argument("--out", default=None, metavar="JSON")
    verify_p.add_argument("--tol", type=float, default=1e-6,
                          help="stationarity tolerance (default 1e-6)")
    verify_p.set_defaults(func=_cmd_verify)

    oracle_p = sub.add_parser("oracle", help="Run a structure-agnostic baseline search.")
    oracle_p.add_argument("--instance", required=True, metavar="JSON")
    oracle_p.add_argument("--method", choices=["auto", "grid", "ascent"], default="auto")
    oracle_p.add_argument("--grid-step", type=float, default=None, metavar="REAL")
    oracle_p.add_argument("--starts", type=int, default=16, metavar="N")
    oracle_p.add_argument("--seed", type=int, default=0, metavar="N")
    oracle_p.add_argument("--out", default=None, metavar="JSON")
    oracle_p.add_argument("--format", choices=["json", "text"], default="text")
    oracle_p.set_defaults(func=_cmd_oracle)

    trace_p = sub.add_parser("trace", help="Export a utilization trace as CSV.")
    trace_p.add_argument("--instance", required=True, metavar="JSON")
    trace_p.add_argument("--schedule", default=None, metavar="JSON")
    trace_p.add_argument("--from-solve", action="store_true")
    trace_p.add_argument("--dt", type=float, default=0.1, metavar="REAL")
    trace_p.add_argument("--out", default=None, metavar="CSV")
    trace_p.add_argument("--plot", default=None, metavar="IMG",
                         help="also render the trace as a figure")
    trace_p.set_defaults(func=_cmd_trace)

    compare_p = sub.add_parser(
        "compare", help="Compare the solver against an oracle or a given schedule."
    )
    compare_p.add_argument("--instance", required=True, metavar="JSON")
    compare_p.add_argument("--schedule", default=None, metavar="JSON")
    compare_p.add_argument("--method", choices=["auto", "grid", "ascent"], default="auto")
    compare_p.add_argument("--grid-step", type=float, default=None, metavar="REAL")
    compare_p.add_argument("--starts", type=int, default=16, metavar="N")
    compare_p.add_argument("--seed", type=int, default=0, metavar="N")
    compare_p.add_argument("--tol", type=float, default=1e-3, metavar="REAL")
    compare_p.add_argument("--out", default=None, metavar="JSON")
    compare_p.add_argument("--format", choices=["json", "text"], default="text")
    compare_p.set_defaults(func=_cmd_compare)

    examples_p = sub.add_parser(
        "examples", help="Solve the bundled reference instances and check their values."
    )
    examples_p.add_argument("--out-dir", default=None, metavar="DIR",
                            help="write solution JSON, trace CSV, and a figure per example")
    examples_p.add_argument("--dt", type=float, default=0.05, metavar="REAL")
    examples_p.set_defaults(func=_cmd_examples)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _USER_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InternalSolverError, InfeasibleCombinationError, SchedulingError) as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
