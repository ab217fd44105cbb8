"""Batch front-end: validate configs, solve, design, sweep, brute-force.

Exit codes: 0 success, 1 domain error (invalid scenario or infeasible
inputs), 2 usage or parse error.  Data outputs are byte-stable across
runs: numbers use 12 significant digits and carry no timestamps; sweep
metadata goes to a JSON sidecar next to the CSV.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, replace
from pathlib import Path

from . import __version__
from .design import RegimeError, optimal_design
from .equilibrium import average_spillover, solve_equilibrium
from .model import (
    DomainError,
    InformationStructure,
    InvalidScenarioError,
    NetworkScenario,
    ScenarioParseError,
    load_scenario,
    validate_scenario,
)
from .oracle import ConvergenceError, GridSpec, grid_search_design

AXIS_FIELDS = {"lambda": "lambda_", "tau": "tau", "p": "p"}
OUTPUT_GROUPS = ("pi_star", "flows", "loss", "costs")


@dataclass(frozen=True)
class SweepRequest:
    """One sweep: vary a single scenario axis and record requested outputs."""

    scenario: NetworkScenario
    axis: str
    start: float
    stop: float
    count: int
    outputs: frozenset[str]

    def __post_init__(self) -> None:
        if self.axis not in AXIS_FIELDS:
            raise DomainError(f"unknown sweep axis {self.axis!r}")
        if self.start > self.stop:
            raise DomainError(f"start {self.start!r} exceeds stop {self.stop!r}")
        if self.count < 1:
            raise DomainError(f"count must be positive, got {self.count!r}")
        unknown = self.outputs - set(OUTPUT_GROUPS)
        if unknown:
            raise DomainError(f"unknown outputs: {sorted(unknown)}")

    def axis_values(self) -> list[float]:
        if self.count == 1:
            return [self.start]
        width = (self.stop - self.start) / (self.count - 1)
        return [self.start + i * width for i in range(self.count)]


def _fmt(value: object) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    return f"{float(value):.12g}"


def _round_floats(value: object) -> object:
    """Clamp floats to 12 significant digits so JSON matches the CSV."""
    if isinstance(value, float):
        return float(f"{value:.12g}")
    if isinstance(value, dict):
        return {k: _round_floats(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_round_floats(v) for v in value]
    return value


def _print_json(record: dict[str, object]) -> None:
    print(json.dumps(_round_floats(record), indent=2))


def _print_csv(record: dict[str, object]) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(record.keys())
    writer.writerow([_fmt(v) for v in record.values()])
    sys.stdout.write(buf.getvalue())


def _emit(record: dict[str, object], fmt: str) -> None:
    if fmt == "csv":
        _print_csv(record)
    else:
        _print_json(record)


def _load(path: str) -> NetworkScenario:
    return load_scenario(path)


def _cmd_validate(args: argparse.Namespace) -> int:
    report = validate_scenario(_load(args.config))
    print(report)
    return 0 if report.ok else 1


def _cmd_equilibrium(args: argparse.Namespace) -> int:
    scenario = _load(args.config)
    pi = InformationStructure(args.pi_aa, args.pi_nn)
    outcome = solve_equilibrium(scenario, pi)
    _emit(outcome.to_record(), args.format)
    return 0


def _cmd_design(args: argparse.Namespace) -> int:
    solution = optimal_design(_load(args.config))
    _emit(solution.to_record(), args.format)
    return 0


def _sweep_columns(outputs: frozenset[str], axis: str) -> list[str]:
    cols = [axis, "regime"]
    if "pi_star" in outputs:
        cols += ["pi_a_a", "pi_n_n"]
    if "flows" in outputs:
        cols += ["f2_n", "f2_a", "f1_n", "f1_a"]
    if "loss" in outputs:
        cols += ["loss", "loss_no_info", "loss_full_info"]
    if "costs" in outputs:
        cols += [
            "cost_pop1",
            "cost_pop2",
            "cost_avg",
            "cost_avg_no_info",
            "cost_avg_full_info",
        ]
    cols.append("error")
    return cols


def _sweep_row(request: SweepRequest, value: float) -> dict[str, object]:
    scenario = replace(request.scenario, **{AXIS_FIELDS[request.axis]: value})
    row: dict[str, object] = {request.axis: value}
    report = validate_scenario(scenario)
    if not report.ok:
        row["error"] = "; ".join(report.violations)
        return row

    solution = optimal_design(scenario)
    row["regime"] = solution.regime.value
    outputs = request.outputs
    if "pi_star" in outputs:
        row["pi_a_a"] = solution.pi_star.pi_a_given_a
        row["pi_n_n"] = solution.pi_star.pi_n_given_n
    if "flows" in outputs:
        out = solution.outcome
        row.update(
            f2_n=out.f2_given_n, f2_a=out.f2_given_a, f1_n=out.f1_given_n, f1_a=out.f1_given_a
        )
    needs_baselines = "loss" in outputs or "costs" in outputs
    if needs_baselines:
        no_info = solve_equilibrium(scenario, InformationStructure.no_information())
        full_info = solve_equilibrium(scenario, InformationStructure.full_revelation())
    if "loss" in outputs:
        row["loss"] = solution.loss
        row["loss_no_info"] = average_spillover(scenario, no_info)
        row["loss_full_info"] = average_spillover(scenario, full_info)
    if "costs" in outputs:
        out = solution.outcome
        row.update(cost_pop1=out.cost_pop1, cost_pop2=out.cost_pop2, cost_avg=out.cost_avg)
        row["cost_avg_no_info"] = no_info.cost_avg
        row["cost_avg_full_info"] = full_info.cost_avg
    row["error"] = ""
    return row


def run_sweep(request: SweepRequest) -> tuple[list[str], list[dict[str, object]]]:
    """Evaluate every sweep point; per-point failures land in the error column."""
    columns = _sweep_columns(request.outputs, request.axis)
    rows = []
    for value in request.axis_values():
        try:
            rows.append(_sweep_row(request, value))
        except (DomainError, InvalidScenarioError, RegimeError, ArithmeticError) as exc:
            rows.append({request.axis: value, "error": str(exc)})
    return columns, rows


def _write_sweep(
    columns: list[str], rows: list[dict[str, object]], out_path: str | None
) -> None:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in columns])
    if out_path is None:
        sys.stdout.write(buf.getvalue())
    else:
        Path(out_path).write_text(buf.getvalue())


def _write_sidecar(request: SweepRequest, out_path: str) -> None:
    meta = {
        "tool": f"routegame {__version__}",
        "scenario": _round_floats(request.scenario.to_dict()),
        "sweep": {
            "axis": request.axis,
            "start": request.start,
            "stop": request.stop,
            "count": request.count,
            "outputs": sorted(request.outputs),
        },
    }
    Path(out_path + ".meta.json").write_text(json.dumps(_round_floats(meta), indent=2) + "\n")


def _cmd_sweep(args: argparse.Namespace) -> int:
    scenario = _load(args.config)
    try:
        request = SweepRequest(
            scenario=scenario,
            axis=args.axis,
            start=args.start,
            stop=args.stop,
            count=args.count,
            outputs=frozenset(args.outputs),
        )
    except DomainError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    columns, rows = run_sweep(request)
    _write_sweep(columns, rows, args.out)
    if args.out is not None:
        _write_sidecar(request, args.out)
    return 0


def _cmd_oracle(args: argparse.Namespace) -> int:
    scenario = _load(args.config)
    spec = GridSpec(steps_pi=args.grid, tol=args.tol)
    best_pi, best_loss = grid_search_design(scenario, spec, trace_path=args.trace)
    solution = optimal_design(scenario)
    record = {
        "pi_a_a": best_pi.pi_a_given_a,
        "pi_n_n": best_pi.pi_n_given_n,
        "loss": best_loss,
        "closed_form_loss": solution.loss,
        "closed_form_gap": best_loss - solution.loss,
    }
    _print_json(record)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="routegame",
        description="Solvers for the two-route signaling game: equilibria, "
        "optimal signal policies, sweeps, and brute-force checks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a scenario config file")
    p.add_argument("config")
    p.set_defaults(handler=_cmd_validate)

    p = sub.add_parser("equilibrium", help="solve one signal distribution")
    p.add_argument("config")
    p.add_argument("--pi-aa", type=float, required=True, dest="pi_aa")
    p.add_argument("--pi-nn", type=float, required=True, dest="pi_nn")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_equilibrium)

    p = sub.add_parser("design", help="solve the planner's problem in closed form")
    p.add_argument("config")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(handler=_cmd_design)

    p = sub.add_parser("sweep", help="sweep one scenario axis and emit CSV")
    p.add_argument("config")
    p.add_argument("--axis", choices=sorted(AXIS_FIELDS), required=True)
    p.add_argument("--start", type=float, required=True)
    p.add_argument("--stop", type=float, required=True)
    p.add_argument("--count", type=int, required=True)
    p.add_argument("--outputs", nargs="+", choices=OUTPUT_GROUPS, default=list(OUTPUT_GROUPS))
    p.add_argument("--out", default=None, help="CSV path (stdout if omitted)")
    p.set_defaults(handler=_cmd_sweep)

    p = sub.add_parser("oracle", help="brute-force the design problem on a grid")
    p.add_argument("config")
    p.add_argument("--grid", type=int, default=101)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--trace", default=None, help="optional per-cell CSV trace path")
    p.set_defaults(handler=_cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, InvalidScenarioError, RegimeError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
