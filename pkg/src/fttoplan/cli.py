"""Command-line front end.

Reports are written to files under --out; only `validate` prints its human
summary on standard output, so the other commands compose cleanly in
scripts.  Exit codes: 0 ok, 1 schema/reference/invariant errors, 2
capacity/reserve errors, 3 I/O errors.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import document, estimate, failsim, reports
from .allocate import allocate, apply_plan, core_port_demand, reserve_report
from .errors import (
    CapacityError,
    ClassError,
    FttoError,
    InvariantError,
    MissingDataError,
    ModeError,
    ParseError,
    PolarityError,
    RangeError,
    ReachError,
    ReserveError,
    SchemaError,
    UnknownElementError,
    UnknownReferenceError,
)
from .labels import label_sheets
from .model import ColorSchemeName, panel_port_count
from .validate import validate_plant
from .version import GENERATOR

_INPUT_ERRORS = (
    SchemaError,
    UnknownReferenceError,
    InvariantError,
    RangeError,
    ParseError,
    ModeError,
    PolarityError,
    UnknownElementError,
    ClassError,
    ReachError,
    MissingDataError,
)
_CAPACITY_ERRORS = (CapacityError, ReserveError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fttoplan",
        description="Plan, validate, label and failure-test FTTO optical-loop plants.",
    )
    parser.add_argument("--version", action="version", version=GENERATOR)
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, help_text: str, *, demand=False, scenario=False, out=True):
        sub = commands.add_parser(name, help=help_text)
        sub.add_argument("--plant", required=True, help="plant document (JSON)")
        if demand:
            sub.add_argument("--demand", required=True, help="demand document (JSON)")
        if scenario:
            sub.add_argument("--scenario", required=True, help="failure scenario document (JSON)")
        if out:
            sub.add_argument("--out", default=".", help="output directory (default: current)")
            sub.add_argument(
                "--format",
                choices=["records", "document", "graph"],
                default="records",
                help="records: CSV only; document: plus JSON summary; graph: plus DOT export",
            )
        return sub

    add("validate", "check a plant document and print violations", out=False)

    plan = add("plan", "allocate taps and uplinks for a demand", demand=True)
    plan.add_argument("--strict-reserve", action="store_true", help="fail when reserve target is broken")

    labels = add("labels", "emit panel/box/switch label sheets")
    labels.add_argument(
        "--color-scheme",
        choices=[s.value for s in ColorSchemeName],
        default=None,
        help="override the plant's color scheme",
    )

    add("simulate", "baseline reachability plus a single-failure sweep")
    add("whatif", "evaluate one failure scenario", scenario=True)
    add("cost", "cost estimate records")
    add("report", "cost, energy, availability and reserve reports with figures")
    return parser


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(args) -> int:
    plant = document.load_plant(args.plant)
    violations = validate_plant(plant)
    print(
        f"plant {plant.site_name}: {len(plant.loops)} loops, {len(plant.boxes)} boxes, "
        f"{len(plant.switches)} switches, {panel_port_count(plant)} panel ports"
    )
    for violation in violations:
        print(str(violation))
    errors = sum(1 for v in violations if v.severity == "error")
    warnings = len(violations) - errors
    if errors:
        print(f"FAILED ({errors} errors, {warnings} warnings)")
        return 1
    print(f"OK ({warnings} warnings)")
    return 0


def cmd_plan(args) -> int:
    plant = document.load_plant(args.plant)
    demand = document.load_demand(args.demand)
    plan = allocate(plant, demand, strict_reserve=args.strict_reserve)
    planned = apply_plan(plant, plan)
    out = _out_dir(args)
    document.write_document(document.plan_to_document(plan), out / "plan.json")
    document.write_document(document.dump_plant(planned), out / "plant_planned.json")
    reports.write_plan_records(plan, out / "plan.csv")
    reports.write_reserve(reserve_report(planned), out / "reserve.csv")
    reports.write_core_ports(core_port_demand(planned), out / "core_ports.csv")
    return 0


def cmd_labels(args) -> int:
    plant = document.load_plant(args.plant)
    if args.color_scheme is not None:
        plant = dataclasses.replace(plant, color_scheme=ColorSchemeName(args.color_scheme))
    sheets = label_sheets(plant)
    out = _out_dir(args)
    reports.write_label_sheets(sheets, out)
    combined = {
        "schema_version": document.SCHEMA_VERSION,
        "generator": GENERATOR,
        "site": plant.site_name,
        "color_scheme": plant.color_scheme.value,
        "panel": [dataclasses.asdict(r) for r in sheets.panel],
        "boxes": [dataclasses.asdict(r) for r in sheets.boxes],
        "switches": [dataclasses.asdict(r) for r in sheets.switches],
    }
    document.write_document(combined, out / "labels.json")
    return 0


def cmd_simulate(args) -> int:
    plant = document.load_plant(args.plant)
    graph = failsim.build_graph(plant)
    baseline = failsim.reachability(graph)
    sweep = failsim.enumerate_single_failures(plant, graph=graph)
    tree = failsim.spanning_tree(graph)
    out = _out_dir(args)
    reports.write_reachability(baseline, out / "reachability.csv")
    reports.write_offices(baseline, out / "offices.csv")
    reports.write_criticality(sweep, out / "criticality.csv")
    reports.render_loop_layout(plant, out / "loop_layout.png")
    reports.render_criticality(sweep, out / "criticality.png")
    summary = [
        f"# {GENERATOR}",
        f"site: {plant.site_name}",
        f"spanning tree roots: {' '.join(tree.roots)}",
        f"blocking edges: {' '.join(tree.blocking) or '(none)'}",
        f"single failures evaluated: {len(sweep.entries)}",
        f"worst single failure: {sweep.worst_lost_ports} user ports lost",
    ]
    for entry in sweep.worst_entries()[:5]:
        summary.append(f"  worst: {entry.kind} {entry.target} {entry.detail}".rstrip())
    (out / "simulate.txt").write_text("\n".join(summary) + "\n", encoding="utf-8")
    if args.format == "graph":
        (out / "graph.dot").write_text(failsim.to_dot(graph), encoding="utf-8")
    if args.format == "document":
        document.write_document(
            {
                "schema_version": document.SCHEMA_VERSION,
                "generator": GENERATOR,
                "site": plant.site_name,
                "spanning_tree": {
                    "roots": list(tree.roots),
                    "active": list(tree.active),
                    "blocking": list(tree.blocking),
                },
                "worst_lost_ports": sweep.worst_lost_ports,
                "entries": [dataclasses.asdict(e) for e in sweep.entries],
            },
            out / "simulate.json",
        )
    return 0


def cmd_whatif(args) -> int:
    plant = document.load_plant(args.plant)
    scenario = document.load_scenario(args.scenario)
    graph = failsim.build_graph(plant)
    survivor = failsim.apply_scenario(graph, scenario)
    report = failsim.reachability(survivor)
    out = _out_dir(args)
    reports.write_reachability(report, out / "reachability.csv")
    reports.write_offices(report, out / "offices.csv")
    lost_switches = [s for s, ok in report.switch_reachable.items() if not ok]
    lines = [
        f"# {GENERATOR}",
        f"site: {plant.site_name}",
        f"events: {len(scenario.events)}",
    ]
    for event in scenario.events:
        kind, target, detail = failsim.describe_event(event)
        lines.append(f"  event: {kind} {target} {detail}".rstrip())
    lines += [
        f"{report.lost_user_ports} user ports lost",
        f"unreachable switches: {' '.join(lost_switches) or '(none)'}",
        f"blocking edges (pre-failure): {' '.join(report.blocking_edges) or '(none)'}",
    ]
    (out / "whatif.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    if args.format == "graph":
        (out / "graph.dot").write_text(failsim.to_dot(survivor), encoding="utf-8")
    return 0


def cmd_cost(args) -> int:
    plant = document.load_plant(args.plant)
    estimate_result = estimate.cost_estimate(plant)
    out = _out_dir(args)
    reports.write_cost(estimate_result, out / "cost.csv", assumptions=reports.estimator_assumptions(plant))
    return 0


def cmd_report(args) -> int:
    plant = document.load_plant(args.plant)
    assumptions = reports.estimator_assumptions(plant)
    cost = estimate.cost_estimate(plant)
    energy = estimate.energy_report(plant)
    availability = estimate.availability_report(plant)
    reserve = reserve_report(plant)
    ports = core_port_demand(plant)
    out = _out_dir(args)
    reports.write_cost(cost, out / "cost.csv", assumptions=assumptions)
    reports.write_energy(energy, out / "energy.csv", assumptions=assumptions)
    reports.write_availability(availability, out / "availability.csv", assumptions=assumptions)
    reports.write_reserve(reserve, out / "reserve.csv")
    reports.write_core_ports(ports, out / "core_ports.csv")
    reports.render_cost_breakdown(cost, out / "cost_breakdown.png")
    if args.format == "document":
        document.write_document(
            {
                "schema_version": document.SCHEMA_VERSION,
                "generator": GENERATOR,
                "site": plant.site_name,
                "assumptions": assumptions,
                "cost": {
                    "lines": [
                        {
                            "item": line.item,
                            "quantity": line.quantity,
                            "unit": line.unit,
                            "unit_price_eur": line.unit_price_eur,
                            "extended_eur": line.extended_eur,
                        }
                        for line in cost.lines
                    ],
                    "total_eur": cost.total_eur,
                },
                "energy": dataclasses.asdict(energy),
                "availability": dataclasses.asdict(availability),
                "reserve": [dataclasses.asdict(e) for e in reserve],
                "core_ports": dataclasses.asdict(ports),
            },
            out / "report.json",
        )
    return 0


_HANDLERS = {
    "validate": cmd_validate,
    "plan": cmd_plan,
    "labels": cmd_labels,
    "simulate": cmd_simulate,
    "whatif": cmd_whatif,
    "cost": cmd_cost,
    "report": cmd_report,
}


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return _HANDLERS[args.command](args)


def main(argv=None) -> int:
    try:
        return run(argv)
    except _CAPACITY_ERRORS as exc:
        print(f"capacity error: {exc}", file=sys.stderr)
        return 2
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except FttoError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
