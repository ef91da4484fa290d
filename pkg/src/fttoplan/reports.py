"""Report emission: delimited record files and matplotlib figures.

Every record file starts with a comment line carrying the tool version,
then assumption lines for figures that are tool defaults rather than
published values.  Output bodies carry no timestamps, so identical inputs
give byte-identical files.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Mapping, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .allocate import AllocationPlan, CorePortDemand, ReserveEntry
from .estimate import AvailabilityReport, CostEstimate, EnergyReport
from .failsim import CriticalityReport, ReachabilityReport
from .labels import LabelSheets
from .model import FiberPlant, TapSide
from .version import GENERATOR

FIGURE_DPI = 100


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "yes" if value else "no"
    if isinstance(value, float):
        return f"{value:g}"
    return str(value)


def write_records(
    path: Union[str, Path],
    fieldnames: Sequence[str],
    rows: Iterable[Mapping],
    *,
    assumptions: Sequence[str] = (),
) -> None:
    """CSV with a version header line and optional assumption lines."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(f"# {GENERATOR}\n")
        for note in assumptions:
            handle.write(f"# assumption: {note}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(fieldnames)
        for row in rows:
            writer.writerow([_fmt(row[name]) for name in fieldnames])


# -- record files ------------------------------------------------------------


def write_label_sheets(sheets: LabelSheets, out_dir: Union[str, Path]) -> list[Path]:
    out = Path(out_dir)
    panel = out / "panel.csv"
    write_records(
        panel,
        ["cable", "code", "end", "tube", "tube_color", "fiber", "fiber_color", "label", "connection"],
        (
            {
                "cable": r.cable,
                "code": r.cable_code,
                "end": r.end,
                "tube": r.tube,
                "tube_color": r.tube_color,
                "fiber": r.fiber,
                "fiber_color": r.fiber_color,
                "label": r.label,
                "connection": r.connection,
            }
            for r in sheets.panel
        ),
    )
    boxes = out / "boxes.csv"
    write_records(
        boxes,
        ["box", "cable", "tube", "side", "tube_color", "tap_label", "spliced", "ports"],
        (
            {
                "box": r.box,
                "cable": r.cable,
                "tube": r.tube,
                "side": r.side,
                "tube_color": r.tube_color,
                "tap_label": r.tap_label,
                "spliced": r.spliced_count,
                "ports": r.ports,
            }
            for r in sheets.boxes
        ),
    )
    switches = out / "switches.csv"
    write_records(
        switches,
        ["switch", "office", "room", "box", "port_label", "dns_name", "annotations"],
        (
            {
                "switch": r.switch,
                "office": r.office,
                "room": r.room,
                "box": r.box,
                "port_label": r.port_label,
                "dns_name": r.dns_name,
                "annotations": r.annotations,
            }
            for r in sheets.switches
        ),
    )
    return [panel, boxes, switches]


def write_criticality(report: CriticalityReport, path: Union[str, Path]) -> None:
    write_records(
        path,
        ["kind", "target", "detail", "lost_user_ports", "unreachable_switches"],
        (
            {
                "kind": e.kind,
                "target": e.target,
                "detail": e.detail,
                "lost_user_ports": e.lost_user_ports,
                "unreachable_switches": " ".join(e.unreachable_switches),
            }
            for e in report.entries
        ),
    )


def write_reachability(report: ReachabilityReport, path: Union[str, Path]) -> None:
    write_records(
        path,
        ["switch", "reachable"],
        ({"switch": s, "reachable": ok} for s, ok in report.switch_reachable.items()),
    )


def write_offices(report: ReachabilityReport, path: Union[str, Path]) -> None:
    write_records(
        path,
        ["office", "served"],
        ({"office": o, "served": ok} for o, ok in report.office_served.items()),
    )


def write_cost(estimate: CostEstimate, path: Union[str, Path], *, assumptions: Sequence[str] = ()) -> None:
    rows = [
        {
            "item": line.item,
            "quantity": line.quantity,
            "unit": line.unit,
            "unit_price_eur": f"{line.unit_price_eur:.2f}",
            "extended_eur": f"{line.extended_eur:.2f}",
            "delta_per_plus1_eur": f"{estimate.sensitivity(line.item, 1.0):.2f}",
        }
        for line in estimate.lines
    ]
    rows.append(
        {
            "item": "total",
            "quantity": "",
            "unit": "",
            "unit_price_eur": "",
            "extended_eur": f"{estimate.total_eur:.2f}",
            "delta_per_plus1_eur": "",
        }
    )
    write_records(
        path,
        ["item", "quantity", "unit", "unit_price_eur", "extended_eur", "delta_per_plus1_eur"],
        rows,
        assumptions=assumptions,
    )


def write_energy(report: EnergyReport, path: Union[str, Path], *, assumptions: Sequence[str] = ()) -> None:
    rows = [
        {"metric": "switch_count", "value": report.switch_count, "unit": ""},
        {"metric": "base_draw", "value": report.base_draw_w, "unit": "W"},
        {"metric": "transformer_overhead", "value": report.transformer_overhead_w, "unit": "W"},
        {"metric": "total_draw", "value": report.total_draw_w, "unit": "W"},
        {"metric": "eepoe_savings", "value": report.eepoe_savings_w, "unit": "W"},
        {"metric": "night_shutdown_savings", "value": report.night_savings_wh_per_day, "unit": "Wh/day"},
    ]
    write_records(path, ["metric", "value", "unit"], rows, assumptions=assumptions)


def write_availability(report: AvailabilityReport, path: Union[str, Path], *, assumptions: Sequence[str] = ()) -> None:
    rows = [
        {"metric": "fleet_size", "value": report.fleet_size, "unit": "switches"},
        {
            "metric": "expected_failures",
            "value": f"{report.expected_failures_per_year:.3f}",
            "unit": "per year",
        },
        {"metric": "recommended_spares", "value": report.recommended_spares, "unit": "switches"},
    ]
    for kind, rate in report.failures_by_kind.items():
        rows.append({"metric": f"expected_failures[{kind}]", "value": f"{rate:.3f}", "unit": "per year"})
    write_records(path, ["metric", "value", "unit"], rows, assumptions=assumptions)


def write_reserve(entries: Sequence[ReserveEntry], path: Union[str, Path]) -> None:
    write_records(
        path,
        ["cable", "free_tube_sides", "total_tube_sides", "tube_side_reserve", "fiber_reserve_in_tapped", "below_floor"],
        (
            {
                "cable": e.cable,
                "free_tube_sides": e.free_tube_sides,
                "total_tube_sides": e.total_tube_sides,
                "tube_side_reserve": f"{e.tube_side_reserve:.3f}",
                "fiber_reserve_in_tapped": f"{e.fiber_reserve_in_tapped:.3f}",
                "below_floor": e.below_floor,
            }
            for e in entries
        ),
    )


def write_plan_records(plan: AllocationPlan, path: Union[str, Path]) -> None:
    write_records(
        path,
        ["box", "tube", "side", "mode", "fibers", "core", "core_port", "kind", "attach_to"],
        (
            {
                "box": p.uplink.box,
                "tube": p.uplink.tube_index,
                "side": p.uplink.side.value,
                "mode": p.uplink.mode.value,
                "fibers": " ".join(str(f) for f in p.uplink.fibers),
                "core": p.uplink.core,
                "core_port": p.uplink.core_port,
                "kind": p.uplink.kind.value,
                "attach_to": p.attach_to or "",
            }
            for p in plan.created_uplinks
        ),
    )


def write_core_ports(demand: CorePortDemand, path: Union[str, Path]) -> None:
    rows = [
        {"metric": "sfp_ports", "value": demand.sfp_ports, "unit": "ports"},
        {"metric": "user_ports", "value": demand.user_ports, "unit": "ports"},
    ]
    for kind, (uplinks, ports) in demand.by_kind.items():
        ratio = ports // uplinks if uplinks else 0
        rows.append({"metric": f"uplinks[{kind}]", "value": uplinks, "unit": f"{ratio} user ports each"})
    write_records(path, ["metric", "value", "unit"], rows)


# -- figures ---------------------------------------------------------------------


def render_loop_layout(plant: FiberPlant, path: Union[str, Path]) -> None:
    """Chainage map: one track per loop with box positions and tap sides."""
    height = max(2.0, 1.2 * len(plant.loops) + 1.0)
    fig, ax = plt.subplots(figsize=(10, height), dpi=FIGURE_DPI)
    for i, cable in enumerate(plant.loops):
        y = len(plant.loops) - i
        ax.hlines(y, 0, cable.length_m, color="steelblue", linewidth=2)
        ax.annotate(
            f"{cable.id} ({cable.tube_count}x{cable.fibers_per_tube})",
            (0, y + 0.25),
            fontsize=8,
            color="steelblue",
        )
        for box in plant.boxes_on(cable.id):
            ax.plot([box.chainage_m], [y], marker="|", markersize=14, color="black")
            taps = sorted(
                ("A" if t.side == TapSide.TOWARD_A else "B") + str(t.tube_index)
                for t in box.taps
            )
            label = box.id if not taps else f"{box.id}\n{','.join(taps)}"
            ax.annotate(
                label,
                (box.chainage_m, y - 0.12),
                fontsize=7,
                ha="center",
                va="top",
            )
    ax.set_xlabel("chainage (m)")
    ax.set_yticks([])
    ax.set_ylim(0.2, len(plant.loops) + 0.9)
    ax.set_title(f"{plant.site_name}: loop layout")
    fig.tight_layout()
    fig.savefig(path, format="png")
    plt.close(fig)


def render_criticality(report: CriticalityReport, path: Union[str, Path], *, top: int = 20) -> None:
    entries = sorted(
        report.entries,
        key=lambda e: (-e.lost_user_ports, e.kind, e.target, e.detail),
    )[:top]
    labels = [f"{e.kind} {e.target} {e.detail}".strip() for e in entries]
    values = [e.lost_user_ports for e in entries]
    fig, ax = plt.subplots(figsize=(9, max(2.5, 0.35 * len(entries) + 1.2)), dpi=FIGURE_DPI)
    ax.barh(range(len(entries)), values, color="firebrick")
    ax.set_yticks(range(len(entries)))
    ax.set_yticklabels(labels, fontsize=7)
    ax.invert_yaxis()
    ax.set_xlabel("user ports lost")
    ax.set_title("single-failure criticality (worst first)")
    fig.tight_layout()
    fig.savefig(path, format="png")
    plt.close(fig)


def render_cost_breakdown(estimate: CostEstimate, path: Union[str, Path]) -> None:
    labels = [line.item for line in estimate.lines]
    values = [line.extended_eur for line in estimate.lines]
    fig, ax = plt.subplots(figsize=(8, max(2.5, 0.4 * len(labels) + 1.2)), dpi=FIGURE_DPI)
    ax.barh(range(len(labels)), values, color="seagreen")
    ax.set_yticks(range(len(labels)))
    ax.set_yticklabels(labels, fontsize=8)
    ax.invert_yaxis()
    ax.set_xlabel("EUR (excl. tax)")
    ax.set_title(f"cost breakdown, total {estimate.total_eur:.2f} EUR")
    fig.tight_layout()
    fig.savefig(path, format="png")
    plt.close(fig)


def estimator_assumptions(plant: FiberPlant) -> list[str]:
    """Defaults the reports rely on; echoed in every estimator header."""
    power = plant.power_model
    unpriced = sorted(
        length for length, price in plant.cost_model.patch_cord_by_length.items() if price == 0.0
    )
    out = [
        f"per-switch PoE budget {power.poe_budget_per_switch_w:g} W (not a published figure)",
        f"EEPoE saving {power.eepoe_saving_per_idle_port_w:g} W per idle port",
        f"night shutdown window {power.night_shutdown_hours:g} h/day",
        f"transformer-fed draw factor {power.transformer_consumption_factor:g}",
    ]
    if unpriced:
        out.append(f"patch cords {unpriced} m priced at 0.00 EUR (quote pending)")
    return out
