"""Cost roll-up, PoE power budgeting and energy/availability reporting.

Default prices and power figures are the published ones: duplex LX SFP
under 20 EUR, paired simplex set under 2x30 EUR, micro-switch ceiling
350 EUR, 54 V transformer around 50 EUR, fiber under 1 EUR/m, PoE++ 90 W
injected arriving as 70 W after 100 m, EEPoE saving 1-2 W per idle port,
transformer-fed switches drawing about twice their mains figure.  All
amounts are EUR excluding tax.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .allocate import AllocationPlan
from .errors import ClassError, MissingDataError, ReachError
from .model import (
    HOURS_PER_YEAR,
    CostModel,
    EdgeSwitch,
    FiberPlant,
    LinkMode,
    MtbfSpec,
    PowerModel,
    PowerSource,
)

COPPER_REACH_M = 100.0


# -- cost --------------------------------------------------------------------


@dataclass(frozen=True)
class CostLine:
    item: str
    quantity: float
    unit: str
    unit_price_eur: float

    @property
    def extended_eur(self) -> float:
        return self.quantity * self.unit_price_eur


@dataclass(frozen=True)
class CostEstimate:
    lines: tuple[CostLine, ...]
    total_eur: float

    def quantity(self, item: str) -> float:
        for line in self.lines:
            if line.item == item:
                return line.quantity
        return 0.0

    def sensitivity(self, item: str, delta_eur: float) -> float:
        """Total change if the item's unit price moves by delta_eur."""
        return self.quantity(item) * delta_eur


def cost_estimate(plant: FiberPlant, model: Optional[CostModel] = None) -> CostEstimate:
    """Line items for cable, SFPs, switches, transformers and patch cords.

    Strictly linear in every unit price; zero-quantity lines are omitted.
    """
    m = model if model is not None else plant.cost_model
    lines: list[CostLine] = []

    meters = sum(c.length_m for c in plant.loops)
    if meters:
        lines.append(CostLine("cable", meters, "m", m.fiber_per_m))

    duplex = sum(1 for up, _ in plant.all_uplinks() if up.mode == LinkMode.DUPLEX)
    simplex = sum(1 for up, _ in plant.all_uplinks() if up.mode == LinkMode.SIMPLEX)
    if duplex:
        lines.append(CostLine("duplex_sfp", 2 * duplex, "transceiver", m.duplex_sfp))
    if simplex:
        lines.append(CostLine("simplex_sfp_pair", simplex, "link", m.simplex_sfp_pair))

    if plant.switches:
        lines.append(CostLine("switch", len(plant.switches), "unit", m.micro_switch))
    transformers = sum(1 for s in plant.switches if s.power_source == PowerSource.TRANSFORMER54)
    if transformers:
        lines.append(CostLine("transformer_54v", transformers, "unit", m.transformer_54v))

    cords: dict[int, int] = {}
    for s in plant.switches:
        if s.patch_cord_m is not None:
            cords[s.patch_cord_m] = cords.get(s.patch_cord_m, 0) + 1
    for length in sorted(cords):
        price = m.patch_cord_by_length.get(length, 0.0)
        lines.append(CostLine(f"patch_cord_{length}m", cords[length], "unit", price))

    total = sum(line.extended_eur for line in lines)
    return CostEstimate(lines=tuple(lines), total_eur=total)


def plan_hardware_cost(plan: AllocationPlan, model: CostModel) -> float:
    """Transceiver spend to light a plan's new links (no new fiber is pulled).

    Converting one duplex link yields two simplex links, hence twice the
    paired-simplex price.
    """
    total = 0.0
    for planned in plan.created_uplinks:
        if planned.uplink.mode == LinkMode.DUPLEX:
            total += 2 * model.duplex_sfp
        else:
            total += model.simplex_sfp_pair
    return total


# -- PoE power ------------------------------------------------------------------


def delivered_power(
    injected_w: float,
    length_m: float,
    poe_class: str,
    model: Optional[PowerModel] = None,
) -> float:
    """Power at the outlet after a copper run of length_m.

    bt loses bt_derating_w_per_m (x quality factor) per meter: 90 W becomes
    70 W at 100 m.  af/at have no published derating and pass through flat.
    """
    m = model if model is not None else PowerModel()
    if poe_class not in m.poe_class_budget:
        raise ClassError(f"unknown PoE class {poe_class!r}")
    if not 0 <= length_m <= COPPER_REACH_M:
        raise ReachError(f"copper run {length_m:g} m outside 0..{COPPER_REACH_M:g} m")
    budget = m.poe_class_budget[poe_class]
    if injected_w > budget:
        raise ClassError(f"class {poe_class} injects at most {budget:g} W, not {injected_w:g} W")
    if poe_class == "bt":
        return max(0.0, injected_w - m.bt_derating_w_per_m * m.cable_quality_factor * length_m)
    return injected_w


@dataclass(frozen=True)
class PowerViolation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


def power_budget(
    switch: EdgeSwitch,
    demands: Sequence[tuple[float, float]],
    model: Optional[PowerModel] = None,
) -> list[PowerViolation]:
    """Check (watts, cord length) demands against the switch's PoE capacity.

    Every demand must be satisfiable by some class at its length, and the
    aggregate must fit the per-switch budget.  Empty list = ok.
    """
    m = model if model is not None else PowerModel()
    out: list[PowerViolation] = []
    if demands and not switch.poe_capable:
        out.append(PowerViolation(switch.id, "switch is not PoE capable"))
        return out

    for i, (watts, cord_m) in enumerate(demands):
        path = f"{switch.id}.demand[{i}]"
        if cord_m > COPPER_REACH_M:
            out.append(PowerViolation(path, f"cord {cord_m:g} m exceeds the {COPPER_REACH_M:g} m reach"))
            continue
        best = 0.0
        satisfied = False
        for poe_class in sorted(m.poe_class_budget, key=lambda c: m.poe_class_budget[c]):
            deliverable = delivered_power(m.poe_class_budget[poe_class], cord_m, poe_class, m)
            best = max(best, deliverable)
            if deliverable >= watts:
                satisfied = True
                break
        if not satisfied:
            out.append(
                PowerViolation(
                    path,
                    f"{watts:g} W at {cord_m:g} m exceeds the best class delivery of {best:g} W",
                )
            )

    total = sum(watts for watts, _ in demands)
    if total > m.poe_budget_per_switch_w:
        out.append(
            PowerViolation(
                switch.id,
                f"aggregate {total:g} W exceeds the per-switch budget of {m.poe_budget_per_switch_w:g} W",
            )
        )
    return out


# -- energy ----------------------------------------------------------------------


@dataclass(frozen=True)
class EnergyReport:
    switch_count: int
    base_draw_w: float
    transformer_overhead_w: float
    total_draw_w: float
    eepoe_savings_w: float
    night_savings_wh_per_day: float


def energy_report(plant: FiberPlant, model: Optional[PowerModel] = None) -> EnergyReport:
    """Fleet draw plus the two saving levers: EEPoE and night shutdown.

    Transformer-fed switches count at factor x base draw; the overhead line
    isolates the factor's surcharge.  Raises MissingDataError when a switch
    kind has no declared base draw.
    """
    m = model if model is not None else plant.power_model
    base = 0.0
    overhead = 0.0
    idle_ports = 0
    poe_load = 0.0
    for sw in plant.switches:
        draw = m.base_draw_w.get(sw.kind.value)
        if draw is None:
            raise MissingDataError(f"no base draw declared for switch kind {sw.kind.value!r}")
        base += draw
        if sw.power_source == PowerSource.TRANSFORMER54:
            overhead += (m.transformer_consumption_factor - 1.0) * draw
        idle_ports += max(0, sw.user_port_count - sw.active_ports)
        poe_load += sw.poe_load_w
    return EnergyReport(
        switch_count=len(plant.switches),
        base_draw_w=base,
        transformer_overhead_w=overhead,
        total_draw_w=base + overhead,
        eepoe_savings_w=idle_ports * m.eepoe_saving_per_idle_port_w,
        night_savings_wh_per_day=m.night_shutdown_hours * poe_load,
    )


# -- availability ----------------------------------------------------------------


@dataclass(frozen=True)
class AvailabilityReport:
    fleet_size: int
    expected_failures_per_year: float
    recommended_spares: int
    failures_by_kind: Mapping[str, float]


def availability_report(
    plant: FiberPlant,
    mtbf: Optional[MtbfSpec] = None,
    *,
    turnaround_years: float = 0.25,
) -> AvailabilityReport:
    """Expected annual failures (8766 h/year over MTBF) and spare stock.

    Spares cover the failures expected during one repair turnaround.
    """
    spec = mtbf if mtbf is not None else plant.mtbf_spec
    by_kind: dict[str, float] = {}
    for sw in plant.switches:
        rate = HOURS_PER_YEAR / spec.hours_for(sw.kind)
        by_kind[sw.kind.value] = by_kind.get(sw.kind.value, 0.0) + rate
    expected = sum(by_kind.values())
    spares = math.ceil(expected * turnaround_years) if expected > 0 else 0
    return AvailabilityReport(
        fleet_size=len(plant.switches),
        expected_failures_per_year=expected,
        recommended_spares=spares,
        failures_by_kind=dict(sorted(by_kind.items())),
    )
