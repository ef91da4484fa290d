import dataclasses
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fttoplan.allocate import convert_duplex_to_simplex
from fttoplan.errors import ClassError, MissingDataError, ReachError
from fttoplan.estimate import (
    availability_report,
    cost_estimate,
    delivered_power,
    energy_report,
    plan_hardware_cost,
    power_budget,
)
from fttoplan.model import (
    EdgeSwitch,
    FiberPlant,
    MtbfSpec,
    PowerModel,
    PowerSource,
    SwitchKind,
)

from conftest import make_plant


def fleet_plant(n_switches: int, *, kind="micro4", mtbf_hours=100_000.0, power_source="mains230"):
    switches = [
        EdgeSwitch(
            id=f"sw{i:04d}",
            kind=SwitchKind(kind),
            office=f"o{i:04d}",
            box="bx1",
            power_source=PowerSource(power_source),
        )
        for i in range(n_switches)
    ]
    base = make_plant(
        loops=(("loop1", 1000.0, 12, 12),),
        boxes=(("bx1", "loop1", 500.0),),
    )
    return dataclasses.replace(
        base,
        switches=tuple(switches),
        mtbf_spec=MtbfSpec(hours_by_kind={kind: mtbf_hours}),
        power_model=PowerModel(base_draw_w={"micro4": 7.0, "mini8": 8.0}),
    )


# -- cost ---------------------------------------------------------------------


def test_switch_price_sensitivity_at_scale():
    plant = fleet_plant(800)
    estimate = cost_estimate(plant)
    assert estimate.sensitivity("switch", 25.0) == 20_000.0
    assert estimate.sensitivity("switch", -25.0) == -20_000.0


def test_empty_plant_costs_nothing():
    plant = FiberPlant(site_name="empty")
    estimate = cost_estimate(plant)
    assert estimate.lines == ()
    assert estimate.total_eur == 0.0


def test_cost_lines_reference_plant(ref_plant):
    estimate = cost_estimate(ref_plant)
    by_item = {line.item: line for line in estimate.lines}
    assert by_item["cable"].quantity == 300.0
    assert by_item["duplex_sfp"].quantity == 6  # three duplex links, two ends each
    assert by_item["simplex_sfp_pair"].quantity == 1
    assert by_item["switch"].quantity == 4
    assert by_item["transformer_54v"].quantity == 1
    assert by_item["patch_cord_15m"].quantity == 2
    assert estimate.total_eur == sum(line.extended_eur for line in estimate.lines)


def test_conversion_hardware_cost(ref_plant):
    model = ref_plant.cost_model
    plan = convert_duplex_to_simplex(ref_plant, selection=["sw-ref-a101-b1"])
    # one duplex link converted: two simplex links, each one paired set
    assert plan_hardware_cost(plan, model) == 2 * model.simplex_sfp_pair == 120.0


@settings(max_examples=60)
@given(
    factor=st.floats(min_value=0.1, max_value=10.0, allow_nan=False),
    item=st.sampled_from(["cable", "duplex_sfp", "switch", "transformer_54v"]),
)
def test_cost_linear_in_each_unit_price(factor, item):
    from fttoplan.document import load_plant
    from fttoplan.goldens import golden_path

    plant = load_plant(golden_path("ref_loop12x12.json"))
    base = cost_estimate(plant)
    model = plant.cost_model
    fields = {
        "cable": "fiber_per_m",
        "duplex_sfp": "duplex_sfp",
        "switch": "micro_switch",
        "transformer_54v": "transformer_54v",
    }
    scaled_model = dataclasses.replace(model, **{fields[item]: getattr(model, fields[item]) * factor})
    scaled = cost_estimate(plant, scaled_model)
    base_line = next(l for l in base.lines if l.item == item)
    scaled_line = next(l for l in scaled.lines if l.item == item)
    assert scaled_line.extended_eur == pytest.approx(base_line.extended_eur * factor)
    others_base = base.total_eur - base_line.extended_eur
    others_scaled = scaled.total_eur - scaled_line.extended_eur
    assert others_scaled == pytest.approx(others_base)


def test_cost_permutation_invariant():
    plant = fleet_plant(25)
    shuffled = dataclasses.replace(plant, switches=tuple(reversed(plant.switches)))
    assert cost_estimate(plant).total_eur == cost_estimate(shuffled).total_eur


# -- PoE delivery ----------------------------------------------------------------


def test_delivered_power_published_endpoints():
    assert delivered_power(90.0, 100.0, "bt") == 70.0
    assert delivered_power(90.0, 0.0, "bt") == 90.0
    assert delivered_power(90.0, 50.0, "bt") == 80.0


def test_delivered_power_flat_for_af_at():
    assert delivered_power(15.4, 100.0, "af") == 15.4
    assert delivered_power(30.0, 77.0, "at") == 30.0


def test_delivered_power_monotone_non_increasing():
    previous = float("inf")
    for length in range(0, 101):
        value = delivered_power(90.0, float(length), "bt")
        assert value <= previous
        previous = value


def test_delivered_power_errors():
    with pytest.raises(ReachError):
        delivered_power(90.0, 101.0, "bt")
    with pytest.raises(ReachError):
        delivered_power(90.0, -1.0, "bt")
    with pytest.raises(ClassError):
        delivered_power(90.0, 10.0, "at")  # 90 W through a 30 W class
    with pytest.raises(ClassError):
        delivered_power(10.0, 10.0, "poe++")


def test_quality_factor_steepens_derating():
    model = PowerModel(cable_quality_factor=2.0)
    assert delivered_power(90.0, 50.0, "bt", model) == 70.0


# -- power budget -----------------------------------------------------------------


def poe_switch(**kwargs):
    return EdgeSwitch(id="sw1", kind=SwitchKind.MICRO4, office="o1", box="bx1", **kwargs)


def test_budget_exact_derated_limit_is_ok():
    assert power_budget(poe_switch(), [(70.0, 100.0)]) == []


def test_budget_one_watt_over_is_violation():
    violations = power_budget(poe_switch(), [(71.0, 100.0)])
    assert len(violations) == 1
    assert "exceeds the best class delivery of 70 W" in violations[0].message


def test_budget_empty_demands():
    assert power_budget(poe_switch(), []) == []


def test_budget_aggregate_limit():
    violations = power_budget(poe_switch(), [(50.0, 10.0), (50.0, 10.0)])
    assert len(violations) == 1
    assert "aggregate" in violations[0].message


def test_budget_requires_poe():
    violations = power_budget(poe_switch(poe_capable=False), [(10.0, 10.0)])
    assert violations and "not PoE capable" in violations[0].message


def test_budget_small_demand_fits_lower_class():
    assert power_budget(poe_switch(), [(15.0, 90.0)]) == []


# -- energy -----------------------------------------------------------------------


def test_eepoe_savings_four_idle_ports():
    plant = fleet_plant(1)
    sw = dataclasses.replace(plant.switches[0], active_ports=0)  # all 4 ports idle
    plant = dataclasses.replace(plant, switches=(sw,))
    report = energy_report(plant)
    assert report.eepoe_savings_w == 4.0


def test_transformer_doubles_draw():
    mains = fleet_plant(1, power_source="mains230")
    transformer = fleet_plant(1, power_source="transformer54")
    assert energy_report(mains).total_draw_w == 7.0
    assert energy_report(transformer).total_draw_w == 14.0
    assert energy_report(transformer).transformer_overhead_w == 7.0


def test_energy_empty_fleet():
    plant = fleet_plant(0)
    report = energy_report(plant)
    assert report.switch_count == 0
    assert report.total_draw_w == 0.0
    assert report.eepoe_savings_w == 0.0
    assert report.night_savings_wh_per_day == 0.0


def test_energy_missing_base_draw():
    plant = fleet_plant(1)
    plant = dataclasses.replace(plant, power_model=PowerModel(base_draw_w={}))
    with pytest.raises(MissingDataError):
        energy_report(plant)


def test_night_savings_from_poe_loads(ref_plant):
    report = energy_report(ref_plant)
    poe_total = sum(sw.poe_load_w for sw in ref_plant.switches)
    assert report.night_savings_wh_per_day == ref_plant.power_model.night_shutdown_hours * poe_total


# -- availability ------------------------------------------------------------------


def test_expected_failures_low_mtbf():
    plant = fleet_plant(100, mtbf_hours=100_000.0)
    report = availability_report(plant)
    assert report.expected_failures_per_year == pytest.approx(8.766)
    assert report.recommended_spares == 3  # ceil(8.766 * 0.25)


def test_expected_failures_high_mtbf():
    plant = fleet_plant(100, mtbf_hours=750_000.0)
    report = availability_report(plant)
    assert report.expected_failures_per_year == pytest.approx(1.1688)
    assert report.recommended_spares == 1


def test_availability_empty_fleet():
    report = availability_report(fleet_plant(0))
    assert report.expected_failures_per_year == 0.0
    assert report.recommended_spares == 0


def test_availability_scales_linearly():
    small = availability_report(fleet_plant(10))
    large = availability_report(fleet_plant(40))
    assert large.expected_failures_per_year == pytest.approx(4 * small.expected_failures_per_year)


def test_fleet_totals_permutation_invariant():
    rng = random.Random(3)
    plant = fleet_plant(20)
    mixed = list(plant.switches)
    rng.shuffle(mixed)
    shuffled = dataclasses.replace(plant, switches=tuple(mixed))
    assert energy_report(plant) == energy_report(shuffled)
    assert availability_report(plant) == availability_report(shuffled)
