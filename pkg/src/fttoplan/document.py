"""Canonical site-description documents (JSON, schema version "1").

One tree-structured format covers plants, demands, failure scenarios and
allocation plans.  Loading is strict: unknown keys, wrong types and
dangling ids are rejected with the offending path, and a loaded plant
always satisfies the structural invariants (or load_plant raises
InvariantError).
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any, Optional, Union

from .allocate import (
    AllocationPlan,
    BoxDemand,
    DemandSpec,
    PlannedTap,
    PlannedUplink,
    UplinkRequest,
)
from .errors import InvariantError, SchemaError, UnknownReferenceError
from .failsim import (
    BoxFail,
    CableCut,
    CoreFail,
    FailureEvent,
    FailureScenario,
    SwitchFail,
    TransceiverFail,
)
from .model import (
    BidiPolarity,
    BreakoutBox,
    ColorSchemeName,
    Connector,
    CoreSwitch,
    CostModel,
    EdgeSwitch,
    FiberGrade,
    FiberPlant,
    LinkMode,
    LoopCable,
    MtbfSpec,
    Office,
    Placement,
    Polish,
    PowerModel,
    PowerSource,
    SwitchKind,
    TapSide,
    TubeTap,
    Uplink,
)
from .validate import structural_violations
from .version import GENERATOR

SCHEMA_VERSION = "1"

Source = Union[dict, str, Path]


def _as_document(source: Source) -> dict:
    if isinstance(source, dict):
        return source
    text = Path(source).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SchemaError(f"{source}: top level must be an object")
    return doc


_REQUIRED = object()


def _check_keys(doc: dict, allowed: set[str], path: str) -> None:
    if not isinstance(doc, dict):
        raise SchemaError(f"{path}: expected an object, got {type(doc).__name__}")
    unknown = sorted(set(doc) - allowed)
    if unknown:
        raise SchemaError(f"{path}: unknown keys {unknown}")


def _get(doc: dict, key: str, kind, path: str, default=_REQUIRED):
    if key not in doc:
        if default is _REQUIRED:
            raise SchemaError(f"{path}: missing required key {key!r}")
        return default
    value = doc[key]
    if kind is float and isinstance(value, int) and not isinstance(value, bool):
        value = float(value)
    if kind is not None and not isinstance(value, kind):
        raise SchemaError(f"{path}.{key}: expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}")
    if kind is int and isinstance(value, bool):
        raise SchemaError(f"{path}.{key}: expected int, got bool")
    return value


def _enum(value: str, enum_cls, path: str):
    try:
        return enum_cls(str(value).lower())
    except ValueError:
        choices = ", ".join(e.value for e in enum_cls)
        raise SchemaError(f"{path}: {value!r} is not one of: {choices}") from None


def _check_schema_version(doc: dict, path: str) -> None:
    version = _get(doc, "schema_version", str, path)
    if version != SCHEMA_VERSION:
        raise SchemaError(f"{path}.schema_version: expected {SCHEMA_VERSION!r}, got {version!r}")


# -- plant ---------------------------------------------------------------------

_PLANT_KEYS = {
    "schema_version", "generator", "site", "color_scheme", "allow_same_box_double_tap",
    "loops", "cores", "boxes", "switches", "offices", "uplinks", "models",
}
_LOOP_KEYS = {
    "id", "code", "length_m", "tube_count", "fibers_per_tube", "end_a_core",
    "end_b_core", "fiber_grade", "bend_insensitive", "connector", "polish",
}
_CORE_KEYS = {"id", "sfp_port_count", "bridge_priority"}
_BOX_KEYS = {"id", "loop", "chainage_m", "port_polish", "taps", "annotations"}
_TAP_KEYS = {"tube", "side", "fibers"}
_SWITCH_KEYS = {
    "id", "kind", "office", "box", "power_source", "internal_rj45", "poe_capable",
    "placement", "cross_link_peer", "patch_cord_m", "active_ports", "poe_load_w",
    "uplink", "annotations",
}
_UPLINK_KEYS = {"mode", "tube", "side", "fibers", "core", "core_port", "bidi_polarity", "hybrid_cord", "kind"}
_SPARE_KEYS = _UPLINK_KEYS | {"box"}
_OFFICE_KEYS = {"id", "building", "floor", "room"}
_MODEL_KEYS = {"cost", "power", "mtbf"}
_COST_KEYS = {"fiber_per_m", "duplex_sfp", "simplex_sfp_pair", "micro_switch", "transformer_54v", "patch_cord_by_length"}
_POWER_KEYS = {
    "poe_class_budget", "bt_derating_w_per_m", "cable_quality_factor",
    "eepoe_saving_per_idle_port_w", "transformer_consumption_factor",
    "poe_budget_per_switch_w", "night_shutdown_hours", "base_draw_w",
}
_MTBF_KEYS = {"default_hours", "hours_by_kind"}


def _parse_fibers(value: Any, path: str) -> tuple[int, ...]:
    if not isinstance(value, list) or not all(isinstance(f, int) and not isinstance(f, bool) for f in value):
        raise SchemaError(f"{path}: expected a list of fiber indices")
    return tuple(value)


def _parse_annotations(doc: dict, path: str) -> tuple[tuple[str, str], ...]:
    raw = _get(doc, "annotations", dict, path, default={})
    out = []
    for key, value in raw.items():
        if not isinstance(value, str):
            raise SchemaError(f"{path}.annotations.{key}: expected a string")
        out.append((str(key), value))
    return tuple(out)


def _num_map(doc: dict, path: str, *, int_keys: bool = False) -> dict:
    out = {}
    for key, value in doc.items():
        if int_keys:
            try:
                key = int(key)
            except (TypeError, ValueError):
                raise SchemaError(f"{path}: bad key {key!r}, expected an integer") from None
        else:
            key = str(key)
        if not isinstance(value, (int, float)) or isinstance(value, bool):
            raise SchemaError(f"{path}.{key}: expected a number, got {type(value).__name__}")
        out[key] = float(value)
    return out


def _parse_uplink(doc: dict, box_id: str, path: str, *, spare: bool) -> Uplink:
    _check_keys(doc, _SPARE_KEYS if spare else _UPLINK_KEYS, path)
    mode = _enum(_get(doc, "mode", str, path), LinkMode, f"{path}.mode")
    polarity_raw = _get(doc, "bidi_polarity", str, path, default=None)
    if polarity_raw is not None:
        polarity: Optional[BidiPolarity] = _enum(polarity_raw, BidiPolarity, f"{path}.bidi_polarity")
    else:
        polarity = BidiPolarity.UP if mode == LinkMode.SIMPLEX else None
    return Uplink(
        mode=mode,
        box=box_id,
        tube_index=_get(doc, "tube", int, path),
        side=_enum(_get(doc, "side", str, path), TapSide, f"{path}.side"),
        fibers=_parse_fibers(_get(doc, "fibers", list, path), f"{path}.fibers"),
        core=_get(doc, "core", str, path),
        core_port=_get(doc, "core_port", int, path),
        bidi_polarity=polarity,
        hybrid_cord=_get(doc, "hybrid_cord", bool, path, default=False),
        kind=_enum(_get(doc, "kind", str, path, default=SwitchKind.MICRO4.value), SwitchKind, f"{path}.kind"),
    )


def _parse_models(doc: dict, path: str) -> tuple[CostModel, PowerModel, MtbfSpec]:
    _check_keys(doc, _MODEL_KEYS, path)
    cost_doc = _get(doc, "cost", dict, path, default={})
    _check_keys(cost_doc, _COST_KEYS, f"{path}.cost")
    defaults = CostModel()
    cords_doc = _get(cost_doc, "patch_cord_by_length", dict, f"{path}.cost", default=None)
    if cords_doc is None:
        cords = dict(defaults.patch_cord_by_length)
    else:
        cords = _num_map(cords_doc, f"{path}.cost.patch_cord_by_length", int_keys=True)
    cost = CostModel(
        fiber_per_m=_get(cost_doc, "fiber_per_m", float, f"{path}.cost", default=defaults.fiber_per_m),
        duplex_sfp=_get(cost_doc, "duplex_sfp", float, f"{path}.cost", default=defaults.duplex_sfp),
        simplex_sfp_pair=_get(cost_doc, "simplex_sfp_pair", float, f"{path}.cost", default=defaults.simplex_sfp_pair),
        micro_switch=_get(cost_doc, "micro_switch", float, f"{path}.cost", default=defaults.micro_switch),
        transformer_54v=_get(cost_doc, "transformer_54v", float, f"{path}.cost", default=defaults.transformer_54v),
        patch_cord_by_length=cords,
    )

    power_doc = _get(doc, "power", dict, path, default={})
    _check_keys(power_doc, _POWER_KEYS, f"{path}.power")
    power_defaults = PowerModel()
    budgets_doc = _get(power_doc, "poe_class_budget", dict, f"{path}.power", default=None)
    budgets = (
        dict(power_defaults.poe_class_budget)
        if budgets_doc is None
        else _num_map(budgets_doc, f"{path}.power.poe_class_budget")
    )
    draws_doc = _get(power_doc, "base_draw_w", dict, f"{path}.power", default={})
    power = PowerModel(
        poe_class_budget=budgets,
        bt_derating_w_per_m=_get(power_doc, "bt_derating_w_per_m", float, f"{path}.power", default=power_defaults.bt_derating_w_per_m),
        cable_quality_factor=_get(power_doc, "cable_quality_factor", float, f"{path}.power", default=power_defaults.cable_quality_factor),
        eepoe_saving_per_idle_port_w=_get(power_doc, "eepoe_saving_per_idle_port_w", float, f"{path}.power", default=power_defaults.eepoe_saving_per_idle_port_w),
        transformer_consumption_factor=_get(power_doc, "transformer_consumption_factor", float, f"{path}.power", default=power_defaults.transformer_consumption_factor),
        poe_budget_per_switch_w=_get(power_doc, "poe_budget_per_switch_w", float, f"{path}.power", default=power_defaults.poe_budget_per_switch_w),
        night_shutdown_hours=_get(power_doc, "night_shutdown_hours", float, f"{path}.power", default=power_defaults.night_shutdown_hours),
        base_draw_w=_num_map(draws_doc, f"{path}.power.base_draw_w"),
    )

    mtbf_doc = _get(doc, "mtbf", dict, path, default={})
    _check_keys(mtbf_doc, _MTBF_KEYS, f"{path}.mtbf")
    mtbf_defaults = MtbfSpec()
    hours_doc = _get(mtbf_doc, "hours_by_kind", dict, f"{path}.mtbf", default={})
    mtbf = MtbfSpec(
        hours_by_kind=_num_map(hours_doc, f"{path}.mtbf.hours_by_kind"),
        default_hours=_get(mtbf_doc, "default_hours", float, f"{path}.mtbf", default=mtbf_defaults.default_hours),
    )
    return cost, power, mtbf


def load_plant(source: Source) -> FiberPlant:
    """Parse, cross-reference and structurally validate a plant document."""
    doc = _as_document(source)
    path = "plant"
    _check_keys(doc, _PLANT_KEYS, path)
    _check_schema_version(doc, path)
    site = _get(doc, "site", str, path)

    loops = []
    for i, loop_doc in enumerate(_get(doc, "loops", list, path, default=[])):
        lp = f"loops[{i}]"
        _check_keys(loop_doc, _LOOP_KEYS, lp)
        loops.append(
            LoopCable(
                id=_get(loop_doc, "id", str, lp),
                code=_get(loop_doc, "code", str, lp, default=""),
                length_m=_get(loop_doc, "length_m", float, lp),
                tube_count=_get(loop_doc, "tube_count", int, lp),
                fibers_per_tube=_get(loop_doc, "fibers_per_tube", int, lp),
                end_a_core=_get(loop_doc, "end_a_core", str, lp),
                end_b_core=_get(loop_doc, "end_b_core", str, lp),
                fiber_grade=_enum(_get(loop_doc, "fiber_grade", str, lp, default="os1"), FiberGrade, f"{lp}.fiber_grade"),
                bend_insensitive=_get(loop_doc, "bend_insensitive", bool, lp, default=True),
                connector=_enum(_get(loop_doc, "connector", str, lp, default="lc"), Connector, f"{lp}.connector"),
                polish=_enum(_get(loop_doc, "polish", str, lp, default="upc"), Polish, f"{lp}.polish"),
            )
        )

    cores = []
    for i, core_doc in enumerate(_get(doc, "cores", list, path, default=[])):
        cp = f"cores[{i}]"
        _check_keys(core_doc, _CORE_KEYS, cp)
        cores.append(
            CoreSwitch(
                id=_get(core_doc, "id", str, cp),
                sfp_port_count=_get(core_doc, "sfp_port_count", int, cp),
                bridge_priority=_get(core_doc, "bridge_priority", int, cp, default=32768),
            )
        )

    boxes = []
    for i, box_doc in enumerate(_get(doc, "boxes", list, path, default=[])):
        bp = f"boxes[{i}]"
        _check_keys(box_doc, _BOX_KEYS, bp)
        box_id = _get(box_doc, "id", str, bp)
        cable_id = _get(box_doc, "loop", str, bp)
        taps = []
        for j, tap_doc in enumerate(_get(box_doc, "taps", list, bp, default=[])):
            tp = f"{bp}.taps[{j}]"
            _check_keys(tap_doc, _TAP_KEYS, tp)
            tube = _get(tap_doc, "tube", int, tp)
            side = _enum(_get(tap_doc, "side", str, tp), TapSide, f"{tp}.side")
            fibers_raw = _get(tap_doc, "fibers", list, tp, default=None)
            if fibers_raw is None:
                cable = next((c for c in loops if c.id == cable_id), None)
                if cable is None:
                    raise UnknownReferenceError(f"{bp}: unknown loop {cable_id!r}")
                fibers = tuple(range(1, cable.fibers_per_tube + 1))
            else:
                fibers = _parse_fibers(fibers_raw, f"{tp}.fibers")
            taps.append(TubeTap(tube, side, fibers))
        boxes.append(
            BreakoutBox(
                id=box_id,
                cable=cable_id,
                chainage_m=_get(box_doc, "chainage_m", float, bp),
                port_polish=_enum(_get(box_doc, "port_polish", str, bp, default="upc"), Polish, f"{bp}.port_polish"),
                taps=tuple(taps),
                annotations=_parse_annotations(box_doc, bp),
            )
        )

    offices = []
    for i, office_doc in enumerate(_get(doc, "offices", list, path, default=[])):
        op = f"offices[{i}]"
        _check_keys(office_doc, _OFFICE_KEYS, op)
        offices.append(
            Office(
                id=_get(office_doc, "id", str, op),
                building=_get(office_doc, "building", str, op, default=""),
                floor=_get(office_doc, "floor", str, op, default=""),
                room=_get(office_doc, "room", str, op, default=""),
            )
        )

    switches = []
    for i, sw_doc in enumerate(_get(doc, "switches", list, path, default=[])):
        sp = f"switches[{i}]"
        _check_keys(sw_doc, _SWITCH_KEYS, sp)
        sw_id = _get(sw_doc, "id", str, sp)
        box_id = _get(sw_doc, "box", str, sp)
        uplink_doc = _get(sw_doc, "uplink", dict, sp, default=None)
        uplink = _parse_uplink(uplink_doc, box_id, f"{sp}.uplink", spare=False) if uplink_doc else None
        switches.append(
            EdgeSwitch(
                id=sw_id,
                kind=_enum(_get(sw_doc, "kind", str, sp), SwitchKind, f"{sp}.kind"),
                office=_get(sw_doc, "office", str, sp),
                box=box_id,
                uplink=uplink,
                internal_rj45=_get(sw_doc, "internal_rj45", bool, sp, default=True),
                poe_capable=_get(sw_doc, "poe_capable", bool, sp, default=True),
                power_source=_enum(_get(sw_doc, "power_source", str, sp, default="mains230"), PowerSource, f"{sp}.power_source"),
                cross_link_peer=_get(sw_doc, "cross_link_peer", str, sp, default=None),
                placement=_enum(_get(sw_doc, "placement", str, sp, default="bureau"), Placement, f"{sp}.placement"),
                patch_cord_m=_get(sw_doc, "patch_cord_m", int, sp, default=None),
                active_ports=_get(sw_doc, "active_ports", int, sp, default=0),
                poe_load_w=_get(sw_doc, "poe_load_w", float, sp, default=0.0),
                annotations=_parse_annotations(sw_doc, sp),
            )
        )

    spares = []
    for i, up_doc in enumerate(_get(doc, "uplinks", list, path, default=[])):
        up_path = f"uplinks[{i}]"
        box_id = _get(up_doc, "box", str, up_path)
        spares.append(_parse_uplink(up_doc, box_id, up_path, spare=True))

    cost, power, mtbf = _parse_models(_get(doc, "models", dict, path, default={}), "models")

    plant = FiberPlant(
        site_name=site,
        loops=tuple(loops),
        cores=tuple(cores),
        boxes=tuple(boxes),
        switches=tuple(switches),
        offices=tuple(offices),
        spare_uplinks=tuple(spares),
        cost_model=cost,
        power_model=power,
        mtbf_spec=mtbf,
        color_scheme=_enum(_get(doc, "color_scheme", str, path, default="fotag"), ColorSchemeName, f"{path}.color_scheme"),
        allow_same_box_double_tap=_get(doc, "allow_same_box_double_tap", bool, path, default=False),
    )

    _check_references(plant)
    problems = structural_violations(plant)
    errors = [v for v in problems if v.severity == "error"]
    if errors:
        first = errors[0]
        raise InvariantError(f"{first.path}: {first.message}")
    return plant


def _check_references(plant: FiberPlant) -> None:
    """Dangling ids are reported before invariant checking, with their path."""
    for cable in plant.loops:
        for end, core in (("end_a_core", cable.end_a_core), ("end_b_core", cable.end_b_core)):
            if core not in plant.core_by_id:
                raise UnknownReferenceError(f"loops[{cable.id}].{end}: unknown core {core!r}")
    for box in plant.boxes:
        if box.cable not in plant.loop_by_id:
            raise UnknownReferenceError(f"boxes[{box.id}]: unknown loop {box.cable!r}")
    for sw in plant.switches:
        if sw.box not in plant.box_by_id:
            raise UnknownReferenceError(f"switches[{sw.id}]: unknown box {sw.box!r}")
        if sw.office not in plant.office_by_id:
            raise UnknownReferenceError(f"switches[{sw.id}]: unknown office {sw.office!r}")
        if sw.cross_link_peer is not None and sw.cross_link_peer not in plant.switch_by_id:
            raise UnknownReferenceError(f"switches[{sw.id}]: unknown cross-link peer {sw.cross_link_peer!r}")
        if sw.uplink is not None and sw.uplink.core not in plant.core_by_id:
            raise UnknownReferenceError(f"switches[{sw.id}].uplink: unknown core {sw.uplink.core!r}")
    for i, up in enumerate(plant.spare_uplinks):
        if up.box not in plant.box_by_id:
            raise UnknownReferenceError(f"uplinks[{i}]: unknown box {up.box!r}")
        if up.core not in plant.core_by_id:
            raise UnknownReferenceError(f"uplinks[{i}]: unknown core {up.core!r}")


# -- dumping ----------------------------------------------------------------------


def _dump_uplink(up: Uplink, *, spare: bool) -> dict:
    out: dict[str, Any] = {}
    if spare:
        out["box"] = up.box
    out.update(
        {
            "mode": up.mode.value,
            "tube": up.tube_index,
            "side": up.side.value,
            "fibers": list(up.fibers),
            "core": up.core,
            "core_port": up.core_port,
            "hybrid_cord": up.hybrid_cord,
            "kind": up.kind.value,
        }
    )
    if up.bidi_polarity is not None:
        out["bidi_polarity"] = up.bidi_polarity.value
    return out


def dump_plant(plant: FiberPlant) -> dict:
    """Canonical document for a plant; load_plant(dump_plant(p)) == p."""
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": GENERATOR,
        "site": plant.site_name,
        "color_scheme": plant.color_scheme.value,
        "allow_same_box_double_tap": plant.allow_same_box_double_tap,
        "loops": [
            {
                "id": c.id,
                "code": c.code,
                "length_m": c.length_m,
                "tube_count": c.tube_count,
                "fibers_per_tube": c.fibers_per_tube,
                "end_a_core": c.end_a_core,
                "end_b_core": c.end_b_core,
                "fiber_grade": c.fiber_grade.value,
                "bend_insensitive": c.bend_insensitive,
                "connector": c.connector.value,
                "polish": c.polish.value,
            }
            for c in plant.loops
        ],
        "cores": [
            {"id": c.id, "sfp_port_count": c.sfp_port_count, "bridge_priority": c.bridge_priority}
            for c in plant.cores
        ],
        "boxes": [
            {
                "id": b.id,
                "loop": b.cable,
                "chainage_m": b.chainage_m,
                "port_polish": b.port_polish.value,
                "taps": [
                    {"tube": t.tube_index, "side": t.side.value, "fibers": list(t.spliced_fibers)}
                    for t in b.taps
                ],
                **({"annotations": dict(b.annotations)} if b.annotations else {}),
            }
            for b in plant.boxes
        ],
        "switches": [
            {
                "id": s.id,
                "kind": s.kind.value,
                "office": s.office,
                "box": s.box,
                "power_source": s.power_source.value,
                "internal_rj45": s.internal_rj45,
                "poe_capable": s.poe_capable,
                "placement": s.placement.value,
                **({"cross_link_peer": s.cross_link_peer} if s.cross_link_peer else {}),
                **({"patch_cord_m": s.patch_cord_m} if s.patch_cord_m is not None else {}),
                "active_ports": s.active_ports,
                "poe_load_w": s.poe_load_w,
                **({"annotations": dict(s.annotations)} if s.annotations else {}),
                **({"uplink": _dump_uplink(s.uplink, spare=False)} if s.uplink else {}),
            }
            for s in plant.switches
        ],
        "offices": [
            {"id": o.id, "building": o.building, "floor": o.floor, "room": o.room}
            for o in plant.offices
        ],
        "uplinks": [_dump_uplink(u, spare=True) for u in plant.spare_uplinks],
        "models": {
            "cost": {
                "fiber_per_m": plant.cost_model.fiber_per_m,
                "duplex_sfp": plant.cost_model.duplex_sfp,
                "simplex_sfp_pair": plant.cost_model.simplex_sfp_pair,
                "micro_switch": plant.cost_model.micro_switch,
                "transformer_54v": plant.cost_model.transformer_54v,
                "patch_cord_by_length": {
                    str(k): v for k, v in sorted(plant.cost_model.patch_cord_by_length.items())
                },
            },
            "power": {
                "poe_class_budget": dict(sorted(plant.power_model.poe_class_budget.items())),
                "bt_derating_w_per_m": plant.power_model.bt_derating_w_per_m,
                "cable_quality_factor": plant.power_model.cable_quality_factor,
                "eepoe_saving_per_idle_port_w": plant.power_model.eepoe_saving_per_idle_port_w,
                "transformer_consumption_factor": plant.power_model.transformer_consumption_factor,
                "poe_budget_per_switch_w": plant.power_model.poe_budget_per_switch_w,
                "night_shutdown_hours": plant.power_model.night_shutdown_hours,
                "base_draw_w": dict(sorted(plant.power_model.base_draw_w.items())),
            },
            "mtbf": {
                "default_hours": plant.mtbf_spec.default_hours,
                "hours_by_kind": dict(sorted(plant.mtbf_spec.hours_by_kind.items())),
            },
        },
    }


# -- demand ------------------------------------------------------------------------

_DEMAND_KEYS = {"schema_version", "generator", "demands", "reserve_target"}
_DEMAND_ENTRY_KEYS = {"box", "uplinks"}
_DEMAND_UPLINK_KEYS = {"mode", "kind", "count"}


def load_demand(source: Source) -> DemandSpec:
    doc = _as_document(source)
    path = "demand"
    _check_keys(doc, _DEMAND_KEYS, path)
    _check_schema_version(doc, path)
    demands = []
    for i, entry in enumerate(_get(doc, "demands", list, path, default=[])):
        ep = f"demands[{i}]"
        _check_keys(entry, _DEMAND_ENTRY_KEYS, ep)
        requests = []
        for j, req in enumerate(_get(entry, "uplinks", list, ep)):
            rp = f"{ep}.uplinks[{j}]"
            _check_keys(req, _DEMAND_UPLINK_KEYS, rp)
            count = _get(req, "count", int, rp, default=1)
            if count < 1:
                raise SchemaError(f"{rp}.count: must be >= 1")
            request = UplinkRequest(
                mode=_enum(_get(req, "mode", str, rp), LinkMode, f"{rp}.mode"),
                kind=_enum(_get(req, "kind", str, rp, default="micro4"), SwitchKind, f"{rp}.kind"),
            )
            requests.extend([request] * count)
        demands.append(BoxDemand(box=_get(entry, "box", str, ep), uplinks=tuple(requests)))
    reserve = _get(doc, "reserve_target", float, path, default=DemandSpec().reserve_target)
    if not 0 <= reserve < 1:
        raise SchemaError(f"{path}.reserve_target: {reserve} outside [0, 1)")
    return DemandSpec(demands=tuple(demands), reserve_target=reserve)


# -- failure scenarios ----------------------------------------------------------------

_SCENARIO_KEYS = {"schema_version", "generator", "events"}
_EVENT_KEYS_BY_TYPE = {
    "cable_cut": {"type", "loop", "chainage_m"},
    "transceiver_fail": {"type", "switch", "end"},
    "core_fail": {"type", "core"},
    "box_fail": {"type", "box"},
    "switch_fail": {"type", "switch"},
}


def load_scenario(source: Source) -> FailureScenario:
    doc = _as_document(source)
    path = "scenario"
    _check_keys(doc, _SCENARIO_KEYS, path)
    _check_schema_version(doc, path)
    events: list[FailureEvent] = []
    for i, entry in enumerate(_get(doc, "events", list, path, default=[])):
        ep = f"events[{i}]"
        event_type = _get(entry, "type", str, ep)
        if event_type not in _EVENT_KEYS_BY_TYPE:
            raise SchemaError(f"{ep}.type: unknown event type {event_type!r}")
        _check_keys(entry, _EVENT_KEYS_BY_TYPE[event_type], ep)
        if event_type == "cable_cut":
            events.append(CableCut(_get(entry, "loop", str, ep), _get(entry, "chainage_m", float, ep)))
        elif event_type == "transceiver_fail":
            events.append(TransceiverFail(_get(entry, "switch", str, ep), _get(entry, "end", str, ep, default="switch")))
        elif event_type == "core_fail":
            events.append(CoreFail(_get(entry, "core", str, ep)))
        elif event_type == "box_fail":
            events.append(BoxFail(_get(entry, "box", str, ep)))
        else:
            events.append(SwitchFail(_get(entry, "switch", str, ep)))
    return FailureScenario(events=tuple(events))


# -- allocation plans --------------------------------------------------------------------

_PLAN_KEYS = {"schema_version", "generator", "plan"}
_PLAN_BODY_KEYS = {"taps", "uplinks", "removed_uplinks", "reserve_by_loop"}
_PLAN_TAP_KEYS = {"box", "tube", "side", "fibers"}
_PLAN_UPLINK_KEYS = _SPARE_KEYS | {"attach_to"}


def plan_to_document(plan: AllocationPlan) -> dict:
    """Replayable document for an allocation plan."""
    return {
        "schema_version": SCHEMA_VERSION,
        "generator": GENERATOR,
        "plan": {
            "taps": [
                {"box": t.box, "tube": t.tube_index, "side": t.side.value, "fibers": list(t.spliced_fibers)}
                for t in plan.created_taps
            ],
            "uplinks": [
                {
                    **_dump_uplink(p.uplink, spare=True),
                    **({"attach_to": p.attach_to} if p.attach_to else {}),
                }
                for p in plan.created_uplinks
            ],
            "removed_uplinks": [_dump_uplink(u, spare=True) for u in plan.removed_uplinks],
            "reserve_by_loop": {k: v for k, v in sorted(plan.reserve_by_loop.items())},
        },
    }


def load_plan(source: Source) -> AllocationPlan:
    doc = _as_document(source)
    path = "plan"
    _check_keys(doc, _PLAN_KEYS, path)
    _check_schema_version(doc, path)
    body = _get(doc, "plan", dict, path)
    _check_keys(body, _PLAN_BODY_KEYS, path)
    taps = []
    for i, tap_doc in enumerate(_get(body, "taps", list, path, default=[])):
        tp = f"{path}.taps[{i}]"
        _check_keys(tap_doc, _PLAN_TAP_KEYS, tp)
        taps.append(
            PlannedTap(
                box=_get(tap_doc, "box", str, tp),
                tube_index=_get(tap_doc, "tube", int, tp),
                side=_enum(_get(tap_doc, "side", str, tp), TapSide, f"{tp}.side"),
                spliced_fibers=_parse_fibers(_get(tap_doc, "fibers", list, tp), f"{tp}.fibers"),
            )
        )
    uplinks = []
    for i, up_doc in enumerate(_get(body, "uplinks", list, path, default=[])):
        up_path = f"{path}.uplinks[{i}]"
        attach = up_doc.get("attach_to")
        parse_doc = {k: v for k, v in up_doc.items() if k != "attach_to"}
        box_id = _get(parse_doc, "box", str, up_path)
        uplinks.append(PlannedUplink(_parse_uplink(parse_doc, box_id, up_path, spare=True), attach_to=attach))
    removed = []
    for i, up_doc in enumerate(_get(body, "removed_uplinks", list, path, default=[])):
        up_path = f"{path}.removed_uplinks[{i}]"
        box_id = _get(up_doc, "box", str, up_path)
        removed.append(_parse_uplink(up_doc, box_id, up_path, spare=True))
    reserve = {
        str(k): float(v)
        for k, v in _get(body, "reserve_by_loop", dict, path, default={}).items()
    }
    return AllocationPlan(
        created_taps=tuple(taps),
        created_uplinks=tuple(uplinks),
        removed_uplinks=tuple(removed),
        reserve_by_loop=reserve,
    )


def write_document(doc: dict, path: Union[str, Path]) -> None:
    """Serialize with a stable layout (UTF-8, 2-space indent, trailing newline)."""
    Path(path).write_text(json.dumps(doc, indent=2, ensure_ascii=False) + "\n", encoding="utf-8")
