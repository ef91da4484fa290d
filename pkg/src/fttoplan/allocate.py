"""Tap and fiber allocation under the loop's directional-reuse rule.

Every tube can be cut once per direction; a toward-A tap must sit at or
before the toward-B tap of the same tube.  The allocator packs requested
uplinks into taps box by box, then places taps on tubes: demands are paired
two-per-tube whenever the chainage ordering allows it (lower chainage takes
the A side), leftover taps take the side matching their half of the cable.
Lowest tube indices are consumed first, matching the field practice of
cutting tubes in color order.

All planning functions are pure: they return plans or new plants and never
mutate their inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional

from .errors import (
    CapacityError,
    ModeError,
    PolarityError,
    RangeError,
    ReserveError,
    UnknownReferenceError,
)
from .model import (
    USER_PORTS_BY_KIND,
    BidiPolarity,
    BreakoutBox,
    CoreSwitch,
    EdgeSwitch,
    FiberPlant,
    LinkMode,
    LoopCable,
    SwitchKind,
    TapSide,
    TubeTap,
    Uplink,
    free_tube_sides,
    tapped_sides,
)

DEFAULT_RESERVE_TARGET = 0.25  # middle of the advised 20-30 % band


@dataclass(frozen=True)
class UplinkRequest:
    mode: LinkMode
    kind: SwitchKind = SwitchKind.MICRO4


@dataclass(frozen=True)
class BoxDemand:
    box: str
    uplinks: tuple[UplinkRequest, ...]


@dataclass(frozen=True)
class DemandSpec:
    demands: tuple[BoxDemand, ...] = ()
    reserve_target: float = DEFAULT_RESERVE_TARGET


@dataclass(frozen=True)
class PlannedTap:
    box: str
    tube_index: int
    side: TapSide
    spliced_fibers: tuple[int, ...]


@dataclass(frozen=True)
class PlannedUplink:
    uplink: Uplink
    attach_to: Optional[str] = None  # switch id; None leaves a spare slot


@dataclass(frozen=True)
class AllocationPlan:
    created_taps: tuple[PlannedTap, ...] = ()
    created_uplinks: tuple[PlannedUplink, ...] = ()
    removed_uplinks: tuple[Uplink, ...] = ()  # replaced by created ones
    reserve_by_loop: Mapping[str, float] = field(default_factory=dict)

    @property
    def uplink_count(self) -> int:
        return len(self.created_uplinks)


def check_bidi_pairing(core_end: BidiPolarity, switch_end: BidiPolarity) -> None:
    """Both ends of a simplex fiber must carry complementary BiDi variants."""
    if core_end == switch_end:
        raise PolarityError(
            f"simplex pair mismatched: {core_end.value} at both ends of the fiber"
        )


def apply_plan(plant: FiberPlant, plan: AllocationPlan) -> FiberPlant:
    """Return a new plant with the plan's taps and uplinks in place."""
    boxes_by_id = {b.id: b for b in plant.boxes}
    for planned in plan.created_taps:
        box = boxes_by_id[planned.box]
        tap = TubeTap(planned.tube_index, planned.side, planned.spliced_fibers)
        boxes_by_id[box.id] = replace(box, taps=box.taps + (tap,))

    removed = set(plan.removed_uplinks)
    switches = []
    for sw in plant.switches:
        if sw.uplink is not None and sw.uplink in removed:
            sw = replace(sw, uplink=None)
        switches.append(sw)
    spares = [up for up in plant.spare_uplinks if up not in removed]

    switch_index = {sw.id: i for i, sw in enumerate(switches)}
    for planned in plan.created_uplinks:
        if planned.attach_to is None:
            spares.append(planned.uplink)
        else:
            i = switch_index[planned.attach_to]
            switches[i] = replace(switches[i], uplink=planned.uplink)

    return replace(
        plant,
        boxes=tuple(boxes_by_id[b.id] for b in plant.boxes),
        switches=tuple(switches),
        spare_uplinks=tuple(spares),
    )


# -- low-level pickers -------------------------------------------------------


def _free_pairs(spliced: tuple[int, ...], used: set[int]) -> list[tuple[int, int]]:
    """Free conventional pairs (2k-1, 2k) fully spliced and unconsumed."""
    have = set(spliced)
    out = []
    for first in sorted(have):
        if first % 2 == 1 and first + 1 in have:
            if first not in used and first + 1 not in used:
                out.append((first, first + 1))
    return out


def _free_singles(spliced: tuple[int, ...], used: set[int]) -> list[int]:
    return [f for f in sorted(spliced) if f not in used]


def _used_core_ports(plant: FiberPlant) -> dict[str, set[int]]:
    used: dict[str, set[int]] = {c.id: set() for c in plant.cores}
    for up, _ in plant.all_uplinks():
        used.setdefault(up.core, set()).add(up.core_port)
    return used


def _take_core_port(used: dict[str, set[int]], core: CoreSwitch) -> int:
    ports = used.setdefault(core.id, set())
    for idx in range(core.sfp_port_count):
        if idx not in ports:
            ports.add(idx)
            return idx
    raise CapacityError(f"core {core.id} has no free SFP port")


def _end_core(plant: FiberPlant, cable: LoopCable, side: TapSide) -> CoreSwitch:
    core_id = cable.end_a_core if side == TapSide.TOWARD_A else cable.end_b_core
    return plant.core_by_id[core_id]


def assign_uplink(
    plant: FiberPlant,
    box_id: str,
    mode: LinkMode,
    *,
    kind: SwitchKind = SwitchKind.MICRO4,
) -> Uplink:
    """Assign one uplink on an existing tap of the box.

    Duplex takes the lowest free conventional pair, simplex the lowest free
    fiber (core end Up, switch end Down).  The core SFP port is the lowest
    free index on the core serving the tap's cable end.  The returned uplink
    is not yet applied; use apply_plan.
    """
    box = plant.box_by_id.get(box_id)
    if box is None:
        raise UnknownReferenceError(f"unknown box {box_id!r}")
    cable = plant.loop_by_id[box.cable]
    consumed = plant.consumed_fibers()
    used_ports = _used_core_ports(plant)

    taps = sorted(box.taps, key=lambda t: (t.tube_index, t.side.value))
    for tap in taps:
        used = consumed.get((box.id, tap.tube_index, tap.side), set())
        if mode == LinkMode.DUPLEX:
            pairs = _free_pairs(tap.spliced_fibers, used)
            if not pairs:
                continue
            fibers: tuple[int, ...] = pairs[0]
            polarity = None
        else:
            singles = _free_singles(tap.spliced_fibers, used)
            if not singles:
                continue
            fibers = (singles[0],)
            polarity = BidiPolarity.UP
        core = _end_core(plant, cable, tap.side)
        port = _take_core_port(used_ports, core)
        return Uplink(
            mode=mode,
            box=box.id,
            tube_index=tap.tube_index,
            side=tap.side,
            fibers=fibers,
            core=core.id,
            core_port=port,
            bidi_polarity=polarity,
            kind=kind,
        )
    need = "a free conventional pair" if mode == LinkMode.DUPLEX else "a free fiber"
    raise CapacityError(f"no tap at box {box_id} with {need}")


# -- whole-demand allocation --------------------------------------------------


@dataclass
class _TapSpec:
    """A tap to create: a box position plus the uplinks packed onto it."""

    box: BreakoutBox
    seq: int  # creation order within the cable, for determinism
    fiber_count: int
    assigned: list[tuple[UplinkRequest, tuple[int, ...]]] = field(default_factory=list)
    used: set[int] = field(default_factory=set)

    def try_pack(self, request: UplinkRequest) -> bool:
        if request.mode == LinkMode.DUPLEX:
            pairs = _free_pairs(tuple(range(1, self.fiber_count + 1)), self.used)
            if not pairs:
                return False
            fibers: tuple[int, ...] = pairs[0]
        else:
            singles = _free_singles(tuple(range(1, self.fiber_count + 1)), self.used)
            if not singles:
                return False
            fibers = (singles[0],)
        self.used.update(fibers)
        self.assigned.append((request, fibers))
        return True


def _compatible(chainage_a: float, chainage_b: float, allow_same_box: bool) -> bool:
    """Can a toward-A tap at chainage_a coexist with a toward-B tap at chainage_b?"""
    return chainage_a < chainage_b or (chainage_a == chainage_b and allow_same_box)


def _preferred_side(box: BreakoutBox, cable: LoopCable) -> TapSide:
    return TapSide.TOWARD_A if box.chainage_m <= cable.length_m / 2 else TapSide.TOWARD_B


def _pair_specs(
    specs: list[_TapSpec], allow_same_box: bool
) -> tuple[list[tuple[_TapSpec, _TapSpec]], list[_TapSpec]]:
    """Split specs (sorted by chainage) into A/B pairs plus leftovers.

    Pairing two taps on one tube needs the A-side chainage at or before the
    B-side one; any two taps of distinct boxes can pair (the earlier box
    takes the A side).  Same-box pairs need the double-tap flag.
    """
    k = len(specs)
    if k == 0:
        return [], []

    counts: dict[str, int] = {}
    for s in specs:
        counts[s.box.id] = counts.get(s.box.id, 0) + 1
    mmax = max(counts.values())

    if not allow_same_box and mmax > k - mmax:
        dominant = min(b for b, n in counts.items() if n == mmax)
        dom = [s for s in specs if s.box.id == dominant]
        others = [s for s in specs if s.box.id != dominant]
        pairs = []
        for other, d in zip(others, dom):
            if other.box.chainage_m < d.box.chainage_m:
                pairs.append((other, d))
            else:
                pairs.append((d, other))
        return pairs, dom[len(others):]

    h = math.ceil(k / 2)
    pairs = [(specs[i], specs[h + i]) for i in range(k - h)]
    solos = specs[k - h : h]
    return pairs, solos


def allocate(
    plant: FiberPlant, demand: DemandSpec, *, strict_reserve: bool = False
) -> AllocationPlan:
    """Satisfy the whole demand or fail atomically.

    Free fibers on existing taps are consumed first; remaining requests get
    new taps placed by the pairing strategy above.  Raises CapacityError
    when slots, fibers or core ports run out and ReserveError when strict
    mode is on and a cable would fall below the reserve target.
    """
    if not 0 <= demand.reserve_target < 1:
        raise RangeError(f"reserve_target {demand.reserve_target} outside [0, 1)")
    for entry in demand.demands:
        if entry.box not in plant.box_by_id:
            raise UnknownReferenceError(f"demand references unknown box {entry.box!r}")

    consumed = {k: set(v) for k, v in plant.consumed_fibers().items()}
    used_ports = _used_core_ports(plant)
    planned_taps: list[PlannedTap] = []
    planned_uplinks: list[PlannedUplink] = []

    for cable in plant.loops:
        requests_by_box: dict[str, list[UplinkRequest]] = {}
        box_order: list[BreakoutBox] = []
        for entry in demand.demands:
            box = plant.box_by_id[entry.box]
            if box.cable != cable.id:
                continue
            if box.id not in requests_by_box:
                requests_by_box[box.id] = []
                box_order.append(box)
            requests_by_box[box.id].extend(entry.uplinks)
        if not box_order:
            continue
        box_order.sort(key=lambda b: b.chainage_m)

        specs: list[_TapSpec] = []
        for box in box_order:
            residual: list[UplinkRequest] = []
            for request in requests_by_box[box.id]:
                if request.mode == LinkMode.DUPLEX and cable.fibers_per_tube < 2:
                    raise CapacityError(
                        f"cable {cable.id} has {cable.fibers_per_tube}-fiber tubes; duplex needs a pair"
                    )
                placed = _place_on_existing(plant, cable, box, request, consumed, used_ports)
                if placed is not None:
                    planned_uplinks.append(placed)
                else:
                    residual.append(request)
            box_specs: list[_TapSpec] = []
            for request in residual:
                if not any(s.try_pack(request) for s in box_specs):
                    spec = _TapSpec(box, len(specs) + len(box_specs), cable.fibers_per_tube)
                    if not spec.try_pack(request):
                        raise CapacityError(
                            f"request {request.mode.value} does not fit an empty {cable.fibers_per_tube}-fiber tap"
                        )
                    box_specs.append(spec)
            specs.extend(box_specs)

        specs.sort(key=lambda s: (s.box.chainage_m, s.seq))
        placements = _place_specs(plant, cable, specs)

        for spec in specs:
            tube, side = placements[id(spec)]
            all_fibers = tuple(range(1, cable.fibers_per_tube + 1))
            planned_taps.append(PlannedTap(spec.box.id, tube, side, all_fibers))
            for request, fibers in spec.assigned:
                core = _end_core(plant, cable, side)
                port = _take_core_port(used_ports, core)
                polarity = BidiPolarity.UP if request.mode == LinkMode.SIMPLEX else None
                planned_uplinks.append(
                    PlannedUplink(
                        Uplink(
                            mode=request.mode,
                            box=spec.box.id,
                            tube_index=tube,
                            side=side,
                            fibers=fibers,
                            core=core.id,
                            core_port=port,
                            bidi_polarity=polarity,
                            kind=request.kind,
                        )
                    )
                )

    plan = AllocationPlan(
        created_taps=tuple(planned_taps),
        created_uplinks=tuple(planned_uplinks),
        reserve_by_loop=_reserve_after(plant, planned_taps),
    )
    if strict_reserve:
        for cable_id, reserve in plan.reserve_by_loop.items():
            if reserve < demand.reserve_target:
                raise ReserveError(
                    f"loop {cable_id} reserve {reserve:.1%} would fall below target "
                    f"{demand.reserve_target:.0%}"
                )
    return plan


def _place_on_existing(
    plant: FiberPlant,
    cable: LoopCable,
    box: BreakoutBox,
    request: UplinkRequest,
    consumed: dict[tuple[str, int, TapSide], set[int]],
    used_ports: dict[str, set[int]],
) -> Optional[PlannedUplink]:
    """Fill free fibers of the box's existing taps, lowest tube/side first."""
    for tap in sorted(box.taps, key=lambda t: (t.tube_index, t.side.value)):
        used = consumed.setdefault((box.id, tap.tube_index, tap.side), set())
        if request.mode == LinkMode.DUPLEX:
            pairs = _free_pairs(tap.spliced_fibers, used)
            if not pairs:
                continue
            fibers: tuple[int, ...] = pairs[0]
            polarity = None
        else:
            singles = _free_singles(tap.spliced_fibers, used)
            if not singles:
                continue
            fibers = (singles[0],)
            polarity = BidiPolarity.UP
        used.update(fibers)
        core = _end_core(plant, cable, tap.side)
        port = _take_core_port(used_ports, core)
        return PlannedUplink(
            Uplink(
                mode=request.mode,
                box=box.id,
                tube_index=tap.tube_index,
                side=tap.side,
                fibers=fibers,
                core=core.id,
                core_port=port,
                bidi_polarity=polarity,
                kind=request.kind,
            )
        )
    return None


def _place_specs(
    plant: FiberPlant, cable: LoopCable, specs: list[_TapSpec]
) -> dict[int, tuple[int, TapSide]]:
    """Choose a (tube, side) for every new tap; raise CapacityError if stuck."""
    allow = plant.allow_same_box_double_tap
    existing = tapped_sides(plant, cable.id)
    existing_box: dict[tuple[int, TapSide], str] = {}
    for b, tap in plant.taps_on(cable.id):
        existing_box[(tap.tube_index, tap.side)] = b.id

    placements: dict[int, tuple[int, TapSide]] = {}

    def half_used_tubes() -> list[tuple[int, TapSide, float, str]]:
        """Tubes with exactly one existing tap: (tube, free side, other chainage, other box)."""
        out = []
        for tube in range(1, cable.tube_count + 1):
            a = (tube, TapSide.TOWARD_A) in existing
            b = (tube, TapSide.TOWARD_B) in existing
            if a == b:
                continue
            occupied = TapSide.TOWARD_A if a else TapSide.TOWARD_B
            free = TapSide.TOWARD_B if a else TapSide.TOWARD_A
            out.append((tube, free, existing[(tube, occupied)], existing_box[(tube, occupied)]))
        return out

    # pass 1: reuse half-used tubes when the ordering rule allows it
    remaining: list[_TapSpec] = []
    for spec in specs:
        chosen = None
        for tube, free_side, other_chainage, other_box in half_used_tubes():
            same_box = other_box == spec.box.id
            if free_side == TapSide.TOWARD_A:
                ok = _compatible(spec.box.chainage_m, other_chainage, allow and same_box)
            else:
                ok = _compatible(other_chainage, spec.box.chainage_m, allow and same_box)
            if ok:
                chosen = (tube, free_side)
                break
        if chosen is None:
            remaining.append(spec)
        else:
            placements[id(spec)] = chosen
            existing[chosen] = spec.box.chainage_m
            existing_box[chosen] = spec.box.id

    # pass 2: pair what is left onto fully free tubes
    pairs, solos = _pair_specs(remaining, allow)
    free_tubes = [
        tube
        for tube in range(1, cable.tube_count + 1)
        if (tube, TapSide.TOWARD_A) not in existing and (tube, TapSide.TOWARD_B) not in existing
    ]

    units: list[tuple[int, tuple]] = []
    order = {id(s): i for i, s in enumerate(remaining)}
    for a_spec, b_spec in pairs:
        units.append((min(order[id(a_spec)], order[id(b_spec)]), ("pair", a_spec, b_spec)))
    for solo in solos:
        units.append((order[id(solo)], ("solo", solo)))
    units.sort(key=lambda u: u[0])

    for _, unit in units:
        if unit[0] == "pair":
            _, a_spec, b_spec = unit
            if not free_tubes:
                raise CapacityError(
                    f"loop {cable.id}: no free tube left for taps at "
                    f"{a_spec.box.id} and {b_spec.box.id}"
                )
            tube = free_tubes.pop(0)
            placements[id(a_spec)] = (tube, TapSide.TOWARD_A)
            placements[id(b_spec)] = (tube, TapSide.TOWARD_B)
            existing[(tube, TapSide.TOWARD_A)] = a_spec.box.chainage_m
            existing[(tube, TapSide.TOWARD_B)] = b_spec.box.chainage_m
            existing_box[(tube, TapSide.TOWARD_A)] = a_spec.box.id
            existing_box[(tube, TapSide.TOWARD_B)] = b_spec.box.id
        else:
            _, solo = unit
            preferred = _preferred_side(solo.box, cable)
            placed = False
            for side in (preferred, TapSide.TOWARD_B if preferred == TapSide.TOWARD_A else TapSide.TOWARD_A):
                for tube in range(1, cable.tube_count + 1):
                    if (tube, side) in existing:
                        continue
                    other = (tube, TapSide.TOWARD_B if side == TapSide.TOWARD_A else TapSide.TOWARD_A)
                    if other in existing:
                        same_box = existing_box[other] == solo.box.id
                        if side == TapSide.TOWARD_A:
                            ok = _compatible(solo.box.chainage_m, existing[other], allow and same_box)
                        else:
                            ok = _compatible(existing[other], solo.box.chainage_m, allow and same_box)
                        if not ok:
                            continue
                    placements[id(solo)] = (tube, side)
                    existing[(tube, side)] = solo.box.chainage_m
                    existing_box[(tube, side)] = solo.box.id
                    if tube in free_tubes:
                        free_tubes.remove(tube)
                    placed = True
                    break
                if placed:
                    break
            if not placed:
                raise CapacityError(f"loop {cable.id}: no (tube, side) slot left for a tap at {solo.box.id}")
    return placements


def _reserve_after(plant: FiberPlant, planned: list[PlannedTap]) -> dict[str, float]:
    new_by_cable: dict[str, int] = {}
    for tap in planned:
        cable_id = plant.box_by_id[tap.box].cable
        new_by_cable[cable_id] = new_by_cable.get(cable_id, 0) + 1
    out = {}
    for cable in plant.loops:
        total = 2 * cable.tube_count
        free = len(free_tube_sides(plant, cable.id)) - new_by_cable.get(cable.id, 0)
        out[cable.id] = free / total if total else 1.0
    return out


# -- duplex-to-simplex conversion ---------------------------------------------


def convert_duplex_to_simplex(
    plant: FiberPlant, selection: Optional[Iterable[str]] = None
) -> AllocationPlan:
    """Swap duplex links for pairs of simplex links on the same fibers.

    Each duplex link over (i, j) becomes a simplex link on i (keeping the
    switch and core port) plus a spare simplex slot on j with a fresh core
    port.  No new fiber is pulled; link capacity exactly doubles.
    `selection` lists switch ids; None converts every duplex uplink.
    """
    targets: list[tuple[Uplink, Optional[EdgeSwitch]]] = []
    if selection is None:
        for up, sw in plant.all_uplinks():
            if up.mode == LinkMode.DUPLEX:
                targets.append((up, sw))
    else:
        for switch_id in selection:
            sw = plant.switch_by_id.get(switch_id)
            if sw is None:
                raise UnknownReferenceError(f"unknown switch {switch_id!r}")
            if sw.uplink is None:
                raise ModeError(f"switch {switch_id} has no uplink to convert")
            if sw.uplink.mode != LinkMode.DUPLEX:
                raise ModeError(f"uplink of {switch_id} is already simplex")
            targets.append((sw.uplink, sw))

    used_ports = _used_core_ports(plant)
    removed: list[Uplink] = []
    created: list[PlannedUplink] = []
    for old, sw in targets:
        keep_fiber, spare_fiber = old.fibers
        kind = sw.kind if sw is not None else old.kind
        kept = replace(
            old,
            mode=LinkMode.SIMPLEX,
            fibers=(keep_fiber,),
            bidi_polarity=BidiPolarity.UP,
            kind=kind,
        )
        check_bidi_pairing(kept.bidi_polarity, BidiPolarity.DOWN)
        core = plant.core_by_id[old.core]
        spare = replace(
            old,
            mode=LinkMode.SIMPLEX,
            fibers=(spare_fiber,),
            core_port=_take_core_port(used_ports, core),
            bidi_polarity=BidiPolarity.UP,
            kind=kind,
        )
        removed.append(old)
        created.append(PlannedUplink(kept, attach_to=sw.id if sw is not None else None))
        created.append(PlannedUplink(spare, attach_to=None))

    return AllocationPlan(
        created_uplinks=tuple(created),
        removed_uplinks=tuple(removed),
        reserve_by_loop=_reserve_after(plant, []),
    )


# -- reporting ----------------------------------------------------------------


@dataclass(frozen=True)
class ReserveEntry:
    cable: str
    free_tube_sides: int
    total_tube_sides: int
    tube_side_reserve: float
    fiber_reserve_in_tapped: float
    below_floor: bool


def reserve_report(plant: FiberPlant, *, floor: float = 0.20) -> list[ReserveEntry]:
    """Per-cable reserve: free (tube, side) slots plus free fibers in cut tubes."""
    consumed = plant.consumed_fibers()
    out = []
    for cable in plant.loops:
        total = 2 * cable.tube_count
        free = len(free_tube_sides(plant, cable.id))
        spliced = 0
        used = 0
        for box, tap in plant.taps_on(cable.id):
            spliced += len(tap.spliced_fibers)
            used += len(consumed.get((box.id, tap.tube_index, tap.side), set()))
        reserve = free / total if total else 1.0
        fiber_reserve = (spliced - used) / spliced if spliced else 1.0
        out.append(
            ReserveEntry(
                cable=cable.id,
                free_tube_sides=free,
                total_tube_sides=total,
                tube_side_reserve=reserve,
                fiber_reserve_in_tapped=fiber_reserve,
                below_floor=reserve < floor,
            )
        )
    return out


@dataclass(frozen=True)
class CorePortDemand:
    sfp_ports: int
    user_ports: int
    by_kind: Mapping[str, tuple[int, int]]  # kind -> (uplinks, user ports)


def core_port_demand(plant: FiberPlant) -> CorePortDemand:
    """SFP ports needed (one per uplink) and the user ports they serve.

    Each uplink feeds the user ports of its switch kind; spare slots count
    as their planned kind, so the figure reads as served-or-ready ports.
    """
    by_kind: dict[str, list[int]] = {}
    for up, sw in plant.all_uplinks():
        kind = sw.kind if sw is not None else up.kind
        entry = by_kind.setdefault(kind.value, [0, 0])
        entry[0] += 1
        entry[1] += USER_PORTS_BY_KIND[kind]
    total_uplinks = sum(v[0] for v in by_kind.values())
    total_ports = sum(v[1] for v in by_kind.values())
    return CorePortDemand(
        sfp_ports=total_uplinks,
        user_ports=total_ports,
        by_kind={k: (v[0], v[1]) for k, v in sorted(by_kind.items())},
    )
