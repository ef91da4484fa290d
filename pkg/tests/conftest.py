"""Shared plant builders and brute-force oracles."""

from __future__ import annotations

import itertools

import pytest

from fttoplan.model import (
    BreakoutBox,
    CoreSwitch,
    EdgeSwitch,
    FiberPlant,
    LinkMode,
    Office,
    SwitchKind,
    TapSide,
    TubeTap,
    Uplink,
)

A = TapSide.TOWARD_A
B = TapSide.TOWARD_B


def make_plant(
    *,
    loops=((("loop1"), 100.0, 1, 12),),
    boxes=(),
    taps=(),
    switches=(),
    cores=1,
    sfp_ports=64,
    allow_same_box_double_tap=False,
    site="test",
):
    """Compact plant factory.

    loops: (id, length_m, tube_count, fibers_per_tube)
    boxes: (id, loop_id, chainage_m)
    taps: (box_id, tube, side) — splices the whole tube
    switches: dicts with id/box/uplink keys, see _make_switch
    """
    from fttoplan.model import LoopCable

    core_objs = tuple(
        CoreSwitch(id=f"core{i + 1}", sfp_port_count=sfp_ports, bridge_priority=i)
        for i in range(cores)
    )
    loop_objs = tuple(
        LoopCable(
            id=lid,
            length_m=length,
            tube_count=tubes,
            fibers_per_tube=fibers,
            end_a_core=core_objs[0].id,
            end_b_core=core_objs[-1].id,
        )
        for lid, length, tubes, fibers in loops
    )
    loop_by_id = {c.id: c for c in loop_objs}

    taps_by_box = {}
    for box_id, tube, side in taps:
        taps_by_box.setdefault(box_id, []).append((tube, side))
    box_objs = []
    for box_id, loop_id, chainage in boxes:
        fibers = tuple(range(1, loop_by_id[loop_id].fibers_per_tube + 1))
        tap_objs = tuple(
            TubeTap(tube, side, fibers) for tube, side in taps_by_box.get(box_id, [])
        )
        box_objs.append(BreakoutBox(id=box_id, cable=loop_id, chainage_m=chainage, taps=tap_objs))

    switch_objs = []
    offices = {}
    for spec in switches:
        sw = _make_switch(spec)
        offices.setdefault(sw.office, Office(id=sw.office, room=sw.office))
        switch_objs.append(sw)

    return FiberPlant(
        site_name=site,
        loops=loop_objs,
        cores=core_objs,
        boxes=tuple(box_objs),
        switches=tuple(switch_objs),
        offices=tuple(offices.values()),
        allow_same_box_double_tap=allow_same_box_double_tap,
    )


def _make_switch(spec: dict) -> EdgeSwitch:
    uplink = spec.get("uplink")
    if uplink is not None and not isinstance(uplink, Uplink):
        mode = LinkMode(uplink.get("mode", "duplex"))
        uplink = Uplink(
            mode=mode,
            box=spec["box"],
            tube_index=uplink.get("tube", 1),
            side=TapSide(uplink.get("side", "toward_a")),
            fibers=tuple(uplink.get("fibers", (1, 2) if mode == LinkMode.DUPLEX else (1,))),
            core=uplink.get("core", "core1"),
            core_port=uplink["core_port"],
        )
    return EdgeSwitch(
        id=spec["id"],
        kind=SwitchKind(spec.get("kind", "micro4")),
        office=spec.get("office", spec["id"] + "-office"),
        box=spec["box"],
        uplink=uplink,
        cross_link_peer=spec.get("cross_link_peer"),
        power_source=spec.get("power_source", "mains230"),
        patch_cord_m=spec.get("patch_cord_m"),
        active_ports=spec.get("active_ports", 0),
        poe_load_w=spec.get("poe_load_w", 0.0),
    )


def desk_pair_plant(*, cross_link=True, chainage_a=10.0, chainage_b=90.0, length=100.0):
    """The redundancy pattern: two boxes tapped toward opposite ends,
    one switch each, optionally copper cross-linked."""
    switches = [
        {
            "id": "sw1",
            "box": "bx1",
            "cross_link_peer": "sw2" if cross_link else None,
            "uplink": {"mode": "duplex", "tube": 1, "side": "toward_a", "fibers": (1, 2), "core_port": 0},
        },
        {
            "id": "sw2",
            "box": "bx2",
            "cross_link_peer": "sw1" if cross_link else None,
            "uplink": {"mode": "duplex", "tube": 1, "side": "toward_b", "fibers": (1, 2), "core_port": 1},
        },
    ]
    return make_plant(
        loops=(("loop1", length, 2, 12),),
        boxes=(("bx1", "loop1", chainage_a), ("bx2", "loop1", chainage_b)),
        taps=(("bx1", 1, A), ("bx2", 1, B)),
        switches=switches,
    )


# -- oracles -----------------------------------------------------------------


def live_segment(side: TapSide, chainage: float, length: float) -> tuple[float, float]:
    """Open interval of positive measure the tap physically occupies."""
    if side == A:
        return (0.0, chainage)
    return (chainage, length)


def overlapping_taps(plant: FiberPlant) -> list[tuple]:
    """Brute-force segment-overlap oracle over every tap pair of every tube."""
    conflicts = []
    for cable in plant.loops:
        per_tube: dict[int, list] = {}
        for box, tap in plant.taps_on(cable.id):
            per_tube.setdefault(tap.tube_index, []).append((box, tap))
        for tube, entries in per_tube.items():
            for (b1, t1), (b2, t2) in itertools.combinations(entries, 2):
                lo1, hi1 = live_segment(t1.side, b1.chainage_m, cable.length_m)
                lo2, hi2 = live_segment(t2.side, b2.chainage_m, cable.length_m)
                if max(lo1, lo2) < min(hi1, hi2):
                    conflicts.append((cable.id, tube, b1.id, b2.id))
    return conflicts


def illegal_double_taps(plant: FiberPlant) -> list[tuple]:
    """Same-box both-sides taps that the plant flag does not allow."""
    out = []
    for cable in plant.loops:
        per_tube: dict[int, set] = {}
        for box, tap in plant.taps_on(cable.id):
            per_tube.setdefault(tap.tube_index, set()).add((box.id, tap.side))
        for tube, entries in per_tube.items():
            boxes_a = {b for b, s in entries if s == A}
            boxes_b = {b for b, s in entries if s == B}
            doubled = boxes_a & boxes_b
            if doubled and not plant.allow_same_box_double_tap:
                out.append((cable.id, tube, tuple(sorted(doubled))))
    return out


def brute_force_min_tubes(tube_count: int, demands: list[tuple[str, float]], allow_same_box: bool):
    """Minimal tube count over every legal (tube, side) assignment, or None.

    demands: (box id, chainage) per tap to place.  Exponential; keep small.
    """
    slots = [(t, s) for t in range(1, tube_count + 1) for s in (A, B)]
    best = None
    for assignment in itertools.product(slots, repeat=len(demands)):
        if len(set(assignment)) != len(assignment):
            continue
        per_tube: dict[int, dict] = {}
        for (tube, side), (box, chainage) in zip(assignment, demands):
            per_tube.setdefault(tube, {})[side] = (box, chainage)
        ok = True
        for sides in per_tube.values():
            if A in sides and B in sides:
                (box_a, pa), (box_b, pb) = sides[A], sides[B]
                if pa > pb:
                    ok = False
                elif pa == pb and not (allow_same_box and box_a == box_b):
                    ok = False
            if not ok:
                break
        if ok:
            used = len(per_tube)
            if best is None or used < best:
                best = used
    return best


@pytest.fixture
def ref_plant():
    from fttoplan.document import load_plant
    from fttoplan.goldens import golden_path

    return load_plant(golden_path("ref_loop12x12.json"))


@pytest.fixture
def legi_plant():
    from fttoplan.document import load_plant
    from fttoplan.goldens import golden_path

    return load_plant(golden_path("legi.json"))
