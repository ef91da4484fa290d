"""Structural and policy validation of a fiber plant.

Structural checks cover the hard model invariants (reference integrity,
chainage ordering, tube-tap directional rules, fiber and core-port
consumption).  Policy checks produce warnings for things the field guides
advise against without forbidding: low reserve, same-box double taps,
polish mismatches on un-declared hybrid cords.
"""

from __future__ import annotations

from dataclasses import dataclass

from .model import (
    FiberPlant,
    LinkMode,
    Polish,
    TapSide,
    free_tube_sides,
)

RESERVE_WARNING_FLOOR = 0.20


@dataclass(frozen=True)
class Violation:
    severity: str  # "error" | "warning"
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.severity}: {self.path}: {self.message}"


def _error(path: str, message: str) -> Violation:
    return Violation("error", path, message)


def _warning(path: str, message: str) -> Violation:
    return Violation("warning", path, message)


def structural_violations(plant: FiberPlant) -> list[Violation]:
    """Hard invariant violations; an empty list means the model is coherent."""
    out: list[Violation] = []

    # unique ids per collection
    for name, ids in (
        ("loops", [c.id for c in plant.loops]),
        ("cores", [c.id for c in plant.cores]),
        ("boxes", [b.id for b in plant.boxes]),
        ("switches", [s.id for s in plant.switches]),
        ("offices", [o.id for o in plant.offices]),
    ):
        seen: set[str] = set()
        for i in ids:
            if i in seen:
                out.append(_error(f"{name}[{i}]", "duplicate id"))
            seen.add(i)

    if not 1 <= len(plant.cores) <= 2:
        out.append(_error("cores", f"core count must be 1 or 2, got {len(plant.cores)}"))

    rooms: dict[str, str] = {}
    for office in plant.offices:
        code = office.room_code
        if code in rooms:
            out.append(_error(f"offices[{office.id}]", f"room code {code!r} already used by office {rooms[code]}"))
        else:
            rooms[code] = office.id

    for cable in plant.loops:
        path = f"loops[{cable.id}]"
        if cable.length_m <= 0:
            out.append(_error(path, "length_m must be > 0"))
        if cable.tube_count < 1 or cable.fibers_per_tube < 1:
            out.append(_error(path, "tube_count and fibers_per_tube must be >= 1"))
        for end, core in (("end_a_core", cable.end_a_core), ("end_b_core", cable.end_b_core)):
            if core not in plant.core_by_id:
                out.append(_error(f"{path}.{end}", f"unknown core {core!r}"))

    # box chainages: in range and, in declared order, strictly increasing per cable
    previous_by_cable: dict[str, float] = {}
    for box in plant.boxes:
        cable = plant.loop_by_id.get(box.cable)
        if cable is None:
            continue
        path = f"boxes[{box.id}]"
        if not 0 < box.chainage_m < cable.length_m:
            out.append(_error(path, f"chainage {box.chainage_m:g} m outside (0, {cable.length_m:g})"))
        previous = previous_by_cable.get(box.cable)
        if previous is not None and box.chainage_m <= previous:
            out.append(_error(path, "chainages strictly increasing"))
        previous_by_cable[box.cable] = box.chainage_m

    for box in plant.boxes:
        if box.cable not in plant.loop_by_id:
            out.append(_error(f"boxes[{box.id}]", f"unknown loop {box.cable!r}"))

    out.extend(_tap_violations(plant))
    out.extend(_uplink_violations(plant))
    out.extend(_cross_link_violations(plant))
    return out


def _tap_violations(plant: FiberPlant) -> list[Violation]:
    out: list[Violation] = []
    # (cable, tube, side) -> (box id, chainage)
    placed: dict[tuple[str, int, TapSide], tuple[str, float]] = {}
    for box in plant.boxes:
        cable = plant.loop_by_id.get(box.cable)
        if cable is None:
            continue
        for tap in box.taps:
            path = f"boxes[{box.id}].taps[tube={tap.tube_index},side={tap.side.value}]"
            if not 1 <= tap.tube_index <= cable.tube_count:
                out.append(_error(path, f"tube index outside 1..{cable.tube_count}"))
                continue
            bad = [f for f in tap.spliced_fibers if not 1 <= f <= cable.fibers_per_tube]
            if bad:
                out.append(_error(path, f"spliced fibers {bad} outside 1..{cable.fibers_per_tube}"))
            key = (box.cable, tap.tube_index, tap.side)
            if key in placed:
                out.append(_error(path, f"tube {tap.tube_index} already tapped {tap.side.value} at box {placed[key][0]}"))
            else:
                placed[key] = (box.id, box.chainage_m)

    for cable in plant.loops:
        for tube in range(1, cable.tube_count + 1):
            a = placed.get((cable.id, tube, TapSide.TOWARD_A))
            b = placed.get((cable.id, tube, TapSide.TOWARD_B))
            if a is None or b is None:
                continue
            path = f"loops[{cable.id}].tube[{tube}]"
            if a[1] > b[1]:
                out.append(_error(path, f"tap order violated: toward-A at {a[1]:g} m is past toward-B at {b[1]:g} m"))
            elif a[1] == b[1] and not plant.allow_same_box_double_tap:
                out.append(_error(path, f"both sides tapped at box {a[0]}; set allow_same_box_double_tap to permit"))
    return out


def _uplink_violations(plant: FiberPlant) -> list[Violation]:
    out: list[Violation] = []
    consumed: dict[tuple[str, int, TapSide], dict[int, str]] = {}
    used_core_ports: dict[tuple[str, int], str] = {}

    entries = [(f"switches[{sw.id}].uplink", sw.uplink) for sw in plant.switches if sw.uplink is not None]
    entries += [(f"uplinks[{i}]", up) for i, up in enumerate(plant.spare_uplinks)]

    for path, up in entries:
        box = plant.box_by_id.get(up.box)
        if box is None:
            out.append(_error(path, f"unknown box {up.box!r}"))
            continue
        try:
            tap = plant.tap_at(up.box, up.tube_index, up.side)
        except KeyError:
            out.append(_error(path, f"no tap (tube={up.tube_index}, side={up.side.value}) at box {up.box}"))
            continue

        if up.mode == LinkMode.DUPLEX:
            if len(up.fibers) != 2:
                out.append(_error(path, "duplex uplink needs exactly two fibers"))
            elif not (up.fibers[0] % 2 == 1 and up.fibers[1] == up.fibers[0] + 1):
                out.append(_error(path, f"fibers {up.fibers} are not a conventional pair (2k-1, 2k)"))
            if up.bidi_polarity is not None:
                out.append(_error(path, "duplex uplink cannot carry a BiDi polarity"))
        else:
            if len(up.fibers) != 1:
                out.append(_error(path, "simplex uplink needs exactly one fiber"))

        missing = [f for f in up.fibers if f not in tap.spliced_fibers]
        if missing:
            out.append(_error(path, f"fibers {missing} not spliced at this tap"))

        tap_used = consumed.setdefault(up.tap_key(), {})
        for f in up.fibers:
            if f in tap_used:
                out.append(_error(path, f"fiber {f} already consumed by {tap_used[f]}"))
            else:
                tap_used[f] = path

        core = plant.core_by_id.get(up.core)
        if core is None:
            out.append(_error(path, f"unknown core {up.core!r}"))
        else:
            if not 0 <= up.core_port < core.sfp_port_count:
                out.append(_error(path, f"core port {up.core_port} outside 0..{core.sfp_port_count - 1}"))
            key = (up.core, up.core_port)
            if key in used_core_ports:
                out.append(_error(path, f"core port {up.core}/{up.core_port} already used by {used_core_ports[key]}"))
            else:
                used_core_ports[key] = path
    return out


def _cross_link_violations(plant: FiberPlant) -> list[Violation]:
    out: list[Violation] = []
    for sw in plant.switches:
        if sw.cross_link_peer is None:
            continue
        path = f"switches[{sw.id}]"
        peer = plant.switch_by_id.get(sw.cross_link_peer)
        if peer is None:
            out.append(_error(path, f"unknown cross-link peer {sw.cross_link_peer!r}"))
            continue
        if peer.cross_link_peer != sw.id:
            out.append(_error(path, f"cross-link not symmetric: {peer.id} does not point back"))
        if not sw.internal_rj45 or not peer.internal_rj45:
            out.append(_error(path, "cross-link requires the internal RJ45 port on both switches"))
    for sw in plant.switches:
        if sw.office not in plant.office_by_id:
            out.append(_error(f"switches[{sw.id}]", f"unknown office {sw.office!r}"))
        if sw.box not in plant.box_by_id:
            out.append(_error(f"switches[{sw.id}]", f"unknown box {sw.box!r}"))
    return out


def policy_violations(plant: FiberPlant) -> list[Violation]:
    """Warnings: advised-against but legal configurations."""
    out: list[Violation] = []

    for cable in plant.loops:
        total = 2 * cable.tube_count
        free = len(free_tube_sides(plant, cable.id))
        reserve = free / total if total else 1.0
        if reserve < RESERVE_WARNING_FLOOR:
            out.append(
                _warning(
                    f"loops[{cable.id}]",
                    f"tube-side reserve {reserve:.1%} below {RESERVE_WARNING_FLOOR:.0%} floor",
                )
            )

    if plant.allow_same_box_double_tap:
        for box in plant.boxes:
            tubes = [t.tube_index for t in box.taps]
            doubled = sorted({t for t in tubes if tubes.count(t) == 2})
            for tube in doubled:
                out.append(
                    _warning(
                        f"boxes[{box.id}]",
                        f"tube {tube} tapped on both sides at the same box (advised against)",
                    )
                )

    for path, up in [(f"switches[{sw.id}].uplink", sw.uplink) for sw in plant.switches if sw.uplink] + [
        (f"uplinks[{i}]", up) for i, up in enumerate(plant.spare_uplinks)
    ]:
        if up.hybrid_cord:
            continue
        box = plant.box_by_id.get(up.box)
        if box is not None and box.port_polish == Polish.APC:
            out.append(_warning(path, "polish mismatch LC/APC<->LC/UPC at box port; declare a hybrid cord"))
        cable = plant.loop_by_id.get(box.cable) if box is not None else None
        if cable is not None and cable.polish == Polish.APC:
            out.append(_warning(path, "polish mismatch LC/APC<->LC/UPC at panel port; declare a hybrid cord"))
    return out


def validate_plant(plant: FiberPlant) -> list[Violation]:
    """All violations, errors first; empty iff the plant is clean."""
    return structural_violations(plant) + policy_violations(plant)
