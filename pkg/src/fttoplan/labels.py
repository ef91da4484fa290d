"""Color codes and naming schemes for fibers, boxes, panel ports and switches.

Tubes and fibers are numbered 1..12 and identified in the field by color;
printed fiber references use 0-based base-12 digits (0-9, A, B), so digit d
maps to color row d+1.  Box ports are referenced by pair ("BR102.1d" is the
duplex link on ports 1-2 of box 02 of loop 1).  Color names stay in French
as printed on the reference tables.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass
from enum import Enum

from .errors import ParseError, RangeError, UnknownColorError
from .model import (
    ColorSchemeName,
    FiberPlant,
    LinkMode,
    Placement,
    TapSide,
)

BASE12_DIGITS = "0123456789AB"

_SCHEME_TABLES: dict[ColorSchemeName, tuple[str, ...]] = {
    ColorSchemeName.ALPHABETIC: (
        "Blanc", "Bleu", "Gris", "Jaune", "Marron", "Noir",
        "Orange", "Rose", "Rouge", "Turquoise", "Vert", "Violet",
    ),
    ColorSchemeName.FOTAG: (
        "Bleu", "Orange", "Vert", "Marron", "Gris", "Blanc",
        "Rouge", "Noir", "Jaune", "Violet", "Rose", "Turquoise",
    ),
    ColorSchemeName.FRANCE_TELECOM: (
        "Rouge", "Bleu", "Vert", "Jaune", "Violet", "Incolore",
        "Orange", "Gris", "Marron", "Noir", "Turquoise", "Rose",
    ),
}


@dataclass(frozen=True)
class ColorScheme:
    """A 12-row bijection between tube/fiber numbers and color names."""

    name: ColorSchemeName
    mapping: tuple[str, ...]

    @classmethod
    def named(cls, name: ColorSchemeName | str) -> "ColorScheme":
        key = ColorSchemeName(name)
        return cls(key, _SCHEME_TABLES[key])


def _fold(name: str) -> str:
    stripped = unicodedata.normalize("NFD", name)
    return "".join(c for c in stripped if not unicodedata.combining(c)).lower()


def color_of(scheme: ColorScheme, index: int) -> str:
    """Color name of row `index` (1..12)."""
    if not 1 <= index <= 12:
        raise RangeError(f"color row {index} outside 1..12")
    return scheme.mapping[index - 1]


def index_of(scheme: ColorScheme, name: str) -> int:
    """Row number (1..12) of a color name; accent- and case-insensitive."""
    wanted = _fold(name)
    for i, color in enumerate(scheme.mapping, start=1):
        if _fold(color) == wanted:
            return i
    raise UnknownColorError(f"{name!r} is not a {scheme.name.value} color")


# -- fiber references (S-C-T-F) ----------------------------------------------


class Direction(str, Enum):
    """Cable direction: outbound (aller) or return (retour)."""

    OUT = "A"
    RETURN = "R"


# The LEGI profile letters the return direction B; the generic profile uses R.
_RETURN_LETTER = {
    ColorSchemeName.FOTAG: "B",
    ColorSchemeName.ALPHABETIC: "R",
    ColorSchemeName.FRANCE_TELECOM: "R",
}


def return_letter_for(scheme: ColorSchemeName | str) -> str:
    return _RETURN_LETTER[ColorSchemeName(scheme)]


@dataclass(frozen=True)
class FiberRef:
    """Printed reference of one fiber end: direction-cable-tube-fiber."""

    direction: Direction
    cable: str  # single symbol, letter or digit
    tube: int  # 0..11
    fiber: int  # 0..11


def encode_fiber_ref(ref: FiberRef, *, return_letter: str = "R") -> str:
    if len(ref.cable) != 1 or not ref.cable.isalnum():
        raise RangeError(f"cable symbol {ref.cable!r} must be one letter or digit")
    if not 0 <= ref.tube <= 11 or not 0 <= ref.fiber <= 11:
        raise RangeError(f"tube/fiber ({ref.tube}, {ref.fiber}) outside 0..11")
    if return_letter not in ("R", "B"):
        raise RangeError(f"return letter {return_letter!r} must be R or B")
    letter = "A" if ref.direction == Direction.OUT else return_letter
    return f"{letter}-{ref.cable.upper()}-{BASE12_DIGITS[ref.tube]}-{BASE12_DIGITS[ref.fiber]}"


def parse_fiber_ref(label: str) -> FiberRef:
    """Inverse of encode_fiber_ref; accepts R or B as the return letter."""
    expected = "S-C-T-F"
    if len(label) != 7:
        raise ParseError(
            f"{label!r}: expected 7 characters ({expected}), got {len(label)}",
            position=min(len(label), 7),
        )
    for pos in (1, 3, 5):
        if label[pos] != "-":
            raise ParseError(f"{label!r}: expected '-' at position {pos}", position=pos)
    direction_char = label[0]
    if direction_char not in ("A", "R", "B"):
        raise ParseError(f"{label!r}: direction must be A, R or B", position=0)
    cable = label[2]
    if not cable.isalnum():
        raise ParseError(f"{label!r}: cable symbol must be a letter or digit", position=2)
    if label[4] not in BASE12_DIGITS:
        raise ParseError(f"{label!r}: tube digit must be one of {BASE12_DIGITS}", position=4)
    if label[6] not in BASE12_DIGITS:
        raise ParseError(f"{label!r}: fiber digit must be one of {BASE12_DIGITS}", position=6)
    direction = Direction.OUT if direction_char == "A" else Direction.RETURN
    return FiberRef(direction, cable, BASE12_DIGITS.index(label[4]), BASE12_DIGITS.index(label[6]))


# -- box port labels (BR102.1d) ------------------------------------------------


@dataclass(frozen=True)
class BoxPortLabel:
    loop_no: int  # single digit
    box_no: int  # two digits, per-loop rank in chainage order
    pair_no: int  # 1..6
    mode_suffix: str  # d = duplex, a/b = simplex halves of a pair

    def __post_init__(self):
        if not 0 <= self.loop_no <= 9:
            raise RangeError(f"loop number {self.loop_no} not a single digit")
        if not 0 <= self.box_no <= 99:
            raise RangeError(f"box number {self.box_no} needs two digits")
        if not 1 <= self.pair_no <= 6:
            raise RangeError(f"pair number {self.pair_no} outside 1..6")
        if self.mode_suffix not in ("d", "a", "b"):
            raise RangeError(f"mode suffix {self.mode_suffix!r} must be d, a or b")


def box_port_label(loop_no: int, box_no: int, pair_no: int, mode_suffix: str) -> str:
    label = BoxPortLabel(loop_no, box_no, pair_no, mode_suffix)
    return f"BR{label.loop_no}{label.box_no:02d}.{label.pair_no}{label.mode_suffix}"


_BOX_PORT_CHECKS = (
    ("'B'", lambda c: c == "B"),
    ("'R'", lambda c: c == "R"),
    ("loop digit", str.isdigit),
    ("box digit", str.isdigit),
    ("box digit", str.isdigit),
    ("'.'", lambda c: c == "."),
    ("pair digit 1-6", lambda c: c in "123456"),
    ("suffix d, a or b", lambda c: c in "dab"),
)


def parse_box_port_label(label: str) -> BoxPortLabel:
    for i, (want, check) in enumerate(_BOX_PORT_CHECKS):
        if i >= len(label) or not check(label[i]):
            raise ParseError(f"{label!r}: expected {want} at position {i}", position=i)
    if len(label) != 8:
        raise ParseError(f"{label!r}: trailing characters after position 7", position=8)
    return BoxPortLabel(int(label[2]), int(label[3:5]), int(label[6]), label[7])


def port_suffix(mode: LinkMode, port: int) -> str:
    if mode == LinkMode.DUPLEX:
        return "d"
    return "a" if port % 2 == 1 else "b"


# -- switch DNS names -----------------------------------------------------------


def switch_dns_name(site: str, room: str, placement: Placement | str, seq: int) -> str:
    """sw-<site>-<room>-<b|c><seq>, lowercase."""
    if not room:
        raise RangeError("room code must be non-empty")
    kind = "b" if Placement(placement) == Placement.BUREAU else "c"
    return f"sw-{site}-{room}-{kind}{seq}".lower()


# -- whole-plant label sheets ----------------------------------------------------


@dataclass(frozen=True)
class PanelRecord:
    cable: str
    cable_code: str
    end: str  # A, plus R or B depending on the profile
    tube: int
    tube_color: str
    fiber: int
    fiber_color: str
    label: str
    connection: str  # box id or "réserve"


@dataclass(frozen=True)
class BoxRecord:
    box: str
    cable: str
    tube: int
    side: str
    tube_color: str
    tap_label: str  # e.g. "A-Bleu"
    spliced_count: int
    ports: str  # exposed port range, e.g. "1-6"


@dataclass(frozen=True)
class SwitchRecord:
    switch: str
    office: str
    room: str
    box: str
    port_label: str  # box port label, "" when the switch has no uplink
    dns_name: str
    annotations: str  # pass-through datacentre-side fields, "k=v" joined


@dataclass(frozen=True)
class LabelSheets:
    panel: tuple[PanelRecord, ...]
    boxes: tuple[BoxRecord, ...]
    switches: tuple[SwitchRecord, ...]


def _box_port_offsets(plant: FiberPlant, box_id: str) -> dict[tuple[int, TapSide], int]:
    """Port-number offset of each tap: taps stack A side first, then by tube."""
    box = plant.box_by_id[box_id]
    cable = plant.loop_by_id[box.cable]
    taps = sorted(box.taps, key=lambda t: (t.side.value, t.tube_index))
    return {
        (tap.tube_index, tap.side): i * cable.fibers_per_tube for i, tap in enumerate(taps)
    }


def uplink_port_label(plant: FiberPlant, uplink) -> str:
    """Box port label of an uplink, e.g. BR102.1d."""
    box = plant.box_by_id[uplink.box]
    cable = plant.loop_by_id[box.cable]
    loop_no = [c.id for c in plant.loops].index(cable.id) + 1
    box_no = [b.id for b in plant.boxes_on(cable.id)].index(box.id) + 1
    offset = _box_port_offsets(plant, box.id)[(uplink.tube_index, uplink.side)]
    port = offset + uplink.fibers[0]
    return box_port_label(loop_no, box_no, (port + 1) // 2, port_suffix(uplink.mode, port))


def label_sheets(plant: FiberPlant) -> LabelSheets:
    """Printable records for the central panel, every box and every switch.

    A pure function of the plant: identical plants give identical sheets.
    Raises RangeError when a plant outgrows the label formats (more than
    9 loops, 99 boxes per loop or 12 exposed ports per box).
    """
    scheme = ColorScheme.named(plant.color_scheme)
    return_letter = return_letter_for(plant.color_scheme)

    panel: list[PanelRecord] = []
    for cable in plant.loops:
        code = plant.loop_code(cable.id)
        taps = {}
        for box, tap in plant.taps_on(cable.id):
            taps[(tap.tube_index, tap.side)] = (box, tap)
        for end, direction, side in (
            ("A", Direction.OUT, TapSide.TOWARD_A),
            (return_letter, Direction.RETURN, TapSide.TOWARD_B),
        ):
            for tube in range(1, cable.tube_count + 1):
                for fiber in range(1, cable.fibers_per_tube + 1):
                    connected = "réserve"
                    entry = taps.get((tube, side))
                    if entry is not None and fiber in entry[1].spliced_fibers:
                        connected = entry[0].id
                    ref = FiberRef(direction, code, tube - 1, fiber - 1)
                    panel.append(
                        PanelRecord(
                            cable=cable.id,
                            cable_code=code,
                            end=end,
                            tube=tube,
                            tube_color=color_of(scheme, tube),
                            fiber=fiber,
                            fiber_color=color_of(scheme, fiber),
                            label=encode_fiber_ref(ref, return_letter=return_letter),
                            connection=connected,
                        )
                    )

    boxes: list[BoxRecord] = []
    for cable in plant.loops:
        for box in plant.boxes_on(cable.id):
            offsets = _box_port_offsets(plant, box.id)
            for tap in sorted(box.taps, key=lambda t: (t.side.value, t.tube_index)):
                side_letter = "A" if tap.side == TapSide.TOWARD_A else return_letter
                color = color_of(scheme, tap.tube_index)
                first = offsets[(tap.tube_index, tap.side)] + 1
                last = offsets[(tap.tube_index, tap.side)] + cable.fibers_per_tube
                boxes.append(
                    BoxRecord(
                        box=box.id,
                        cable=cable.id,
                        tube=tap.tube_index,
                        side=side_letter,
                        tube_color=color,
                        tap_label=f"{side_letter}-{color}",
                        spliced_count=len(tap.spliced_fibers),
                        ports=f"{first}-{last}",
                    )
                )

    switches: list[SwitchRecord] = []
    seq: dict[tuple[str, Placement], int] = {}
    for sw in sorted(plant.switches, key=lambda s: s.id):
        office = plant.office_by_id[sw.office]
        key = (sw.office, sw.placement)
        seq[key] = seq.get(key, 0) + 1
        dns = switch_dns_name(plant.site_name, office.room_code, sw.placement, seq[key])
        port_label = uplink_port_label(plant, sw.uplink) if sw.uplink else ""
        switches.append(
            SwitchRecord(
                switch=sw.id,
                office=sw.office,
                room=office.room_code,
                box=sw.box,
                port_label=port_label,
                dns_name=dns,
                annotations=" ".join(f"{k}={v}" for k, v in sw.annotations),
            )
        )

    return LabelSheets(tuple(panel), tuple(boxes), tuple(switches))
