"""Domain types for an FTTO optical-loop fiber plant.

A plant is a set of loop cables that leave the core room and come back to
it.  Every tube of a loop can be cut at most once per direction: a tap
toward the A end makes the tube's fibers usable on the [0, chainage)
segment, a tap toward the B end on the (chainage, length] segment.  Offices
are served by micro-switches patched to breakout boxes placed along the
loops.

Plant objects are immutable after construction; planning operations return
new plants instead of mutating.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping, Optional


class FiberGrade(str, Enum):
    OS1 = "os1"
    OS2 = "os2"


class Connector(str, Enum):
    LC = "lc"
    SC = "sc"


class Polish(str, Enum):
    UPC = "upc"
    APC = "apc"


class TapSide(str, Enum):
    """Direction a cut tube is used in: toward the A end or the B end."""

    TOWARD_A = "toward_a"
    TOWARD_B = "toward_b"


class LinkMode(str, Enum):
    DUPLEX = "duplex"
    SIMPLEX = "simplex"


class BidiPolarity(str, Enum):
    """BiDi transceiver variant installed at the core end of a simplex link."""

    UP = "up"
    DOWN = "down"


class SwitchKind(str, Enum):
    MICRO4 = "micro4"
    MINI8 = "mini8"


class PowerSource(str, Enum):
    MAINS230 = "mains230"
    TRANSFORMER54 = "transformer54"


class Placement(str, Enum):
    BUREAU = "bureau"
    COULOIR = "couloir"


class ColorSchemeName(str, Enum):
    FOTAG = "fotag"
    ALPHABETIC = "alphabetic"
    FRANCE_TELECOM = "francetelecom"


USER_PORTS_BY_KIND = {SwitchKind.MICRO4: 4, SwitchKind.MINI8: 8}

# Switch-side and core-side transceivers are LC/UPC; anything else needs a
# hybrid patch cord.
TRANSCEIVER_POLISH = Polish.UPC

STANDARD_PATCH_CORD_LENGTHS_M = (10, 15, 20, 25)

HOURS_PER_YEAR = 8766.0  # 365.25 days

# Published MTBF figures for the two reference micro-switch vendors.
REFERENCE_MTBF_HOURS = (100_000, 750_000)


def other_side(side: TapSide) -> TapSide:
    return TapSide.TOWARD_B if side == TapSide.TOWARD_A else TapSide.TOWARD_A


def opposite_polarity(polarity: BidiPolarity) -> BidiPolarity:
    return BidiPolarity.DOWN if polarity == BidiPolarity.UP else BidiPolarity.UP


@dataclass(frozen=True)
class LiveInterval:
    """Cable segment an uplink physically depends on.

    Toward-A taps use [0, chainage), toward-B taps use (chainage, length].
    """

    side: TapSide
    chainage_m: float
    length_m: float

    def contains(self, x: float) -> bool:
        if self.side == TapSide.TOWARD_A:
            return 0.0 <= x < self.chainage_m
        return self.chainage_m < x <= self.length_m

    def __str__(self) -> str:
        if self.side == TapSide.TOWARD_A:
            return f"[0,{self.chainage_m:g})"
        return f"({self.chainage_m:g},{self.length_m:g}]"


@dataclass(frozen=True)
class TubeTap:
    """One cut of a tube at a breakout box, usable in one direction."""

    tube_index: int  # 1..tube_count
    side: TapSide
    spliced_fibers: tuple[int, ...] = ()  # subset of 1..fibers_per_tube

    @property
    def exposed_ports(self) -> int:
        return len(self.spliced_fibers)


@dataclass(frozen=True)
class BreakoutBox:
    id: str
    cable: str
    chainage_m: float
    port_polish: Polish = Polish.UPC
    taps: tuple[TubeTap, ...] = ()
    # free-form datacentre-side fields (bay, stack, drawer...); no generation
    # rule exists, they pass through documents and sheets untouched
    annotations: tuple[tuple[str, str], ...] = ()

    @property
    def exposed_port_count(self) -> int:
        return sum(t.exposed_ports for t in self.taps)


@dataclass(frozen=True)
class Uplink:
    """A fiber-level link from a core SFP port to a box tap.

    `fibers` holds one index (simplex) or the conventional consecutive pair
    (2k-1, 2k) (duplex).  `kind` records which switch kind the link serves
    or is planned for; unattached simplex-ready slots default to micro4.
    """

    mode: LinkMode
    box: str
    tube_index: int
    side: TapSide
    fibers: tuple[int, ...]
    core: str
    core_port: int
    bidi_polarity: Optional[BidiPolarity] = None  # core-end variant, simplex only
    hybrid_cord: bool = False
    kind: SwitchKind = SwitchKind.MICRO4

    @property
    def transceiver_polish(self) -> Polish:
        return TRANSCEIVER_POLISH

    @property
    def switch_end_polarity(self) -> Optional[BidiPolarity]:
        if self.bidi_polarity is None:
            return None
        return opposite_polarity(self.bidi_polarity)

    def tap_key(self) -> tuple[str, int, TapSide]:
        return (self.box, self.tube_index, self.side)


@dataclass(frozen=True)
class EdgeSwitch:
    id: str
    kind: SwitchKind
    office: str
    box: str
    uplink: Optional[Uplink] = None
    internal_rj45: bool = True
    poe_capable: bool = True
    power_source: PowerSource = PowerSource.MAINS230
    cross_link_peer: Optional[str] = None
    placement: Placement = Placement.BUREAU
    patch_cord_m: Optional[int] = None  # one of STANDARD_PATCH_CORD_LENGTHS_M
    active_ports: int = 0  # user ports with a device attached (EEPoE input)
    poe_load_w: float = 0.0  # delivered PoE watts, shut down at night
    annotations: tuple[tuple[str, str], ...] = ()  # free-form pass-through

    @property
    def user_port_count(self) -> int:
        return USER_PORTS_BY_KIND[self.kind]


@dataclass(frozen=True)
class CoreSwitch:
    id: str
    sfp_port_count: int
    bridge_priority: int = 32768


@dataclass(frozen=True)
class Office:
    id: str
    building: str = ""
    floor: str = ""
    room: str = ""

    @property
    def room_code(self) -> str:
        return self.room or self.id


@dataclass(frozen=True)
class LoopCable:
    """A multi-tube cable whose two ends both land in the core room."""

    id: str
    length_m: float
    tube_count: int
    fibers_per_tube: int
    end_a_core: str
    end_b_core: str
    code: str = ""  # single label symbol; defaults to the loop's 1-based rank
    fiber_grade: FiberGrade = FiberGrade.OS1
    bend_insensitive: bool = True  # G657a
    connector: Connector = Connector.LC
    polish: Polish = Polish.UPC

    @property
    def total_fibers(self) -> int:
        return self.tube_count * self.fibers_per_tube


@dataclass(frozen=True)
class CostModel:
    """Unit prices in EUR excluding tax; overridable per plant."""

    fiber_per_m: float = 1.00
    duplex_sfp: float = 20.00  # per transceiver (two per duplex link)
    simplex_sfp_pair: float = 60.00  # per link (paired BiDi transceivers)
    micro_switch: float = 350.00
    transformer_54v: float = 50.00
    # Standard patch cord lengths; prices default to 0 until quoted.
    patch_cord_by_length: Mapping[int, float] = field(
        default_factory=lambda: {n: 0.0 for n in STANDARD_PATCH_CORD_LENGTHS_M}
    )


@dataclass(frozen=True)
class PowerModel:
    """PoE and energy parameters.

    bt delivery falls linearly with copper length: 90 W injected arrives as
    70 W after 100 m.  af/at carry no published derating and are treated as
    flat within budget.
    """

    poe_class_budget: Mapping[str, float] = field(
        default_factory=lambda: {"af": 15.4, "at": 30.0, "bt": 90.0}
    )
    bt_derating_w_per_m: float = 0.2
    cable_quality_factor: float = 1.0  # scales the bt slope; 1 = nominal cable
    eepoe_saving_per_idle_port_w: float = 1.0  # conservative end of 1-2 W
    transformer_consumption_factor: float = 2.0
    # Not a published figure: one bt port equivalent, flagged as assumption.
    poe_budget_per_switch_w: float = 90.0
    night_shutdown_hours: float = 10.0  # assumption, configurable
    base_draw_w: Mapping[str, float] = field(default_factory=dict)  # per switch kind


@dataclass(frozen=True)
class MtbfSpec:
    """Mean time between failures per switch kind, in hours."""

    hours_by_kind: Mapping[str, float] = field(default_factory=dict)
    default_hours: float = float(REFERENCE_MTBF_HOURS[0])

    def hours_for(self, kind: SwitchKind) -> float:
        return float(self.hours_by_kind.get(kind.value, self.default_hours))


@dataclass(frozen=True)
class FiberPlant:
    """Root aggregate: the whole-site configuration."""

    site_name: str
    loops: tuple[LoopCable, ...] = ()
    cores: tuple[CoreSwitch, ...] = ()
    boxes: tuple[BreakoutBox, ...] = ()
    switches: tuple[EdgeSwitch, ...] = ()
    offices: tuple[Office, ...] = ()
    spare_uplinks: tuple[Uplink, ...] = ()  # lit but not yet serving a switch
    cost_model: CostModel = field(default_factory=CostModel)
    power_model: PowerModel = field(default_factory=PowerModel)
    mtbf_spec: MtbfSpec = field(default_factory=MtbfSpec)
    color_scheme: ColorSchemeName = ColorSchemeName.FOTAG
    allow_same_box_double_tap: bool = False

    # -- lookups ---------------------------------------------------------

    @cached_property
    def loop_by_id(self) -> dict[str, LoopCable]:
        return {c.id: c for c in self.loops}

    @cached_property
    def core_by_id(self) -> dict[str, CoreSwitch]:
        return {c.id: c for c in self.cores}

    @cached_property
    def box_by_id(self) -> dict[str, BreakoutBox]:
        return {b.id: b for b in self.boxes}

    @cached_property
    def switch_by_id(self) -> dict[str, EdgeSwitch]:
        return {s.id: s for s in self.switches}

    @cached_property
    def office_by_id(self) -> dict[str, Office]:
        return {o.id: o for o in self.offices}

    def loop_code(self, cable_id: str) -> str:
        """Single label symbol of a loop (declared code or 1-based rank)."""
        cable = self.loop_by_id[cable_id]
        if cable.code:
            return cable.code
        return str([c.id for c in self.loops].index(cable_id) + 1)

    def boxes_on(self, cable_id: str) -> list[BreakoutBox]:
        """Boxes of one loop in chainage order."""
        found = [b for b in self.boxes if b.cable == cable_id]
        found.sort(key=lambda b: b.chainage_m)
        return found

    def box_positions(self, cable_id: str) -> list[tuple[str, float]]:
        return [(b.id, b.chainage_m) for b in self.boxes_on(cable_id)]

    def all_uplinks(self) -> list[tuple[Uplink, Optional[EdgeSwitch]]]:
        """Every uplink with its serving switch (None for spare slots).

        Order: attached uplinks in switch order, then spares.
        """
        out: list[tuple[Uplink, Optional[EdgeSwitch]]] = []
        for sw in self.switches:
            if sw.uplink is not None:
                out.append((sw.uplink, sw))
        for up in self.spare_uplinks:
            out.append((up, None))
        return out

    def taps_on(self, cable_id: str) -> list[tuple[BreakoutBox, TubeTap]]:
        out = []
        for box in self.boxes_on(cable_id):
            for tap in box.taps:
                out.append((box, tap))
        return out

    def tap_at(self, box_id: str, tube_index: int, side: TapSide) -> TubeTap:
        box = self.box_by_id[box_id]
        for tap in box.taps:
            if tap.tube_index == tube_index and tap.side == side:
                return tap
        raise KeyError(f"no tap (tube={tube_index}, side={side.value}) at box {box_id}")

    def live_interval(self, uplink: Uplink) -> LiveInterval:
        box = self.box_by_id[uplink.box]
        cable = self.loop_by_id[box.cable]
        return LiveInterval(uplink.side, box.chainage_m, cable.length_m)

    def consumed_fibers(self) -> dict[tuple[str, int, TapSide], set[int]]:
        """Fiber indices already used by an uplink, per tap."""
        used: dict[tuple[str, int, TapSide], set[int]] = {}
        for uplink, _ in self.all_uplinks():
            used.setdefault(uplink.tap_key(), set()).update(uplink.fibers)
        return used


# -- capacity arithmetic ---------------------------------------------------


def panel_port_count(plant: FiberPlant) -> int:
    """LC/SC ports on the central panel: both ends of every fiber land there."""
    return sum(2 * c.tube_count * c.fibers_per_tube for c in plant.loops)


def equivalent_tube_capacity(cable: LoopCable) -> int:
    """A looped cable serves like twice its tube count: one tap per direction."""
    return 2 * cable.tube_count


def tapped_sides(plant: FiberPlant, cable_id: str) -> dict[tuple[int, TapSide], float]:
    """Occupied (tube, side) slots of a loop, mapped to the tap chainage."""
    out: dict[tuple[int, TapSide], float] = {}
    for box, tap in plant.taps_on(cable_id):
        out[(tap.tube_index, tap.side)] = box.chainage_m
    return out

def free_tube_sides(plant: FiberPlant, cable_id: str) -> list[tuple[int, TapSide]]:
    """Unused (tube, side) slots of a loop, lowest tube first, A before B."""
    cable = plant.loop_by_id[cable_id]
    taken = set(tapped_sides(plant, cable_id))
    out = []
    for tube in range(1, cable.tube_count + 1):
        for side in (TapSide.TOWARD_A, TapSide.TOWARD_B):
            if (tube, side) not in taken:
                out.append((tube, side))
    return out
