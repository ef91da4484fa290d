"""fttoplan: planner, validator, labeler and failure simulator for
FTTO optical-loop building networks."""

from .version import VERSION as __version__

from .allocate import (
    AllocationPlan,
    BoxDemand,
    CorePortDemand,
    DemandSpec,
    PlannedTap,
    PlannedUplink,
    ReserveEntry,
    UplinkRequest,
    allocate,
    apply_plan,
    assign_uplink,
    check_bidi_pairing,
    convert_duplex_to_simplex,
    core_port_demand,
    reserve_report,
)
from .document import (
    dump_plant,
    load_demand,
    load_plan,
    load_plant,
    load_scenario,
    plan_to_document,
    write_document,
)
from .estimate import (
    AvailabilityReport,
    CostEstimate,
    CostLine,
    EnergyReport,
    PowerViolation,
    availability_report,
    cost_estimate,
    delivered_power,
    energy_report,
    plan_hardware_cost,
    power_budget,
)
from .failsim import (
    BoxFail,
    CableCut,
    CoreFail,
    CriticalityReport,
    FailureScenario,
    LogicalGraph,
    ReachabilityReport,
    SpanningTree,
    SwitchFail,
    TransceiverFail,
    apply_scenario,
    build_graph,
    enumerate_single_failures,
    reachability,
    spanning_tree,
    to_dot,
)
from .labels import (
    BoxPortLabel,
    ColorScheme,
    Direction,
    FiberRef,
    LabelSheets,
    box_port_label,
    color_of,
    encode_fiber_ref,
    index_of,
    label_sheets,
    parse_box_port_label,
    parse_fiber_ref,
    switch_dns_name,
)
from .model import (
    BidiPolarity,
    BreakoutBox,
    ColorSchemeName,
    CoreSwitch,
    CostModel,
    EdgeSwitch,
    FiberPlant,
    LinkMode,
    LoopCable,
    MtbfSpec,
    Office,
    Polish,
    PowerModel,
    PowerSource,
    SwitchKind,
    TapSide,
    TubeTap,
    Uplink,
    equivalent_tube_capacity,
    free_tube_sides,
    panel_port_count,
)
from .validate import Violation, validate_plant
