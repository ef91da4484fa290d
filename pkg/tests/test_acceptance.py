"""Acceptance suite: one check per published criterion, timed where required.

Run under pytest (use -s to see the PASS lines) or directly:

    python tests/test_acceptance.py
"""

import contextlib
import io
import itertools
import random
import sys
import time
from pathlib import Path

from fttoplan.allocate import allocate, apply_plan, convert_duplex_to_simplex, core_port_demand
from fttoplan.cli import main as cli_main
from fttoplan.document import load_demand, load_plant
from fttoplan.errors import CapacityError
from fttoplan.estimate import cost_estimate, delivered_power
from fttoplan.failsim import build_graph, enumerate_single_failures, spanning_tree
from fttoplan.goldens import golden_path
from fttoplan.labels import (
    BoxPortLabel,
    ColorScheme,
    Direction,
    FiberRef,
    box_port_label,
    color_of,
    encode_fiber_ref,
    parse_box_port_label,
    parse_fiber_ref,
)
from fttoplan.model import equivalent_tube_capacity, panel_port_count

HERE = Path(__file__).resolve().parent
sys.path.insert(0, str(HERE))

from conftest import (  # noqa: E402
    A,
    B,
    desk_pair_plant,
    illegal_double_taps,
    make_plant,
    overlapping_taps,
)
from test_failsim import oracle_spanning_tree, random_failsim_plant  # noqa: E402
from test_labels import ALPHABETIC_ROWS, FOTAG_ROWS, FRANCE_TELECOM_ROWS  # noqa: E402


def _pass(n: int, message: str) -> None:
    print(f"PASS criterion {n}: {message}")


def criterion_1_figure6_arithmetic():
    started = time.monotonic()
    plant = load_plant(golden_path("legi.json"))
    assert panel_port_count(plant) == 432

    demand = load_demand(golden_path("legi_demand.json"))
    plan = allocate(plant, demand)
    planned = apply_plan(plant, plan)
    duplex_state = core_port_demand(planned)
    assert duplex_state.sfp_ports == 216
    assert duplex_state.user_ports == 864

    conversion = convert_duplex_to_simplex(planned)
    converted = apply_plan(planned, conversion)
    simplex_state = core_port_demand(converted)
    assert simplex_state.sfp_ports == 432
    assert simplex_state.user_ports == 1728

    elapsed = time.monotonic() - started
    assert elapsed < 1.0, f"took {elapsed:.2f} s, budget 1 s"
    _pass(1, f"432 panel ports; 216 duplex/864 ports; 432 simplex/1728 ports ({elapsed:.2f} s)")


def criterion_2_reference_loop():
    plant = load_plant(golden_path("ref_loop12x12.json"))
    assert panel_port_count(plant) == 288
    assert equivalent_tube_capacity(plant.loops[0]) == 24
    _pass(2, "12x12 loop: 288 panel ports, equivalent capacity 24 tubes")


def criterion_3_tube_reuse_invariants():
    from fttoplan.allocate import BoxDemand, DemandSpec, UplinkRequest
    from fttoplan.model import LinkMode

    started = time.monotonic()
    rng = random.Random(20260809)
    plants = 0
    allocations = 0
    while plants < 1000:
        plants += 1
        tube_count = rng.randint(1, 4)
        n_boxes = rng.randint(1, 6)
        chainages = sorted(rng.sample(range(5, 295), n_boxes))
        plant = make_plant(
            loops=(("loop1", 300.0, tube_count, 12),),
            boxes=tuple((f"bx{i}", "loop1", float(c)) for i, c in enumerate(chainages)),
            sfp_ports=512,
            allow_same_box_double_tap=rng.random() < 0.2,
        )
        entries = []
        for i in range(n_boxes):
            count = rng.randint(0, 3)
            if count:
                requests = tuple(
                    UplinkRequest(rng.choice([LinkMode.DUPLEX, LinkMode.SIMPLEX]))
                    for _ in range(count)
                )
                entries.append(BoxDemand(f"bx{i}", requests))
        try:
            plan = allocate(plant, DemandSpec(demands=tuple(entries)))
        except CapacityError:
            continue
        allocations += 1
        applied = apply_plan(plant, plan)
        assert overlapping_taps(applied) == [], "segment-overlap oracle found a conflict"
        assert illegal_double_taps(applied) == []
        sides = {}
        for box, tap in [(b, t) for b in applied.boxes for t in b.taps]:
            key = (box.cable, tap.tube_index, tap.side)
            assert key not in sides, "two taps on one (tube, side)"
            sides[key] = box.chainage_m
        for cable in applied.loops:
            for tube in range(1, cable.tube_count + 1):
                pa = sides.get((cable.id, tube, A))
                pb = sides.get((cable.id, tube, B))
                if pa is not None and pb is not None:
                    assert pa <= pb, "toward-A chainage past toward-B"

    elapsed = time.monotonic() - started
    assert plants >= 1000
    assert allocations >= 700, f"only {allocations} allocations succeeded"
    assert elapsed < 30.0, f"took {elapsed:.1f} s, budget 30 s"
    _pass(3, f"{plants} plants, {allocations} allocations, zero violations ({elapsed:.1f} s)")


def criterion_4_redundancy_theorem():
    started = time.monotonic()
    cases = 0
    for length, tubes, (chainage_a, chainage_b) in itertools.product(
        (100.0, 250.0),
        (1, 2),
        ((10.0, 90.0), (30.0, 60.0), (5.0, 95.0), (40.0, 75.0)),
    ):
        ca = chainage_a * length / 100.0
        cb = chainage_b * length / 100.0
        paired = desk_pair_plant(cross_link=True, chainage_a=ca, chainage_b=cb, length=length)
        if tubes == 1:
            import dataclasses

            paired = dataclasses.replace(
                paired, loops=(dataclasses.replace(paired.loops[0], tube_count=1),)
            )
        report = enumerate_single_failures(paired)
        cuts = [e for e in report.entries if e.kind == "cable_cut"]
        assert cuts
        assert all(e.lost_user_ports == 0 for e in cuts), "a cut broke the redundant pair"

        bare = desk_pair_plant(cross_link=False, chainage_a=ca, chainage_b=cb, length=length)
        bare_report = enumerate_single_failures(bare)
        bare_cuts = [e for e in bare_report.entries if e.kind == "cable_cut"]
        assert any(e.lost_user_ports == 4 for e in bare_cuts), "no cut lost exactly 4 ports"
        assert all(e.lost_user_ports in (0, 4) for e in bare_cuts)
        cases += 1

    elapsed = time.monotonic() - started
    assert elapsed < 10.0, f"took {elapsed:.1f} s, budget 10 s"
    _pass(4, f"{cases} plant variants: cuts lose 0 ports with copper, exactly 4 without ({elapsed:.1f} s)")


def criterion_5_spanning_tree_oracle():
    checked = 0
    # systematic small patterns: 1-2 cores, 1-4 switches, every side mix,
    # with and without a cross-linked pair
    for cores, n_switches in itertools.product((1, 2), (1, 2, 3, 4)):
        for sides in itertools.product((A, B), repeat=n_switches):
            for linked in (False, True):
                switches = []
                taps = []
                for i, side in enumerate(sides):
                    taps.append(("bx0" if side == A else "bx1", i + 1, side))
                    core = "core1" if (side == A or cores == 1) else "core2"
                    switches.append(
                        {
                            "id": f"sw{i}",
                            "box": "bx0" if side == A else "bx1",
                            "uplink": {
                                "mode": "duplex", "tube": i + 1, "side": side.value,
                                "fibers": (1, 2), "core": core, "core_port": i,
                            },
                        }
                    )
                if linked and n_switches >= 2:
                    switches[0]["cross_link_peer"] = "sw1"
                    switches[1]["cross_link_peer"] = "sw0"
                plant = make_plant(
                    loops=(("loop1", 100.0, max(4, n_switches), 12),),
                    boxes=(("bx0", "loop1", 20.0), ("bx1", "loop1", 80.0)),
                    taps=tuple(taps),
                    switches=switches,
                    cores=cores,
                )
                graph = build_graph(plant)
                assert len(graph.nodes) <= 7
                tree = spanning_tree(graph)
                roots, active, blocking = oracle_spanning_tree(graph)
                assert (list(tree.roots), list(tree.active), list(tree.blocking)) == (
                    roots,
                    active,
                    blocking,
                ), "tree disagrees with brute-force root-path selection"
                checked += 1
    # plus randomized plant patterns
    rng = random.Random(5150)
    for _ in range(120):
        graph = build_graph(random_failsim_plant(rng))
        tree = spanning_tree(graph)
        roots, active, blocking = oracle_spanning_tree(graph)
        assert (list(tree.roots), list(tree.active), list(tree.blocking)) == (roots, active, blocking)
        checked += 1
    _pass(5, f"{checked} graphs: zero mismatches against the brute-force oracle")


def criterion_6_poe_derating():
    assert delivered_power(90.0, 100.0, "bt") == 70.0
    assert delivered_power(90.0, 0.0, "bt") == 90.0
    previous = float("inf")
    for tenths in range(0, 1001):
        value = delivered_power(90.0, tenths / 10.0, "bt")
        assert value <= previous
        previous = value
    _pass(6, "bt: 90 W -> 70 W at 100 m, 90 W at 0 m, monotone over 0-100 m")


def criterion_7_cost_sensitivity():
    from test_estimate import fleet_plant

    estimate = cost_estimate(fleet_plant(800))
    delta = estimate.sensitivity("switch", 25.0)
    assert delta == 20000.0
    _pass(7, "800 switches x +25 EUR = +20000 EUR exactly")


def criterion_8_labeling_round_trips():
    rng = random.Random(424242)
    for _ in range(5000):
        ref = FiberRef(
            rng.choice(list(Direction)),
            rng.choice("ABCDEFGHJKLMNPQRSTUVWXYZ0123456789"),
            rng.randrange(12),
            rng.randrange(12),
        )
        letter = rng.choice(["R", "B"])
        assert parse_fiber_ref(encode_fiber_ref(ref, return_letter=letter)) == ref
    for _ in range(5000):
        label = BoxPortLabel(
            rng.randrange(10), rng.randrange(100), rng.randint(1, 6), rng.choice("dab")
        )
        encoded = box_port_label(label.loop_no, label.box_no, label.pair_no, label.mode_suffix)
        assert parse_box_port_label(encoded) == label

    tables = {
        "fotag": FOTAG_ROWS,
        "alphabetic": ALPHABETIC_ROWS,
        "francetelecom": FRANCE_TELECOM_ROWS,
    }
    for name, rows in tables.items():
        scheme = ColorScheme.named(name)
        assert [color_of(scheme, i) for i in range(1, 13)] == rows
    _pass(8, "10000 encode->parse round trips; 3 color tables match row for row")


def criterion_9_cli_determinism(tmp_root: Path):
    ref = str(golden_path("ref_loop12x12.json"))
    legi = str(golden_path("legi.json"))
    legi_demand = str(golden_path("legi_demand.json"))
    deadzone = str(golden_path("deadzone_cut.json"))

    validate_outputs = []
    for run in ("a", "b"):
        out = tmp_root / run
        out.mkdir(parents=True, exist_ok=True)
        captured = io.StringIO()
        with contextlib.redirect_stdout(captured):
            assert cli_main(["validate", "--plant", legi]) == 0
        validate_outputs.append(captured.getvalue())
        assert cli_main(["plan", "--plant", legi, "--demand", legi_demand, "--out", str(out / "plan")]) == 0
        assert cli_main(["labels", "--plant", ref, "--out", str(out / "labels")]) == 0
        assert cli_main(["simulate", "--plant", ref, "--out", str(out / "sim"), "--format", "graph"]) == 0
        assert cli_main(["whatif", "--plant", ref, "--scenario", deadzone, "--out", str(out / "whatif")]) == 0
        assert cli_main(["cost", "--plant", ref, "--out", str(out / "cost")]) == 0
        assert cli_main(["report", "--plant", ref, "--out", str(out / "report"), "--format", "document"]) == 0

    assert validate_outputs[0] == validate_outputs[1]
    assert "432 panel ports" in validate_outputs[0]
    first, second = tmp_root / "a", tmp_root / "b"
    files = sorted(p.relative_to(first) for p in first.rglob("*") if p.is_file())
    assert files, "no outputs emitted"
    for rel in files:
        assert (first / rel).read_bytes() == (second / rel).read_bytes(), f"{rel} differs"
    _pass(9, f"validate plus {len(files)} emitted files byte-identical across two runs")


# -- pytest entry points ----------------------------------------------------------


def test_criterion_1():
    criterion_1_figure6_arithmetic()


def test_criterion_2():
    criterion_2_reference_loop()


def test_criterion_3():
    criterion_3_tube_reuse_invariants()


def test_criterion_4():
    criterion_4_redundancy_theorem()


def test_criterion_5():
    criterion_5_spanning_tree_oracle()


def test_criterion_6():
    criterion_6_poe_derating()


def test_criterion_7():
    criterion_7_cost_sensitivity()


def test_criterion_8():
    criterion_8_labeling_round_trips()


def test_criterion_9(tmp_path):
    criterion_9_cli_determinism(tmp_path)


if __name__ == "__main__":
    import tempfile

    failures = 0
    steps = [
        criterion_1_figure6_arithmetic,
        criterion_2_reference_loop,
        criterion_3_tube_reuse_invariants,
        criterion_4_redundancy_theorem,
        criterion_5_spanning_tree_oracle,
        criterion_6_poe_derating,
        criterion_7_cost_sensitivity,
        criterion_8_labeling_round_trips,
    ]
    for i, step in enumerate(steps, start=1):
        try:
            step()
        except AssertionError as exc:
            failures += 1
            print(f"FAIL criterion {i}: {exc}")
    with tempfile.TemporaryDirectory() as tmp:
        try:
            criterion_9_cli_determinism(Path(tmp))
        except AssertionError as exc:
            failures += 1
            print(f"FAIL criterion 9: {exc}")
    sys.exit(1 if failures else 0)
