from fttoplan.estimate import cost_estimate
from fttoplan.failsim import enumerate_single_failures
from fttoplan.reports import (
    estimator_assumptions,
    render_cost_breakdown,
    render_criticality,
    render_loop_layout,
    write_records,
)
from fttoplan.version import GENERATOR

PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def test_write_records_layout(tmp_path):
    path = tmp_path / "r.csv"
    write_records(
        path,
        ["a", "b"],
        [{"a": 1, "b": 2.5}, {"a": "x", "b": True}],
        assumptions=["something assumed"],
    )
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == f"# {GENERATOR}"
    assert lines[1] == "# assumption: something assumed"
    assert lines[2] == "a,b"
    assert lines[3] == "1,2.5"
    assert lines[4] == "x,yes"


def test_write_records_deterministic(tmp_path):
    rows = [{"k": i, "v": i * 0.5} for i in range(10)]
    one, two = tmp_path / "1.csv", tmp_path / "2.csv"
    write_records(one, ["k", "v"], rows)
    write_records(two, ["k", "v"], rows)
    assert one.read_bytes() == two.read_bytes()


def test_figures_render_valid_png(tmp_path, ref_plant):
    layout = tmp_path / "layout.png"
    render_loop_layout(ref_plant, layout)
    assert layout.read_bytes()[:8] == PNG_MAGIC

    crit = tmp_path / "crit.png"
    render_criticality(enumerate_single_failures(ref_plant), crit)
    assert crit.read_bytes()[:8] == PNG_MAGIC

    cost = tmp_path / "cost.png"
    render_cost_breakdown(cost_estimate(ref_plant), cost)
    assert cost.read_bytes()[:8] == PNG_MAGIC


def test_figures_byte_stable(tmp_path, ref_plant):
    one, two = tmp_path / "a.png", tmp_path / "b.png"
    render_loop_layout(ref_plant, one)
    render_loop_layout(ref_plant, two)
    assert one.read_bytes() == two.read_bytes()


def test_assumptions_mention_tool_defaults(ref_plant):
    notes = estimator_assumptions(ref_plant)
    assert any("PoE budget" in n for n in notes)
    assert any("EEPoE" in n for n in notes)
