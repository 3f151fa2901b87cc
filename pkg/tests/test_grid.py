import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewdich import gallery
from skewdich.base_space import DEFAULT_GENERATOR
from skewdich.grid import Axis, GridSpec, collect_rows
from skewdich.projectors import coordinate_pair


def test_axis_parse_and_errors():
    a = Axis.parse("0:10:5", "linear")
    assert a.values() == [0.0, 2.5, 5.0, 7.5, 10.0]
    for bad in ("0:10", "a:b:c", "5:1:3", "0:1:1"):
        with pytest.raises(ValueError):
            Axis.parse(bad)


@given(st.floats(0, 50), st.floats(1, 50), st.integers(2, 40))
def test_log_mix_axis_stays_in_range(lo, width, count):
    vals = Axis(lo, lo + width, count).values()
    assert vals == sorted(vals)
    assert vals[0] == pytest.approx(lo) and vals[-1] == pytest.approx(lo + width)


def test_points_are_ordered():
    g = GridSpec(Axis(0, 10, 6), Axis(0, 10, 6), t0_values=(0.0, 3.0))
    for t, s, t0 in g.points():
        assert t >= s >= t0


def test_polynomial_grid_starts_at_one():
    g = GridSpec().polynomial()
    pts = list(g.points())
    assert min(s for _, s, _ in pts) == 1.0
    assert g.s_min == 1.0


def test_breakpoints_are_merged():
    inst = gallery.get("ed_gap")
    g = GridSpec(Axis(0, 4, 3, "linear"), Axis(0, 4, 3, "linear")).with_breakpoints(inst.cocycle)
    assert 1.25 in g.extra and 3.015625 in g.extra
    assert 1.25 in {s for _, s, _ in g.points()}
    off = GridSpec(Axis(0, 4, 3), Axis(0, 4, 3), breakpoints=False).with_breakpoints(inst.cocycle)
    assert off.extra == ()


def test_rows_cover_both_branches_and_skip_zero_projections():
    inst = gallery.get("synthetic")
    g = GridSpec(Axis(0, 2, 2, "linear"), Axis(0, 2, 2, "linear"), vectors=((1.0, 0.0),))
    rows = collect_rows(inst.evolution(), coordinate_pair(), g, DEFAULT_GENERATOR)
    # (1, 0) has no unstable component, so only branch 1 rows exist
    assert rows and {r.branch for r in rows} == {1}
    r = next(r for r in rows if r.t == 2.0 and r.s == 0.0)
    assert r.value == pytest.approx(-4.0)


def test_empty_grid_rejected():
    g = GridSpec(Axis(0, 1, 2), Axis(5, 6, 2))
    assert g.is_empty()
    with pytest.raises(ValueError):
        collect_rows(gallery.get("synthetic").evolution(), None, g, DEFAULT_GENERATOR)
