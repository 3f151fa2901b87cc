import math

import pytest

from skewdich import gallery
from skewdich.base_space import DEFAULT_GENERATOR, BasePoint
from skewdich.growth import GrowthBounds, bounded_margin, fit_growth, growth_margin, operator_log_norm
from skewdich.grid import Axis, GridSpec
from skewdich.projectors import coordinate_pair, restrict

GRID = GridSpec(Axis(0, 30, 20), Axis(0, 30, 20))
X0 = BasePoint(DEFAULT_GENERATOR, 0.0)


def test_pure_growth_rate_two():
    C = gallery.get("pure_growth").evolution()
    b = fit_growth(C, "growth", GRID)
    assert b.certified and b.uniform and b.bounded
    assert b.omega == pytest.approx(2.0, abs=1e-6)
    assert b.log_k == pytest.approx(0.0, abs=1e-6)


def test_decaying_branch_needs_only_the_floor():
    C = gallery.get("synthetic").evolution()
    C1 = restrict(C, coordinate_pair(), 1, X0)
    b = fit_growth(C1, "growth", GRID)
    assert b.certified and b.log_k <= 1e-6 and b.omega <= 1e-5


def test_decay_of_the_unstable_branch():
    C = gallery.get("synthetic").evolution()
    C2 = restrict(C, coordinate_pair(), 2, X0)
    b = fit_growth(C2, "decay", GRID)
    assert b.certified and b.log_k <= 1e-6


def test_margin_is_tight_for_the_fitted_bound():
    C = gallery.get("pure_growth").evolution()
    exact = GrowthBounds("growth", 0.0, 0.0, 2.0)
    assert abs(growth_margin(C, exact, GRID)) <= 1e-9
    assert growth_margin(C, GrowthBounds("growth", 0.0, 0.0, 1.5), GRID) == pytest.approx(15.0, rel=1e-9)


def test_operator_norm_is_largest_column():
    C = gallery.get("synthetic").evolution()
    assert operator_log_norm(C, 3.0, 1.0, X0) == pytest.approx(4.0)
    assert bounded_margin(C, 0.0, 2.0, GRID) <= 1e-9


def test_ed_gap_decay_is_not_certified():
    inst = gallery.get("ed_gap")
    C2 = restrict(inst.evolution(), inst.pair, 2, X0)
    assert not fit_growth(C2, "decay", GridSpec(), inst.generator, inst.hint).certified


def test_bounds_validation_and_shift():
    with pytest.raises(ValueError):
        GrowthBounds("growth", -1.0)
    with pytest.raises(ValueError):
        GrowthBounds("sideways")
    with pytest.raises(ValueError):
        GrowthBounds("decay").shifted(1.0)
    b = GrowthBounds("growth", 0.0, 0.5, 1.0).shifted(2.0)
    assert b.omega == 3.0 and b.log_m(2.0) == pytest.approx(1.0)
    assert not math.isnan(b.log_m(0.0))
