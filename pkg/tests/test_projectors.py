import numpy as np
import pytest

from skewdich import gallery
from skewdich.base_space import DEFAULT_GENERATOR, BasePoint
from skewdich.projectors import (
    IncompatibleProjectors,
    ProjectorError,
    ProjectorFamily,
    check_compatible,
    complementary,
    coordinate,
    coordinate_pair,
    pair_from_matrix,
    restrict,
)

X0 = BasePoint(DEFAULT_GENERATOR, 0.0)


def test_coordinate_pair_is_complementary_and_invariant():
    pair = coordinate_pair()
    pair.check(X0)
    for name in gallery.NAMES:
        assert check_compatible(gallery.get(name).evolution(), pair, X0) <= 1e-9


def test_complement_of_complement():
    p = coordinate(0)
    q = complementary(p, X0)
    assert np.array_equal(q.matrix(X0), np.diag([0.0, 1.0]))
    assert complementary(q).name == p.name


def test_non_projector_rejected():
    bad = ProjectorFamily.constant([[1.0, 1.0], [0.0, 0.5]])
    with pytest.raises(ProjectorError):
        bad.check_idempotent(X0)


def test_oblique_projector_is_not_invariant_under_a_split_cocycle():
    # a valid projector whose range mixes the two growth directions
    pair = pair_from_matrix([[0.5, 0.5], [0.5, 0.5]])
    pair.check(X0)
    with pytest.raises(IncompatibleProjectors) as err:
        check_compatible(gallery.get("synthetic").evolution(), pair, X0)
    assert err.value.point["residual"] > 1e-9


def test_restriction_kills_the_other_branch():
    C = gallery.get("synthetic").evolution()
    C1 = restrict(C, coordinate_pair(), 1, X0)
    out = C1.apply(2.0, 0.0, X0, (1.0, 1.0))
    assert out[1].is_zero and out[0].log_abs == pytest.approx(-4.0)
    with pytest.raises(ValueError):
        restrict(C, coordinate_pair(), 3, X0)
