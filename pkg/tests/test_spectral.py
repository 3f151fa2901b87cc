import io
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewdich.base_space import DEFAULT_GENERATOR, BasePoint, DomainError
from skewdich.cocycles import compose_residual
from skewdich.spectral import (
    ModeVector,
    SpectralCocycle,
    semigroup_apply,
    spectral_cocycle_apply,
    spectral_evolution,
    write_samples_csv,
)

X0 = BasePoint(DEFAULT_GENERATOR, 0.0)
LIMIT = BasePoint(DEFAULT_GENERATOR, math.inf)
# mpmath: e^{-pi^2 / 10}
MODE_ONE_AT_TENTH = 0.372707838853437914

coeffs = st.lists(st.floats(-10, 10), min_size=1, max_size=8).map(tuple)


def test_mode_zero_is_fixed():
    v = ModeVector.basis(0, 4)
    assert semigroup_apply(v, 123.0) == v


def test_mode_one_value():
    assert semigroup_apply(ModeVector.basis(1), 0.1)[1] == pytest.approx(MODE_ONE_AT_TENTH, abs=1e-12)


@given(coeffs, st.floats(0, 2), st.floats(0, 2))
def test_semigroup_law(a, s, t):
    v = ModeVector(a)
    left = semigroup_apply(semigroup_apply(v, s), t)
    right = semigroup_apply(v, s + t)
    for x, y in zip(left.coefficients, right.coefficients):
        assert x == pytest.approx(y, abs=1e-12)


def test_limit_point_matches_the_semigroup():
    v = ModeVector.basis(1)
    assert spectral_cocycle_apply(5.1, 5.0, LIMIT, v)[1] == pytest.approx(MODE_ONE_AT_TENTH, abs=1e-12)
    assert spectral_cocycle_apply(3.0, 3.0, X0, v) == v


@given(coeffs, st.floats(0, 10), st.floats(0, 10), st.floats(0, 5))
def test_norm_never_grows(a, s, dt, offset):
    v = ModeVector(a)
    out = spectral_cocycle_apply(s + dt, s, BasePoint(DEFAULT_GENERATOR, offset), v)
    assert out.norm() <= v.norm() * (1 + 1e-15)


def test_cocycle_law_example():
    C = spectral_evolution()
    assert compose_residual(C, 2.0, 1.0, 0.0, X0, ModeVector.basis(1).coefficients) <= 1e-9


def test_log_interface_matches_linear_values():
    c = SpectralCocycle(4)
    out = c.apply(1.3, 1.0, X0, (1.0, 2.0, 0.0, -1.0))
    lin = spectral_cocycle_apply(1.3, 1.0, X0, ModeVector((1.0, 2.0, 0.0, -1.0)))
    assert [o.to_float() for o in out] == pytest.approx(list(lin.coefficients), rel=1e-13)
    assert out[2].is_zero


def test_errors():
    with pytest.raises(DomainError):
        semigroup_apply(ModeVector.basis(1), -0.1)
    with pytest.raises(DomainError):
        spectral_cocycle_apply(1.0, 2.0, X0, ModeVector.basis(1))
    with pytest.raises(ValueError):
        ModeVector(())
    with pytest.raises(ValueError):
        SpectralCocycle(3).apply(1.0, 0.0, X0, (1.0, 0.0))


def test_point_values_and_csv():
    v = ModeVector((1.0, 0.5))
    assert v.value_at(0.0) == pytest.approx(1.0 + 0.5 * math.sqrt(2))
    assert v.value_at(0.5) == pytest.approx(1.0, abs=1e-15)
    buf = io.StringIO()
    write_samples_csv(buf, v, X0, [0.0, 0.1], [0.0, 1.0])
    lines = buf.getvalue().splitlines()
    assert lines[0] == "t,y,value" and len(lines) == 5
