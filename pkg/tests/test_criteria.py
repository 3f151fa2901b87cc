import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from skewdich import gallery
from skewdich.base_space import DEFAULT_GENERATOR, BasePoint
from skewdich.criteria import (
    CriterionDiverges,
    Gauge,
    criterion_i_value,
    criterion_ii_value,
    necessity_constants,
    criteria_roundtrip,
)
from skewdich.dichotomy import ClassParams, DichotomyClass as D, fit_class
from skewdich.grid import GridSpec
from skewdich.projectors import coordinate_pair, restrict

X0 = BasePoint(DEFAULT_GENERATOR, 0.0)
SYNTH = gallery.get("synthetic")
ED = ClassParams.make(D.ED, {"log_k1": 0, "eta1": 0, "nu1": 2, "log_k2": 0, "eta2": 0, "nu2": 2})


def _branch(k):
    return restrict(SYNTH.evolution(), coordinate_pair(), k, X0)


@given(st.floats(0, 20), st.floats(0.1, 5))
def test_criterion_i_closed_form(s, v1):
    # int_s^inf e^{(tau - s)} e^{-2 (tau - s)} v1 dtau = v1
    val = criterion_i_value(_branch(1), 1.0, s, X0, (v1, 3.0), ED)
    assert math.exp(val.log_value) == pytest.approx(v1, rel=1e-9)
    assert val.tail_bound < 1e-10 and val.relative_error < 1e-6


@given(st.floats(0, 10), st.floats(0.01, 20))
def test_criterion_ii_closed_form(t0, span):
    # int e^{(t - tau)} e^{2 (tau - t0)} dtau = e^{2 span} - e^{span}
    val = criterion_ii_value(_branch(2), 1.0, t0 + span, t0, X0, (0.0, 1.0))
    exact = math.log(math.expm1(2 * span) - math.expm1(span))
    assert val.log_value == pytest.approx(exact, abs=1e-9)


def test_criterion_i_needs_gamma_below_nu():
    with pytest.raises(CriterionDiverges):
        criterion_i_value(_branch(1), 2.5, 0.0, X0, (1.0, 0.0), ED)
    with pytest.raises(ValueError):
        criterion_i_value(_branch(1), 0.0, 0.0, X0, (1.0, 0.0), ED)


def test_necessity_constants_for_the_synthetic_instance():
    gamma, D1, rho, D2 = necessity_constants(ED)
    assert (gamma, rho) == (1.0, 1.0)
    assert D1.log(7.0) == pytest.approx(0.0) and D2.log(7.0) == pytest.approx(math.log(2.0))


def test_gauge_floor():
    assert Gauge(-3.0).log(1.0) == 0.0
    assert Gauge(-3.0, at_least_one=False).log(1.0) == -3.0
    assert Gauge.constant(2.0).log(100.0) == pytest.approx(math.log(2.0))


def test_roundtrip_synthetic_certifies():
    cert = fit_class(SYNTH.evolution(), SYNTH.pair, D.ED, GridSpec())
    r = criteria_roundtrip(SYNTH.evolution(), SYNTH.pair, cert, GridSpec())
    assert r.status == "certified"
    j = r.to_json()
    assert set(j) >= {"gamma", "rho", "D", "Dtilde", "worst_slack_log", "tail_bound"}
    assert j["tail_bound"] < 1e-10


def test_roundtrip_pure_growth_not_applicable():
    inst = gallery.get("pure_growth")
    cert = fit_class(inst.evolution(), inst.pair, D.ED, GridSpec())
    r = criteria_roundtrip(inst.evolution(), inst.pair, cert, GridSpec())
    assert not r.applicable


def test_ed_gap_criterion_i_with_force():
    inst = gallery.get("ed_gap")
    C = inst.evolution()
    cert = fit_class(C, inst.pair, D.ED, GridSpec(), inst.generator, inst.hints, inst.claimed_params[D.ED])
    gated = criteria_roundtrip(C, inst.pair, cert, GridSpec(), inst.generator, inst.hint)
    assert not gated.applicable
    r = criteria_roundtrip(C, inst.pair, cert, GridSpec(), inst.generator, inst.hint, force=True)
    assert r.criterion_i.status == "certified"
    assert "hypothesis gates forced" in r.notes


def test_growing_gauge_read_at_t0_fails_but_holds_at_t():
    inst = gallery.get("bved")
    C = inst.evolution()
    cert = fit_class(C, inst.pair, D.ED, GridSpec(), inst.generator, inst.hints)
    r = criteria_roundtrip(C, inst.pair, cert, GridSpec(), inst.generator)
    assert r.criterion_i.status == "certified"
    assert r.criterion_ii.status == "failed"
    assert r.criterion_ii.worst_slack_log_gauge_at_t > 0
