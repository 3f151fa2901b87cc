"""The eleven acceptance criteria. Each test carries its number; a summary
block with one PASS/FAIL line per criterion is printed at the end of the run."""

import math

import numpy as np
import pytest

from skewdich import gallery
from skewdich.base_space import DEFAULT_GENERATOR, BasePoint, metric
from skewdich.cli import compose_sweep, main
from skewdich.criteria import Gauge, check_criterion_i, check_criterion_ii
from skewdich.dichotomy import ClassParams, DichotomyClass as D, class_margin, convert, falsify, fit_class, params_at
from skewdich.grid import Axis, GridSpec
from skewdich.projectors import coordinate_pair, restrict
from skewdich.spectral import ModeVector, semigroup_apply, spectral_cocycle_apply, spectral_evolution

X0 = BasePoint(DEFAULT_GENERATOR, 0.0)
RANDOM_INSTANCES = 50


@pytest.mark.acceptance(1, "cocycle law on 1000 random triples, 7 instances + spectral")
def test_cocycle_law():
    worst = {}
    for name in gallery.SOURCE_INSTANCES:
        inst = gallery.get(name)
        worst[name] = compose_sweep(inst.evolution(), inst.generator, 2, 1000, seed=1)["max_residual_log"]
    worst["spectral"] = compose_sweep(spectral_evolution(), DEFAULT_GENERATOR, 32, 1000, seed=1)["max_residual_log"]
    assert max(worst.values()) <= 1e-9, worst


@pytest.mark.acceptance(2, "BVED certificate with N=1, alpha1=alpha2=beta2=2, beta1=4 on bved")
def test_bved_certificate_constants():
    inst = gallery.get("bved")
    params = ClassParams.make(D.BVED, {"log_n": 0.0, "alpha1": 2.0, "beta1": 4.0, "alpha2": 2.0, "beta2": 2.0})
    grid = GridSpec(Axis(0, 60, 60, "linear"), Axis(0, 60, 60, "linear"))
    margin = class_margin(inst.evolution(), inst.pair, D.BVED, params, grid, inst.generator)
    assert margin <= 1e-9, f"worst log-margin {margin:.6f}"


@pytest.mark.acceptance(3, "sin-peaks witness: margin increments 2 pi for any fixed constants")
@pytest.mark.parametrize("log_n,rate", [(0.0, 1e-3), (10.0, 1e-3), (10.0, 1.0), (5.0, 7.5)])
def test_sin_peaks_increments(log_n, rate):
    inst = gallery.get("bved")
    w = falsify(inst.evolution(), inst.pair, D.UED, params_at(D.UED, log_n, rate, 1.0),
                inst.witness("sin-peaks"), range(1, 9), inst.generator)
    assert len(w.increments) == 7
    for inc in w.increments:
        assert abs(inc - 2 * math.pi) <= 1e-6


@pytest.mark.acceptance(4, "ed_gap: ED certified with gauge g(u) e^{2u}, nu=2; knot-drop > 150 by n=3")
def test_ed_gap_certificate_and_witness():
    inst = gallery.get("ed_gap")
    C = inst.evolution()
    ed = ClassParams.make(D.ED, {"log_k1": 0.0, "eta1": 2.0, "nu1": 2.0, "log_k2": 0.0, "eta2": 2.0, "nu2": 2.0},
                          hints=inst.hints)
    assert class_margin(C, inst.pair, D.ED, ed, GridSpec(), inst.generator) <= 1e-9
    w = falsify(C, inst.pair, D.BVED, params_at(D.BVED, 10.0, 1e-3, 1.0), inst.witness("knot-drop"),
                range(1, 4), inst.generator)
    assert w.margins_log[-1] > 150


def _random_slopes(seed):
    rng = np.random.default_rng(seed)
    return [tuple(float(v) for v in rng.uniform(0.5, 3.0, 2)) for _ in range(RANDOM_INSTANCES)]


@pytest.mark.acceptance(5, "UED constants convert to UPD on 50 random diagonal instances")
def test_ued_to_upd():
    grid = GridSpec()
    rng = np.random.default_rng(5)
    for nu1, nu2 in _random_slopes(5):
        inst = gallery.synthetic(-nu1, nu2)
        C = inst.evolution()
        log_n = float(rng.uniform(0, 2))
        ued = ClassParams.make(D.UED, {"log_n1": log_n, "nu1": nu1, "log_n2": log_n, "nu2": nu2})
        assert class_margin(C, inst.pair, D.UED, ued, grid) <= 1e-9
        upd = convert(ued, D.UPD)
        assert upd["alpha1"] == nu1 and upd["log_n"] == log_n
        assert class_margin(C, inst.pair, D.UPD, upd, grid.polynomial()) <= 1e-9


@pytest.mark.acceptance(6, "BVED (alpha >= beta) -> BVPD and ED -> PD on 50 random instances each")
def test_other_conversions():
    grid = GridSpec()
    rng = np.random.default_rng(6)
    for nu1, nu2 in _random_slopes(6):
        inst = gallery.synthetic(-nu1, nu2)
        C = inst.evolution()
        # the t = s rows force beta >= alpha, so alpha >= beta leaves alpha = beta
        a1, a2 = float(rng.uniform(0.1, nu1)), float(rng.uniform(0.1, nu2))
        log_n = float(rng.uniform(0, 2))
        bved = ClassParams.make(D.BVED, {"log_n": log_n, "alpha1": a1, "beta1": a1,
                                         "alpha2": a2, "beta2": a2})
        assert class_margin(C, inst.pair, D.BVED, bved, grid) <= 1e-9
        assert class_margin(C, inst.pair, D.BVPD, convert(bved, D.BVPD), grid.polynomial()) <= 1e-9
        eta = max(nu1, nu2) + float(rng.uniform(0, 2))  # K e^{eta s} e^{-nu t} needs eta >= nu
        ed = ClassParams.make(D.ED, {"log_k1": log_n, "eta1": eta, "nu1": nu1,
                                     "log_k2": log_n, "eta2": eta, "nu2": nu2})
        assert class_margin(C, inst.pair, D.ED, ed, grid) <= 1e-9
        assert class_margin(C, inst.pair, D.PD, convert(ed, D.PD), grid.polynomial()) <= 1e-9


@pytest.mark.acceptance(7, "integral criteria on the synthetic ED instance (gamma=rho=1, D=Dtilde=2)")
def test_necessity_roundtrip():
    inst = gallery.get("synthetic")
    C = inst.evolution()
    C1, C2 = restrict(C, coordinate_pair(), 1, X0), restrict(C, coordinate_pair(), 2, X0)
    ed = ClassParams.make(D.ED, {"log_k1": 0, "eta1": 0, "nu1": 2, "log_k2": 0, "eta2": 0, "nu2": 2})
    pts_i = [(s, X0) for s in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)]
    pts_ii = [(t0 + d, t0, X0) for t0 in (0.0, 1.0, 5.0) for d in (0.5, 1.0, 5.0, 10.0, 30.0)]
    ci = check_criterion_i(C1, 1.0, Gauge.constant(2.0), ed, pts_i)
    cii = check_criterion_ii(C2, 1.0, Gauge.constant(2.0), pts_ii)
    assert ci.status == "certified" and cii.status == "certified"
    assert ci.max_relative_error < 1e-6 and cii.max_relative_error < 1e-6
    assert ci.max_tail_bound < 1e-10


@pytest.mark.acceptance(8, "spectral: semigroup law, norm monotone, mode-1 value at t=0.1")
def test_spectral():
    rng = np.random.default_rng(8)
    for _ in range(100):
        v = ModeVector(tuple(rng.normal(size=32)))
        a, b = rng.uniform(0, 1, 2)
        left = semigroup_apply(semigroup_apply(v, a), b).coefficients
        right = semigroup_apply(v, a + b).coefficients
        assert max(abs(x - y) for x, y in zip(left, right)) <= 1e-12
    for _ in range(1000):
        s, dt = rng.uniform(0, 30, 2)
        x = BasePoint(DEFAULT_GENERATOR, float(rng.uniform(0, 10)))
        v = ModeVector(tuple(rng.normal(size=32)))
        assert spectral_cocycle_apply(s + dt, s, x, v).norm() <= v.norm()
    assert abs(semigroup_apply(ModeVector.basis(1), 0.1)[1] - math.exp(-math.pi**2 / 10)) <= 1e-12


@pytest.mark.acceptance(9, "metric from f = 1 + e^{-u} to the constant limit point is 0.5")
def test_metric():
    assert abs(metric(X0, BasePoint(DEFAULT_GENERATOR, math.inf), n_terms=40) - 0.5) <= 1e-9


@pytest.mark.acceptance(10, "fitter recovers nu1 = nu2 = 2 and N = 1 on the slope -2/+2 instance")
def test_fitter_recovery():
    inst = gallery.get("synthetic")
    cert = fit_class(inst.evolution(), inst.pair, D.UED, GridSpec())
    assert cert.certified
    assert abs(cert.params["nu1"] - 2.0) <= 1e-3 and abs(cert.params["nu2"] - 2.0) <= 1e-3
    assert math.exp(cert.params["log_n1"]) <= 1 + 1e-6 and math.exp(cert.params["log_n2"]) <= 1 + 1e-6


@pytest.mark.acceptance(11, "classify --gallery bved twice gives byte-identical reports")
def test_deterministic_report(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert main(["classify", "--gallery", "bved", "--out", str(a)]) == 0
    assert main(["classify", "--gallery", "bved", "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
