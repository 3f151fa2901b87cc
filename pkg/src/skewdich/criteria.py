"""Integral criteria for exponential dichotomy, evaluated by log-space quadrature.

(i)  int_s^inf  e^{gamma (tau - s)} ||Phi_1(tau, s, x) v|| dtau <= D(s) ||P_1(x) v||
(ii) int_t0^t   e^{rho (t - tau)}   ||Phi_2(tau, t0, x) v|| dtau <= Dt(t0) ||Phi_2(t, t0, x) v||

The infinite integral in (i) is truncated at T and the rest is bounded
analytically from the ED constants of the stable branch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

from .base_space import DEFAULT_GENERATOR, BasePoint, DomainError, GeneratorSpec
from .cocycles import SkewEvolution, to_log_vector
from .dichotomy import Certificate, ClassParams, DichotomyClass
from .expressions import ZERO, Expression
from .grid import GridSpec
from .growth import fit_growth
from .logscalar import NEG_INF, log_l1_norm
from .projectors import ProjectorPair, check_compatible, restrict
from .quadrature import integrate_log

TAIL_RTOL = 1e-10
QUAD_RTOL = 1e-12
SLACK_TOL = 1e-6


class CriterionDiverges(ValueError):
    """The integral in criterion (i) does not converge."""


@dataclass(frozen=True)
class Gauge:
    """u -> exp(log_k + eta u + hint(u)), floored at 1 when ``at_least_one``."""

    log_k: float = 0.0
    eta: float = 0.0
    hint: Expression = ZERO
    at_least_one: bool = True

    def log(self, u: float) -> float:
        v = math.fsum([self.log_k, self.eta * u, *self.hint.term_values(u)])
        return max(v, 0.0) if self.at_least_one else v

    @classmethod
    def constant(cls, value: float) -> "Gauge":
        return cls(math.log(value))

    def to_json(self) -> dict[str, Any]:
        return {"log_k": self.log_k, "eta": self.eta, "hint": self.hint.to_json(), "floor_one": self.at_least_one}


@dataclass(frozen=True)
class IntegralValue:
    log_value: float
    relative_error: float
    tail_bound: float = 0.0   # relative to the partial integral
    upper: float = math.nan   # truncation point T, or t

    def log_upper_bound(self) -> float:
        """log of value * (1 + quadrature error + tail), a safe upper estimate."""
        if self.log_value == NEG_INF:
            return NEG_INF
        return self.log_value + math.log1p(self.relative_error + self.tail_bound)


def _stable_rate(ed: ClassParams) -> tuple[Gauge, float]:
    if ed.cls is not DichotomyClass.ED:
        raise ValueError("tail bound needs ED constants")
    return Gauge(ed["log_k1"], ed["eta1"], ed.hints[0], at_least_one=False), ed["nu1"]


def criterion_i_value(
    C1: SkewEvolution,
    gamma: float,
    s: float,
    x: BasePoint,
    v: Sequence[float],
    ed: ClassParams,
    t_max: Optional[float] = None,
    max_doublings: int = 8,
) -> IntegralValue:
    """log of int_s^T e^{gamma (tau - s)} ||Phi_1(tau,s,x)v|| dtau with a certified tail.

    T starts at s + 30 (or ``t_max``) and doubles its distance from s until
    the analytic tail N_1(s) ||P_1 v|| e^{-gamma s} e^{(gamma - nu_1) T} / (nu_1 - gamma)
    is below 1e-10 of the partial integral.
    """
    if not gamma > 0:
        raise ValueError("gamma must be > 0")
    gauge, nu1 = _stable_rate(ed)
    if not nu1 > gamma:
        raise CriterionDiverges(f"criterion (i) diverges: need nu1 > gamma, got nu1={nu1}, gamma={gamma}")
    lv = to_log_vector(v)
    log_pv = log_l1_norm(C1.apply_log(s, s, x, lv))
    if log_pv == NEG_INF:
        return IntegralValue(NEG_INF, 0.0, 0.0, s)

    def log_f(tau: float) -> float:
        return gamma * (tau - s) + log_l1_norm(C1.apply_log(tau, s, x, lv))

    T = t_max if t_max is not None else s + 30.0
    for _ in range(max_doublings + 1):
        q = integrate_log(log_f, s, T, QUAD_RTOL, C1.cocycle.breakpoints(s, T))
        log_tail = gauge.log(s) + log_pv - gamma * s + (gamma - nu1) * T - math.log(nu1 - gamma)
        rel_tail = math.exp(log_tail - q.log_value)
        if rel_tail < TAIL_RTOL:
            return IntegralValue(q.log_value, q.relative_error, rel_tail, T)
        T = s + 2.0 * (T - s)
    raise CriterionDiverges(f"tail bound still {rel_tail:.3e} of the partial integral at T={T}")


def criterion_ii_value(
    C2: SkewEvolution,
    rho: float,
    t: float,
    t0: float,
    x: BasePoint,
    v: Sequence[float],
) -> IntegralValue:
    """log of int_t0^t e^{rho (t - tau)} ||Phi_2(tau,t0,x)v|| dtau."""
    if not t >= t0 >= 0:
        raise DomainError(f"criterion (ii) needs t >= t0 >= 0, got t={t}, t0={t0}")
    lv = to_log_vector(v)

    def log_f(tau: float) -> float:
        return rho * (t - tau) + log_l1_norm(C2.apply_log(tau, t0, x, lv))

    q = integrate_log(log_f, t0, t, QUAD_RTOL, C2.cocycle.breakpoints(t0, t))
    return IntegralValue(q.log_value, q.relative_error, 0.0, t)


# -- necessity roundtrip ---------------------------------------------------------

S_SAMPLES = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)
T0_SAMPLES = (0.0, 1.0, 5.0)
SPANS = (0.0, 0.5, 1.0, 5.0, 10.0, 30.0)
VECTORS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
GAMMA_NOTE = (
    "gamma = +nu1/2 is used; gamma = -nu1/2 would contradict gamma > 0"
)
GAUGE_NOTE = (
    "Dtilde is read at t0 as stated; the ED bound only gives N_2 at tau >= t0, "
    "so a growing gauge can fail here while the gauge read at t still holds"
)


@dataclass(frozen=True)
class CriterionCheck:
    status: str
    worst_slack_log: float
    worst_point: Optional[dict[str, Any]]
    max_relative_error: float
    max_tail_bound: float
    samples: int
    # criterion (ii) only: slack with the gauge read at t instead of t0
    worst_slack_log_gauge_at_t: Optional[float] = None

    def to_json(self) -> dict[str, Any]:
        out = {
            "status": self.status,
            "worst_slack_log": self.worst_slack_log,
            "worst_point": self.worst_point,
            "max_relative_error": self.max_relative_error,
            "max_tail_bound": self.max_tail_bound,
            "samples": self.samples,
        }
        if self.worst_slack_log_gauge_at_t is not None:
            out["worst_slack_log_gauge_at_t"] = self.worst_slack_log_gauge_at_t
        return out


def check_criterion_i(
    C1: SkewEvolution,
    gamma: float,
    D: Gauge,
    ed: ClassParams,
    points: Sequence[tuple[float, BasePoint]],
    vectors: Sequence[Sequence[float]] = VECTORS,
) -> CriterionCheck:
    """Slack log(D(s) ||P_1 v||) - log(integral upper estimate), minimized over samples."""
    worst, where, max_err, max_tail, n = math.inf, None, 0.0, 0.0, 0
    for s, x in points:
        for v in vectors:
            val = criterion_i_value(C1, gamma, s, x, v, ed)
            if val.log_value == NEG_INF:
                continue
            n += 1
            log_pv = log_l1_norm(C1.apply_log(s, s, x, to_log_vector(v)))
            slack = D.log(s) + log_pv - val.log_upper_bound()
            max_err = max(max_err, val.relative_error)
            max_tail = max(max_tail, val.tail_bound)
            if slack < worst:
                worst, where = slack, {"s": s, "x_offset": x.offset, "v": list(v), "T": val.upper}
    status = "certified" if worst >= -SLACK_TOL else "failed"
    return CriterionCheck(status, worst, where, max_err, max_tail, n)


def check_criterion_ii(
    C2: SkewEvolution,
    rho: float,
    Dt: Gauge,
    points: Sequence[tuple[float, float, BasePoint]],
    vectors: Sequence[Sequence[float]] = VECTORS,
) -> CriterionCheck:
    worst, where, max_err, n = math.inf, None, 0.0, 0
    late = math.inf
    for t, t0, x in points:
        for v in vectors:
            if t == t0:
                continue
            val = criterion_ii_value(C2, rho, t, t0, x, v)
            if val.log_value == NEG_INF:
                continue
            n += 1
            log_end = log_l1_norm(C2.apply_log(t, t0, x, to_log_vector(v)))
            slack = Dt.log(t0) + log_end - val.log_upper_bound()
            late = min(late, Dt.log(t) + log_end - val.log_upper_bound())
            max_err = max(max_err, val.relative_error)
            if slack < worst:
                worst, where = slack, {"t": t, "t0": t0, "x_offset": x.offset, "v": list(v)}
    status = "certified" if worst >= -SLACK_TOL else "failed"
    return CriterionCheck(status, worst, where, max_err, 0.0, n, late)


@dataclass(frozen=True)
class RoundtripReport:
    status: str
    gates: dict[str, Any]
    gamma: Optional[float] = None
    rho: Optional[float] = None
    D: Optional[Gauge] = None
    Dtilde: Optional[Gauge] = None
    criterion_i: Optional[CriterionCheck] = None
    criterion_ii: Optional[CriterionCheck] = None
    sufficiency: Optional[str] = None
    notes: tuple[str, ...] = field(default=())

    @property
    def applicable(self) -> bool:
        return self.status != "not applicable"

    def to_json(self) -> dict[str, Any]:
        def opt(o):
            return None if o is None else o.to_json()

        worst = [c.worst_slack_log for c in (self.criterion_i, self.criterion_ii) if c is not None]
        tails = [c.max_tail_bound for c in (self.criterion_i,) if c is not None]
        return {
            "status": self.status,
            "gates": self.gates,
            "gamma": self.gamma,
            "rho": self.rho,
            "D": opt(self.D),
            "Dtilde": opt(self.Dtilde),
            "worst_slack_log": min(worst) if worst else None,
            "tail_bound": max(tails) if tails else None,
            "criterion_i": opt(self.criterion_i),
            "criterion_ii": opt(self.criterion_ii),
            "sufficiency": self.sufficiency,
            "notes": list(self.notes),
        }


def necessity_constants(ed: ClassParams) -> tuple[float, Gauge, float, Gauge]:
    """gamma = nu1/2, D = N_1/gamma, rho = nu2/2, Dt = 2 N_2/rho (both floored at 1)."""
    v = ed.as_dict()
    gamma, rho = v["nu1"] / 2.0, v["nu2"] / 2.0
    D = Gauge(v["log_k1"] - math.log(gamma), v["eta1"], ed.hints[0])
    Dt = Gauge(v["log_k2"] + math.log(2.0 / rho), v["eta2"], ed.hints[1])
    return gamma, D, rho, Dt


def criteria_roundtrip(
    C: SkewEvolution,
    pair: ProjectorPair,
    ed_cert: Certificate,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
    hint: Expression = ZERO,
    force: bool = False,
    s_samples: Sequence[float] = S_SAMPLES,
    t0_samples: Sequence[float] = T0_SAMPLES,
    spans: Sequence[float] = SPANS,
) -> RoundtripReport:
    """Necessity direction: ED constants -> criteria constants -> both criteria checked.

    The hypotheses (ED certified, bounded growth on C_1, decay on C_2) gate the
    run; with ``force`` the gates are reported but not enforced.
    """
    x0 = BasePoint(generator, 0.0)
    check_compatible(C, pair, x0)
    C1, C2 = restrict(C, pair, 1, x0), restrict(C, pair, 2, x0)
    growth1 = fit_growth(C1, "growth", grid, generator, hint)
    decay2 = fit_growth(C2, "decay", grid, generator, hint)
    gates = {
        "ed_certified": ed_cert.certified,
        "c1_bounded_growth": growth1.certified and growth1.bounded,
        "c2_decay": decay2.certified,
        "growth_c1": growth1.to_json(),
        "decay_c2": decay2.to_json(),
    }
    if not (ed_cert.certified and ed_cert.cls is DichotomyClass.ED):
        if not force or ed_cert.cls is not DichotomyClass.ED:
            return RoundtripReport("not applicable", gates, notes=("ED is not certified",))
    if not force and not (gates["c1_bounded_growth"] and gates["c2_decay"]):
        return RoundtripReport("not applicable", gates, notes=("growth/decay hypotheses fail on the grid",))

    ed = ed_cert.params
    gamma, D, rho, Dt = necessity_constants(ed)
    offsets = [BasePoint(generator, o) for o in grid.x_offsets]
    pts_i = [(s, x) for x in offsets for s in s_samples]
    pts_ii = [(t0 + d, t0, x) for x in offsets for t0 in t0_samples for d in spans]
    ci = check_criterion_i(C1, gamma, D, ed, pts_i)
    cii = check_criterion_ii(C2, rho, Dt, pts_ii)
    status = "certified" if ci.status == cii.status == "certified" else "failed"
    notes = (GAMMA_NOTE,) + (("hypothesis gates forced",) if force else ())
    if Dt.eta > 0 or not Dt.hint.is_zero:
        notes += (GAUGE_NOTE,)
    return RoundtripReport(status, gates, gamma, rho, D, Dt, ci, cii, ed_cert.verdict, notes)

