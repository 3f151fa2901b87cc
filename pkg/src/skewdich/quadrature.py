"""Adaptive Simpson quadrature, in linear space and in log space."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Iterable

from .logscalar import NEG_INF, logsumexp

MAX_DEPTH = 48
_EPS = 2.0**-52


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-13,
    max_depth: int = MAX_DEPTH,
) -> float:
    """Integrate a smooth function on [a, b] to absolute tolerance ``tol``."""
    if b < a:
        raise ValueError(f"adaptive_simpson needs a <= b, got [{a}, {b}]")
    if a == b:
        return 0.0

    def simpson(fa, fm, fb, h):
        return h / 6.0 * (fa + 4.0 * fm + fb)

    pieces: list[float] = []
    # explicit stack keeps the accumulation order deterministic
    fa, fb, fm = f(a), f(b), f(0.5 * (a + b))
    stack = [(a, b, fa, fm, fb, simpson(fa, fm, fb, b - a), tol, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, whole, eps, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        fl = f(0.5 * (lo + mid))
        fr = f(0.5 * (mid + hi))
        left = simpson(flo, fl, fmid, mid - lo)
        right = simpson(fmid, fr, fhi, hi - mid)
        delta = left + right - whole
        if depth >= max_depth or abs(delta) <= 15.0 * eps:
            pieces.append(left + right + delta / 15.0)
        else:
            stack.append((mid, hi, fmid, fr, fhi, right, 0.5 * eps, depth + 1))
            stack.append((lo, mid, flo, fl, fmid, left, 0.5 * eps, depth + 1))
    return math.fsum(pieces)


@dataclass(frozen=True)
class LogQuadrature:
    """Result of a log-space integration: log of the value and of its error bar."""

    log_value: float
    log_error: float
    panels: int

    @property
    def relative_error(self) -> float:
        if self.log_value == NEG_INF:
            return 0.0
        return math.exp(self.log_error - self.log_value)


def _log_exp_trapezoid(la: float, lb: float, h: float) -> float:
    """log of the integral over a width-h panel of the exponential through (la, lb).

    Exact when log f is linear on the panel.
    """
    if la == NEG_INF or lb == NEG_INF:
        # no exponential passes through a zero; fall back to the plain trapezoid
        return math.log(h / 2.0) + logsumexp((la, lb))
    a = abs(lb - la)
    shape = 0.0 if a == 0.0 else math.log(-math.expm1(-a) / a)
    return math.log(h) + max(la, lb) + shape


def _log_absdiff(x: float, y: float) -> float:
    if x == y:
        return NEG_INF
    hi, lo = max(x, y), min(x, y)
    if lo == NEG_INF:
        return hi
    return hi + math.log(-math.expm1(lo - hi))


def _panel(flo: float, f1: float, fm: float, f3: float, fhi: float, h: float) -> tuple[float, float, float]:
    """Two Richardson-extrapolated estimates of one panel, as (log R1, log R2, log |R2 - R1|).

    R1 comes from the whole/halves trapezoids, R2 from halves/quarters. The
    arithmetic runs on values scaled by the panel maximum.
    """
    t1 = _log_exp_trapezoid(flo, fhi, h)
    t2 = logsumexp((_log_exp_trapezoid(flo, fm, h / 2), _log_exp_trapezoid(fm, fhi, h / 2)))
    t4 = logsumexp((
        _log_exp_trapezoid(flo, f1, h / 4), _log_exp_trapezoid(f1, fm, h / 4),
        _log_exp_trapezoid(fm, f3, h / 4), _log_exp_trapezoid(f3, fhi, h / 4),
    ))
    m = max(t1, t2, t4)
    if m == NEG_INF:
        return NEG_INF, NEG_INF, NEG_INF
    u1, u2, u4 = (math.exp(t - m) for t in (t1, t2, t4))
    r1 = (4.0 * u2 - u1) / 3.0
    r2 = (4.0 * u4 - u2) / 3.0
    # extrapolation can only go wrong on unresolved panels; keep it positive
    r1 = r1 if r1 > 0 else u2
    r2 = r2 if r2 > 0 else u4
    d = abs(r2 - r1)
    return tuple(m + math.log(v) if v > 0 else NEG_INF for v in (r1, r2, d))


def integrate_log(
    log_f: Callable[[float], float],
    a: float,
    b: float,
    rtol: float = 1e-12,
    breakpoints: Iterable[float] = (),
    max_depth: int = MAX_DEPTH,
) -> LogQuadrature:
    """Integrate exp(log_f) over [a, b] without leaving log space.

    The interval is first split at ``breakpoints`` (kinks of piecewise
    integrands). Panels use the exponential trapezoid rule, exact for
    log-linear integrands, with Richardson extrapolation to Simpson order;
    a panel is halved until two successive extrapolations agree to
    ``rtol`` relative.
    """
    if b < a:
        raise ValueError(f"integrate_log needs a <= b, got [{a}, {b}]")
    if a == b:
        return LogQuadrature(NEG_INF, NEG_INF, 0)
    cuts = sorted({a, b, *(p for p in breakpoints if a < p < b)})
    length = b - a

    # one coarse panel per piece gives a reference scale, so panels that are
    # negligible against the whole integral are not refined to full accuracy
    starts = []
    log_ref = NEG_INF
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        mid = 0.5 * (lo + hi)
        flo, fm, fhi = log_f(lo), log_f(mid), log_f(hi)
        starts.append((lo, hi, flo, fm, fhi, 0))
        if lo < mid < hi:
            log_ref = max(log_ref, _log_exp_trapezoid(flo, fm, mid - lo), _log_exp_trapezoid(fm, fhi, hi - mid))

    values: list[float] = []
    errors: list[float] = []
    log_tol = math.log(15.0 * rtol)
    log15 = math.log(15.0)
    for start in starts:
        stack = [start]
        while stack:
            lo, hi, flo, fm, fhi, depth = stack.pop()
            h = hi - lo
            mid = 0.5 * (lo + hi)
            q1, q3 = 0.5 * (lo + mid), 0.5 * (mid + hi)
            if not lo < q1 < mid < q3 < hi:
                # panel at float resolution: plain trapezoid, no error estimate possible
                if h > 0:
                    values.append(_log_exp_trapezoid(flo, fhi, h))
                continue
            f1, f3 = log_f(q1), log_f(q3)
            r1, r2, diff = _panel(flo, f1, fm, f3, fhi, h)
            if r2 == NEG_INF:
                continue
            # log values carry an absolute rounding error of about eps |log f|
            scale = max(abs(v) for v in (flo, f1, fm, f3, fhi) if v != NEG_INF)
            log_noise = math.log(64.0 * _EPS * max(scale, 1.0))
            target = max(r2, log_ref + math.log(h / length)) + max(log_tol, log_noise)
            if depth >= max_depth or diff <= target:
                values.append(r2)
                errors.append(logsumexp((diff - log15, r2 + log_noise - 3.0)))
            else:
                stack.append((mid, hi, fm, f3, fhi, depth + 1))
                stack.append((lo, mid, flo, f1, fm, depth + 1))
    return LogQuadrature(logsumexp(values), logsumexp(errors), len(values))
