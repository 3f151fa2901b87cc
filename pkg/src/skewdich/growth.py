"""Exponential growth and decay bounds, with the uniform and bounded variants.

growth:  log ||Phi(t,t0,x)v|| - log ||Phi(s,t0,x)v|| <= log M(s) + omega (t - s)
decay:   log ||Phi(s,t0,x)v|| - log ||Phi(t,t0,x)v|| <= log M(t) + omega (t - s)

with log M(u) = log_k + eta u + hint(u) and omega a positive constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence

import numpy as np

from . import lp
from .base_space import DEFAULT_GENERATOR, BasePoint, GeneratorSpec, semiflow
from .cocycles import SkewEvolution, to_log_vector
from .expressions import ZERO, Expression
from .grid import GridSpec, Row, collect_rows
from .logscalar import log_l1_norm

OMEGA_MIN = 1e-6
OMEGA_MAX = 200.0
LOG_K_MAX = 50.0
ETA_MAX = 50.0
KINDS = ("growth", "decay")


@dataclass(frozen=True)
class GrowthBounds:
    kind: str
    log_k: float = 0.0
    eta: float = 0.0
    omega: float = 1.0
    hint: Expression = ZERO
    uniform: bool = False
    bounded: bool = False
    worst_margin_log: Optional[float] = None
    certified: bool = True

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        if self.log_k < 0 or self.eta < 0:
            raise ValueError("M must be >= 1: need log_k >= 0 and eta >= 0")
        if not self.omega > 0:
            raise ValueError("omega must be > 0")

    @property
    def is_constant(self) -> bool:
        return self.eta == 0.0 and self.hint.is_zero

    def log_m_terms(self, u: float) -> list[float]:
        terms = [self.log_k, self.eta * u]
        terms.extend(self.hint.term_values(u))
        return terms

    def log_m(self, u: float) -> float:
        return math.fsum(self.log_m_terms(u))

    def shifted(self, lam: float) -> "GrowthBounds":
        """Bounds for the lambda-shifted cocycle (growth only)."""
        if self.kind != "growth":
            raise ValueError("only growth bounds shift with the cocycle")
        return replace(self, omega=self.omega + lam, worst_margin_log=None)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "log_k": self.log_k,
            "eta": self.eta,
            "omega": self.omega,
            "hint": self.hint.to_json(),
            "uniform": self.uniform,
            "bounded": self.bounded,
            "certified": self.certified,
            "worst_margin_log": self.worst_margin_log,
        }


def _rows(C: SkewEvolution, grid: GridSpec, generator: GeneratorSpec) -> list[Row]:
    rows = collect_rows(C, None, grid, generator, branches=(1,))
    seen, out = set(), []
    for r in rows:
        key = (r.t, r.s, r.t0, r.x_offset, r.terms)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def _row_parts(kind: str, r: Row, hint: Expression) -> tuple[list[float], float, float]:
    """(constant terms, coef of log_k + eta*u's u, omega coefficient) so that
    margin = fsum(const) - log_k - eta * u - omega * (t - s)."""
    if kind == "growth":
        u = r.s
        const = list(r.terms)
    else:
        u = r.t
        const = [-v for v in r.terms]
    const.extend(-v for v in hint.term_values(u))
    return const, u, r.t - r.s


def _margin(b: GrowthBounds, r: Row) -> float:
    const, u, dt = _row_parts(b.kind, r, ZERO)
    return math.fsum(const + [-v for v in b.log_m_terms(u)] + [-b.omega * dt])


def growth_margin(
    C: SkewEvolution,
    b: GrowthBounds,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
) -> float:
    """max over the grid of log LHS - log RHS for the inequality selected by b.kind."""
    if grid.is_empty():
        raise ValueError("empty grid")
    rows = _rows(C, grid, generator)
    return max((_margin(b, r) for r in rows), default=-math.inf)


def operator_log_norm(C: SkewEvolution, t: float, s: float, x: BasePoint) -> float:
    """log of the l1 operator norm of Phi(t,s,x) P(x): the largest column sum."""
    dim = C.cocycle.dim
    best = -math.inf
    for j in range(dim):
        e = [0.0] * dim
        e[j] = 1.0
        best = max(best, log_l1_norm(C.apply_log(t, s, x, to_log_vector(e))))
    return best


def bounded_margin(
    C: SkewEvolution,
    log_m: float,
    omega: float,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
) -> float:
    """max over grid pairs of log ||Phi(t,s,x)|| - log M - omega (t - s)."""
    worst = -math.inf
    for x_off in grid.x_offsets:
        x0 = BasePoint(generator, x_off)
        for t, s, t0 in grid.points():
            x = semiflow(s, t0, x0)
            worst = max(worst, operator_log_norm(C, t, s, x) - log_m - omega * (t - s))
    return worst


def _fit_family(
    kind: str,
    rows: Sequence[Row],
    hint: Expression,
    with_gauge: bool,
    tol: float,
) -> Optional[tuple[float, float, float]]:
    """(log_k, eta, omega) minimizing log_k, then omega, then eta; None if infeasible."""
    b_list, a_list = [], []
    for r in rows:
        const, u, dt = _row_parts(kind, r, hint)
        b_list.append(math.fsum(const))
        a_list.append([-1.0, -u if with_gauge else 0.0, -dt])
    A, b = np.array(a_list), np.array(b_list)
    bounds = [(0.0, LOG_K_MAX), (0.0, ETA_MAX if with_gauge else 0.0), (OMEGA_MIN, OMEGA_MAX)]
    first = lp.minimax(A, b, bounds)
    if first is None or first.objective > tol:
        return None
    cap = max(first.objective, 0.0)
    s1 = lp.solve([1.0, 0.0, 0.0], A, cap - b, bounds)
    if s1 is None:
        return None
    A2 = np.vstack([A, [1.0, 0.0, 0.0]])
    b2 = np.r_[cap - b, s1.x[0] + 1e-9]
    s2 = lp.solve([0.0, 1e-3, 1.0], A2, b2, bounds)
    x = s2.x if s2 is not None else s1.x
    return float(x[0]), float(x[1]), float(x[2])


def fit_growth(
    C: SkewEvolution,
    kind: str,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
    hint: Expression = ZERO,
) -> GrowthBounds:
    """Smallest M, then smallest omega, that certify the bound on the grid.

    A constant M is tried first (uniform); otherwise M(u) = K e^{eta u} times
    e^{hint(u)}. ``bounded`` additionally checks the operator-norm form for
    growth with the uniform constants. If nothing in the families certifies,
    the result has ``certified=False``.
    """
    if kind not in KINDS:
        raise ValueError(f"kind must be one of {KINDS}")
    if grid.is_empty():
        raise ValueError("empty grid")
    rows = _rows(C, grid, generator)
    tol = grid.tol_log
    fit = _fit_family(kind, rows, ZERO, False, tol)
    uniform = fit is not None
    used_hint = ZERO
    if fit is None:
        fit = _fit_family(kind, rows, hint, True, tol)
        used_hint = hint
    if fit is None:
        return GrowthBounds(kind, 0.0, 0.0, OMEGA_MAX, ZERO, False, False, None, certified=False)
    log_k, eta, omega = fit
    b = GrowthBounds(kind, log_k, eta, omega, used_hint, uniform)
    worst = max((_margin(b, r) for r in rows), default=-math.inf)
    if 0 < worst <= 1e-6:
        b = replace(b, log_k=b.log_k + worst)
        worst = max((_margin(b, r) for r in rows), default=-math.inf)
    bounded = False
    if uniform and kind == "growth":
        bounded = bounded_margin(C, b.log_k, b.omega, grid, generator) <= tol
    return replace(b, bounded=bounded, worst_margin_log=worst, certified=worst <= tol)
