"""Sampling grids and the per-point evidence rows every checker reduces over."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Any, Iterator, Optional, Sequence

import numpy as np

from .base_space import BasePoint, DomainError, GeneratorSpec, semiflow
from .cocycles import SkewEvolution, to_log_vector
from .logscalar import log_l1_norm
from .projectors import ProjectorPair

DEFAULT_VECTORS = ((1.0, 0.0), (0.0, 1.0), (1.0, 1.0))
DEFAULT_TOL_LOG = 1e-9


@dataclass(frozen=True)
class Axis:
    min: float
    max: float
    count: int
    spacing: str = "log-mix"

    def __post_init__(self):
        if not (0 <= self.min < self.max):
            raise ValueError(f"axis range must satisfy 0 <= min < max, got [{self.min}, {self.max}]")
        if self.count < 2:
            raise ValueError("axis count must be >= 2")
        if self.spacing not in ("linear", "log-mix"):
            raise ValueError(f"unknown spacing {self.spacing!r}")

    def values(self) -> list[float]:
        if self.spacing == "linear":
            return [float(v) for v in np.linspace(self.min, self.max, self.count)]
        # the linear part keeps both endpoints
        n_log = min(self.count // 2, self.count - 2)
        lin = np.linspace(self.min, self.max, self.count - n_log)
        if n_log == 0:
            return [float(v) for v in lin]
        lo = self.min if self.min > 0 else min(0.05, self.max / 2)
        logs = np.geomspace(lo, self.max, n_log)
        return sorted({float(v) for v in np.concatenate([lin, logs])})

    @classmethod
    def parse(cls, text: str, spacing: str = "log-mix") -> "Axis":
        """Parse ``min:max:count``."""
        try:
            lo, hi, n = text.split(":")
            return cls(float(lo), float(hi), int(n), spacing)
        except ValueError as exc:
            raise ValueError(f"bad axis {text!r}, expected min:max:count ({exc})") from None

    def to_json(self) -> dict[str, Any]:
        return {"min": self.min, "max": self.max, "count": self.count, "spacing": self.spacing}


@dataclass(frozen=True)
class GridSpec:
    t_axis: Axis = Axis(0.0, 60.0, 60)
    s_axis: Axis = Axis(0.0, 60.0, 60)
    t0_values: tuple[float, ...] = (0.0,)
    x_offsets: tuple[float, ...] = (0.0,)
    vectors: tuple[tuple[float, float], ...] = DEFAULT_VECTORS
    tol_log: float = DEFAULT_TOL_LOG
    s_min: float = 0.0
    # add the kinks of the cocycle's exponent laws to both axes
    breakpoints: bool = True
    extra: tuple[float, ...] = ()

    def _axis_values(self, axis: Axis) -> list[float]:
        vals = set(axis.values())
        vals.update(p for p in self.extra if axis.min <= p <= axis.max)
        return sorted(vals)

    def points(self) -> Iterator[tuple[float, float, float]]:
        """All (t, s, t0) with t >= s >= t0 and s >= s_min."""
        ts = self._axis_values(self.t_axis)
        ss = [s for s in self._axis_values(self.s_axis) if s >= self.s_min]
        for s in ss:
            for t in ts:
                if t < s:
                    continue
                for t0 in self.t0_values:
                    if t0 <= s:
                        yield t, s, t0

    def polynomial(self, s_min: float = 1.0) -> "GridSpec":
        """The grid used by the polynomial classes: both axes start at 1 or later."""
        lo = max(self.s_min, s_min)

        def clip(axis: Axis) -> Axis:
            if axis.min >= lo or axis.max <= lo:
                return axis
            return replace(axis, min=lo)

        return replace(self, t_axis=clip(self.t_axis), s_axis=clip(self.s_axis), s_min=lo)

    def is_empty(self) -> bool:
        return next(self.points(), None) is None

    def to_json(self) -> dict[str, Any]:
        return {
            "t": self.t_axis.to_json(),
            "s": self.s_axis.to_json(),
            "t0_values": list(self.t0_values),
            "x_offsets": list(self.x_offsets),
            "vectors": [list(v) for v in self.vectors],
            "tol_log": self.tol_log,
            "s_min": self.s_min,
            "breakpoints": self.breakpoints,
        }

    def with_breakpoints(self, cocycle: Any) -> "GridSpec":
        """The grid with the cocycle's breakpoints merged in (if enabled)."""
        if not self.breakpoints or not hasattr(cocycle, "breakpoints"):
            return self
        lo = min(self.t_axis.min, self.s_axis.min)
        hi = max(self.t_axis.max, self.s_axis.max)
        pts = tuple(sorted(set(self.extra) | set(cocycle.breakpoints(lo, hi))))
        return replace(self, extra=pts)


@dataclass(frozen=True)
class Row:
    """log ||Phi_k(t,t0,x)v|| - log ||Phi_k(s,t0,x)v|| at one grid point, as exact-sum terms."""

    t: float
    s: float
    t0: float
    x_offset: float
    v: tuple[float, float]
    branch: int
    terms: tuple[float, ...] = field(repr=False)

    @property
    def value(self) -> float:
        return math.fsum(self.terms)

    def point(self) -> dict[str, Any]:
        return {
            "t": self.t, "s": self.s, "t0": self.t0,
            "x_offset": self.x_offset, "v": list(self.v), "branch": self.branch,
        }


def branch_ratio_terms(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    k: Optional[int],
    t: float,
    s: float,
    t0: float,
    x: BasePoint,
    v: Sequence[float],
) -> Optional[tuple[float, ...]]:
    """Terms of log ||Phi_k(t,t0,x)v|| - log ||Phi_k(s,t0,x)v||, or None if P_k v = 0.

    When P_k v has a single nonzero coordinate of a diagonal cocycle, the
    cocycle law reduces the ratio to the factor of Phi(t, s, phi(s, t0, x)),
    whose terms cancel exactly under fsum.
    """
    w = np.asarray(v, dtype=float)
    if pair is not None and k is not None:
        w = pair[k].matrix(x) @ w
    elif C.projector is not None:
        w = C.projector.matrix(x) @ w
    nonzero = [i for i, c in enumerate(w) if c != 0.0]
    if not nonzero:
        return None
    cocycle = C.cocycle
    if len(nonzero) == 1 and hasattr(cocycle, "log_factor_terms"):
        y = semiflow(s, t0, x)
        return tuple(cocycle.log_factor_terms(nonzero[0], t, s, y))
    lw = to_log_vector(w)
    a = log_l1_norm(cocycle.apply_log(t, t0, x, lw))
    b = log_l1_norm(cocycle.apply_log(s, t0, x, lw))
    return (a, -b)


def collect_rows(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    grid: GridSpec,
    generator: GeneratorSpec,
    branches: Sequence[int] = (1, 2),
) -> list[Row]:
    if grid.is_empty():
        raise ValueError("grid has no points with t >= s >= t0")
    grid = grid.with_breakpoints(C.cocycle)
    rows = []
    for x_off in grid.x_offsets:
        x = BasePoint(generator, x_off)
        for t, s, t0 in grid.points():
            for v in grid.vectors:
                for k in branches:
                    terms = branch_ratio_terms(C, pair, k if pair is not None else None, t, s, t0, x, v)
                    if terms is None:
                        continue
                    rows.append(Row(t, s, t0, x_off, tuple(v), k, terms))
    return rows


def check_polynomial_domain(rows: Sequence[Row]) -> None:
    for r in rows:
        if r.s < 1.0:
            raise DomainError(f"polynomial classes need s >= 1, grid has s={r.s}")
