"""Diagonal evolution cocycles over the translate semiflow.

Component k of Phi(t, s, x) v has log-magnitude

    h_k(t) - h_k(s) + c_k * I(x, t - s) + lambda * (t - s) + log|v_k|

with I(x, d) the integral of x over [0, d]. The integral term is what ties
the cocycle to the base point: I(phi(s, t0, x), t - s) + I(x, s - t0) equals
I(x, t - t0), which is the cocycle law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Any, Optional, Sequence

import numpy as np

from .base_space import BasePoint, DomainError, semiflow
from .expressions import ZERO, Expression, difference_terms
from .logscalar import LogScalar, log_l1_norm

StateVector = tuple[float, float]
LogVector = tuple[LogScalar, ...]


def state_norm(v: Sequence[float]) -> float:
    """The l1 norm |v_1| + |v_2| used for V = R^2."""
    return float(sum(abs(c) for c in v))


def to_log_vector(v: Sequence[float]) -> LogVector:
    return tuple(LogScalar.from_float(float(c)) for c in v)


def _check_order(*times: float) -> None:
    for a, b in zip(times, times[1:]):
        if not a >= b:
            raise DomainError(f"times must be non-increasing, got {times}")
    if not times[-1] >= 0:
        raise DomainError(f"times must be non-negative, got {times}")


def integrate_base(x: BasePoint, delta: float) -> float:
    """Integral of x over [0, delta], i.e. of x(tau - s) over [s, s + delta]."""
    if delta < 0:
        raise DomainError(f"integration length must be >= 0, got {delta}")
    if delta == 0:
        return 0.0
    if x.is_limit:
        return x.generator.limit_l * delta
    big_f = x.generator.cumulative
    return big_f(x.offset + delta) - big_f(x.offset)


@dataclass(frozen=True)
class DiagonalCocycle:
    h1: Expression = ZERO
    h2: Expression = ZERO
    c1: float = 0.0
    c2: float = 0.0
    shift_lambda: float = 0.0

    @property
    def dim(self) -> int:
        return 2

    def _law(self, k: int) -> tuple[Expression, float]:
        if k == 0:
            return self.h1, self.c1
        if k == 1:
            return self.h2, self.c2
        raise IndexError(k)

    def log_factor_terms(self, k: int, t: float, s: float, x: BasePoint) -> list[float]:
        """Values summing exactly to log|Phi(t, s, x)_kk|."""
        _check_order(t, s)
        if t == s:
            return []
        h, c = self._law(k)
        terms = difference_terms(h, t, s)
        if c != 0.0:
            terms.append(c * integrate_base(x, t - s))
        if self.shift_lambda != 0.0:
            terms.append(self.shift_lambda * (t - s))
        return terms

    def log_factor(self, k: int, t: float, s: float, x: BasePoint) -> float:
        return math.fsum(self.log_factor_terms(k, t, s, x))

    def apply_log(self, t: float, s: float, x: BasePoint, v: LogVector) -> LogVector:
        _check_order(t, s)
        if t == s:
            return tuple(v)
        return tuple(v[k].scale_log(self.log_factor(k, t, s, x)) for k in range(2))

    def apply(self, t: float, s: float, x: BasePoint, v: Sequence[float]) -> LogVector:
        return self.apply_log(t, s, x, to_log_vector(v))

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        return sorted(set(self.h1.breakpoints(lo, hi)) | set(self.h2.breakpoints(lo, hi)))

    def to_json(self) -> dict[str, Any]:
        return {
            "h1": self.h1.to_json(),
            "h2": self.h2.to_json(),
            "c1": self.c1,
            "c2": self.c2,
            "lambda": self.shift_lambda,
        }


def apply(cocycle: DiagonalCocycle, t: float, s: float, x: BasePoint, v: Sequence[float]) -> LogVector:
    return cocycle.apply(t, s, x, v)


def shift(cocycle: DiagonalCocycle, lam: float) -> DiagonalCocycle:
    """The lambda-shifted cocycle exp(lambda (t - s)) Phi(t, s, x)."""
    return replace(cocycle, shift_lambda=cocycle.shift_lambda + lam)


def _diagonal_mask(matrix: np.ndarray) -> Optional[tuple[bool, ...]]:
    """For a 0/1 diagonal projector, which coordinates it keeps."""
    if np.count_nonzero(matrix - np.diag(np.diag(matrix))):
        return None
    diag = np.diag(matrix)
    if not np.all((diag == 0.0) | (diag == 1.0)):
        return None
    return tuple(bool(d) for d in diag)


def project_log(matrix: np.ndarray, v: LogVector) -> LogVector:
    out = []
    for i in range(matrix.shape[0]):
        acc = LogScalar.zero()
        for j in range(matrix.shape[1]):
            if matrix[i, j] != 0.0:
                acc = acc + LogScalar.from_float(float(matrix[i, j])) * v[j]
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class SkewEvolution:
    """C(t, s, x, v) = (phi(t, s, x), Phi(t, s, x) v), optionally restricted by a projector.

    A restricted skew-evolution applies Phi(t, s, x) P(x).
    """

    cocycle: Any
    projector: Any = None
    label: str = ""

    def flow(self, t: float, s: float, x: BasePoint) -> BasePoint:
        return semiflow(t, s, x)

    def projector_matrix(self, x: BasePoint) -> Optional[np.ndarray]:
        return None if self.projector is None else self.projector.matrix(x)

    def apply_log(self, t: float, s: float, x: BasePoint, v: LogVector) -> LogVector:
        m = self.projector_matrix(x)
        if m is not None:
            v = project_log(m, v)
        return self.cocycle.apply_log(t, s, x, v)

    def apply(self, t: float, s: float, x: BasePoint, v: Sequence[float]) -> LogVector:
        return self.apply_log(t, s, x, to_log_vector(v))

    def __call__(self, t: float, s: float, x: BasePoint, v: Sequence[float]):
        return self.flow(t, s, x), self.apply(t, s, x, v)

    def log_norm(self, t: float, s: float, x: BasePoint, v: Sequence[float]) -> float:
        return log_l1_norm(self.apply(t, s, x, v))

    def kept_coordinates(self, x: BasePoint) -> Optional[tuple[bool, ...]]:
        """Coordinates kept by a diagonal 0/1 projector (all, if unrestricted)."""
        m = self.projector_matrix(x)
        if m is None:
            return (True,) * self.cocycle.dim
        return _diagonal_mask(m)


def compose_residual(
    C: SkewEvolution, t: float, s: float, t0: float, x: BasePoint, v: Sequence[float]
) -> float:
    """Largest log-magnitude gap between Phi(t,s,phi(s,t0,x)) Phi(s,t0,x) v and Phi(t,t0,x) v."""
    _check_order(t, s, t0)
    if hasattr(C.cocycle, "compose_residual"):
        return C.cocycle.compose_residual(t, s, t0, x, v)
    y = semiflow(s, t0, x)
    mask = C.kept_coordinates(x)
    if mask is not None:
        # diagonal case: compare the exact term sums component by component
        worst = 0.0
        for k, keep in enumerate(mask):
            if not keep or v[k] == 0.0:
                continue
            chained = C.cocycle.log_factor_terms(k, t, s, y) + C.cocycle.log_factor_terms(k, s, t0, x)
            direct = C.cocycle.log_factor_terms(k, t, t0, x)
            gap = abs(math.fsum(chained + [-d for d in direct]))
            worst = max(worst, gap)
        return worst
    lv = to_log_vector(v)
    chained = C.apply_log(t, s, y, C.apply_log(s, t0, x, lv))
    direct = C.apply_log(t, t0, x, lv)
    worst = 0.0
    for a, b in zip(chained, direct):
        if a.is_zero and b.is_zero:
            continue
        if a.is_zero or b.is_zero:
            return math.inf
        worst = max(worst, abs(a.log_abs - b.log_abs))
    return worst
