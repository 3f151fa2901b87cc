"""Heat semigroup on [0, 1] with Neumann data, in the cosine basis.

Basis: e_0 = 1, e_n(y) = sqrt(2) cos(n pi y). The semigroup is diagonal,
S(t) e_n = exp(-n^2 pi^2 t) e_n, so everything stays in coefficient space.
The cocycle over the translate semiflow runs the semigroup for the time
I(x, t - s) instead of t - s.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence, TextIO

from .base_space import BasePoint, DomainError
from .cocycles import LogVector, SkewEvolution, _check_order, integrate_base, to_log_vector

DEFAULT_MODES = 32
PI2 = math.pi**2


@dataclass(frozen=True)
class ModeVector:
    coefficients: tuple[float, ...]

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("ModeVector needs at least one mode")
        if not all(math.isfinite(a) for a in self.coefficients):
            raise ValueError("ModeVector coefficients must be finite")

    @classmethod
    def basis(cls, n: int, n_modes: int = DEFAULT_MODES) -> "ModeVector":
        if not 0 <= n < n_modes:
            raise ValueError(f"mode {n} outside 0..{n_modes - 1}")
        a = [0.0] * n_modes
        a[n] = 1.0
        return cls(tuple(a))

    @property
    def n_modes(self) -> int:
        return len(self.coefficients)

    def norm(self) -> float:
        return math.sqrt(math.fsum(a * a for a in self.coefficients))

    def __getitem__(self, n: int) -> float:
        return self.coefficients[n]

    def value_at(self, y: float) -> float:
        """Point value sum a_n e_n(y). Lossy for display only."""
        terms = [self.coefficients[0]]
        terms += [a * math.sqrt(2.0) * math.cos(n * math.pi * y) for n, a in enumerate(self.coefficients) if n]
        return math.fsum(terms)

    def to_json(self) -> list[float]:
        return list(self.coefficients)


def _scaled(v: ModeVector, duration: float) -> ModeVector:
    return ModeVector(tuple(a * math.exp(-n * n * PI2 * duration) for n, a in enumerate(v.coefficients)))


def semigroup_apply(v: ModeVector, t: float) -> ModeVector:
    """S(t) v."""
    if not t >= 0:
        raise DomainError(f"semigroup time must be >= 0, got {t}")
    return _scaled(v, t)


def spectral_cocycle_apply(t: float, s: float, x: BasePoint, v: ModeVector) -> ModeVector:
    """Phi(t, s, x) v = S(I(x, t - s)) v."""
    _check_order(t, s)
    return _scaled(v, integrate_base(x, t - s))


@dataclass(frozen=True)
class SpectralCocycle:
    """The spectral cocycle in the interface of DiagonalCocycle (log factors per mode)."""

    n_modes: int = DEFAULT_MODES

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be >= 1")

    @property
    def dim(self) -> int:
        return self.n_modes

    def log_factor_terms(self, k: int, t: float, s: float, x: BasePoint) -> list[float]:
        _check_order(t, s)
        if not 0 <= k < self.n_modes:
            raise IndexError(k)
        if t == s or k == 0:
            return []
        return [-k * k * PI2 * integrate_base(x, t - s)]

    def log_factor(self, k: int, t: float, s: float, x: BasePoint) -> float:
        return math.fsum(self.log_factor_terms(k, t, s, x))

    def apply_log(self, t: float, s: float, x: BasePoint, v: LogVector) -> LogVector:
        _check_order(t, s)
        if len(v) != self.n_modes:
            raise ValueError(f"expected {self.n_modes} modes, got {len(v)}")
        if t == s:
            return tuple(v)
        big_i = integrate_base(x, t - s)
        return tuple(c.scale_log(-k * k * PI2 * big_i) for k, c in enumerate(v))

    def apply(self, t: float, s: float, x: BasePoint, v: Sequence[float]) -> LogVector:
        return self.apply_log(t, s, x, to_log_vector(v))

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        return []

    def to_json(self) -> dict[str, Any]:
        return {"kind": "spectral", "n_modes": self.n_modes}


def spectral_evolution(n_modes: int = DEFAULT_MODES) -> SkewEvolution:
    return SkewEvolution(SpectralCocycle(n_modes), None, "spectral")


def write_samples_csv(
    out: TextIO,
    v: ModeVector,
    x: BasePoint,
    times: Iterable[float],
    ys: Iterable[float],
    s: float = 0.0,
) -> None:
    """Rows t, y, value of Phi(t, s, x) v at the point y."""
    ys = list(ys)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["t", "y", "value"])
    for t in times:
        u = spectral_cocycle_apply(t, s, x, v)
        for y in ys:
            w.writerow([repr(float(t)), repr(float(y)), "%.12e" % u.value_at(y)])

