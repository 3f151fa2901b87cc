"""Signed log-magnitude scalars.

Cocycle values in the gallery reach magnitudes like e^{5120}, far outside
the range of a double, so every magnitude is carried as ``sign * exp(log_abs)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogScalar:
    sign: int
    log_abs: float

    def __post_init__(self):
        if self.sign not in (-1, 0, 1):
            raise ValueError(f"sign must be -1, 0 or 1, got {self.sign}")
        if (self.sign == 0) != (self.log_abs == NEG_INF):
            raise ValueError("log_abs is -inf exactly when sign is 0")

    @classmethod
    def zero(cls) -> "LogScalar":
        return cls(0, NEG_INF)

    @classmethod
    def from_float(cls, value: float) -> "LogScalar":
        if value == 0.0:
            return cls.zero()
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    @property
    def is_zero(self) -> bool:
        return self.sign == 0

    def to_float(self) -> float:
        """Convert back to a float; overflows to +-inf, underflows to 0."""
        if self.sign == 0:
            return 0.0
        try:
            return self.sign * math.exp(self.log_abs)
        except OverflowError:
            return self.sign * math.inf

    def scale_log(self, delta: float) -> "LogScalar":
        """Multiply by exp(delta)."""
        if self.sign == 0:
            return self
        return LogScalar(self.sign, self.log_abs + delta)

    def __mul__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0 or other.sign == 0:
            return LogScalar.zero()
        return LogScalar(self.sign * other.sign, self.log_abs + other.log_abs)

    def __neg__(self) -> "LogScalar":
        return LogScalar(-self.sign, self.log_abs)

    def __add__(self, other: "LogScalar") -> "LogScalar":
        if self.sign == 0:
            return other
        if other.sign == 0:
            return self
        big, small = (self, other) if self.log_abs >= other.log_abs else (other, self)
        ratio = math.exp(small.log_abs - big.log_abs)
        if big.sign == small.sign:
            return LogScalar(big.sign, big.log_abs + math.log1p(ratio))
        if ratio == 1.0:
            return LogScalar.zero()
        return LogScalar(big.sign, big.log_abs + math.log1p(-ratio))

    def __sub__(self, other: "LogScalar") -> "LogScalar":
        return self + (-other)


def logsumexp(values: Iterable[float]) -> float:
    """log(sum(exp(v))) with a max shift and compensated summation."""
    vals = [v for v in values if v != NEG_INF]
    if not vals:
        return NEG_INF
    top = max(vals)
    if top == math.inf:
        return math.inf
    return top + math.log(math.fsum(math.exp(v - top) for v in vals))


def log_l1_norm(components: Sequence[LogScalar]) -> float:
    """log of |v_1| + |v_2| + ... for a vector of log scalars."""
    return logsumexp(c.log_abs for c in components)


def relative_difference(a: LogScalar, b: LogScalar) -> float:
    """|a - b| / max(|a|, |b|), 0 when both are zero. Lies in [0, 2]."""
    if a.is_zero and b.is_zero:
        return 0.0
    diff = a - b
    if diff.is_zero:
        return 0.0
    return math.exp(diff.log_abs - max(a.log_abs, b.log_abs))
