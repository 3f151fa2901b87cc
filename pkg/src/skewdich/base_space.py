"""The base space of generator translates and its evolution semiflow.

A point of the base space is a translate ``x = f_offset`` of a decreasing
generator ``f``; ``offset = inf`` stands for the constant limit function,
the only extra point in the closure of the translates. The semiflow just
adds ``t - s`` to the offset, so its identity and composition laws hold
exactly.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from .quadrature import adaptive_simpson

INF = math.inf


class DomainError(ValueError):
    """A time argument lies outside the domain of the operation."""


class QuadratureCumulative:
    """Monotone cumulative integral of ``f`` backed by adaptive Simpson.

    Values at integer knots are cached; a value at ``u`` is the cached knot
    value plus one Simpson integral over ``[floor(u), u]``. Every increment
    I(x, delta) is a difference of this one function, so splitting an
    interval adds up to rounding.
    """

    def __init__(self, f: Callable[[float], float], tol: float = 1e-13):
        self._f = f
        self._tol = tol
        self._knots = [0.0]
        self._lock = threading.Lock()

    def _extend_to(self, n: int) -> None:
        with self._lock:
            while len(self._knots) <= n:
                k = len(self._knots) - 1
                piece = adaptive_simpson(self._f, float(k), float(k + 1), self._tol)
                self._knots.append(self._knots[-1] + piece)

    def freeze(self, upto: float) -> None:
        """Pre-build the knot cache up to ``upto`` before a parallel sweep."""
        self._extend_to(int(math.floor(upto)) + 1)

    def __call__(self, u: float) -> float:
        if u < 0:
            raise DomainError(f"cumulative integral needs u >= 0, got {u}")
        k = int(math.floor(u))
        if k >= len(self._knots):
            self._extend_to(k)
        if u == k:
            return self._knots[k]
        return self._knots[k] + adaptive_simpson(self._f, float(k), u, self._tol)


@dataclass(frozen=True)
class GeneratorSpec:
    """A positive non-increasing function f on [0, inf) with limit ``limit_l``.

    ``cumulative(u)`` is the integral of f over [0, u].
    """

    kind: str
    eval: Callable[[float], float] = field(compare=False)
    cumulative: Callable[[float], float] = field(compare=False)
    limit_l: float
    sup_f0: float
    params: tuple[tuple[str, float], ...] = ()

    def to_json(self) -> dict[str, Any]:
        return {"kind": self.kind, **dict(self.params)}

    @classmethod
    def one_plus_exp_neg(
        cls, limit: float = 1.0, amplitude: float = 1.0, rate: float = 1.0
    ) -> "GeneratorSpec":
        """f(u) = limit + amplitude * exp(-rate * u); the default is 1 + e^{-u}."""
        if limit < 0 or amplitude < 0 or rate <= 0 or limit + amplitude <= 0:
            raise ValueError("one_plus_exp_neg needs limit, amplitude >= 0 and rate > 0")

        def f(u: float) -> float:
            return limit + amplitude * math.exp(-rate * u)

        def big_f(u: float) -> float:
            return limit * u - amplitude / rate * math.expm1(-rate * u)

        return cls(
            "one_plus_exp_neg", f, big_f, limit, limit + amplitude,
            (("limit", limit), ("amplitude", amplitude), ("rate", rate)),
        )

    @classmethod
    def reciprocal_shift(cls, scale: float = 1.0, shift: float = 1.0) -> "GeneratorSpec":
        """f(u) = scale / (u + shift), limit 0; cumulative scale * ln(1 + u/shift)."""
        if scale <= 0 or shift <= 0:
            raise ValueError("reciprocal_shift needs scale > 0 and shift > 0")

        def f(u: float) -> float:
            return scale / (u + shift)

        def big_f(u: float) -> float:
            return scale * math.log1p(u / shift)

        return cls(
            "reciprocal_shift", f, big_f, 0.0, scale / shift,
            (("scale", scale), ("shift", shift)),
        )

    @classmethod
    def constant(cls, value: float = 1.0) -> "GeneratorSpec":
        if value <= 0:
            raise ValueError("constant generator needs a positive value")
        return cls(
            "constant", lambda u: value, lambda u: value * u, value, value,
            (("value", value),),
        )

    @classmethod
    def from_function(
        cls, f: Callable[[float], float], limit_l: float, kind: str = "quadrature"
    ) -> "GeneratorSpec":
        """Generator without a closed-form antiderivative."""
        return cls(kind, f, QuadratureCumulative(f), limit_l, f(0.0))

    @classmethod
    def from_json(cls, obj: dict[str, Any]) -> "GeneratorSpec":
        kinds = {
            "one_plus_exp_neg": cls.one_plus_exp_neg,
            "reciprocal_shift": cls.reciprocal_shift,
            "constant": cls.constant,
        }
        params = dict(obj)
        kind = params.pop("kind", None)
        if kind not in kinds:
            raise ValueError(f"unknown generator kind {kind!r}")
        return kinds[kind](**{k: float(v) for k, v in params.items()})


DEFAULT_GENERATOR = GeneratorSpec.one_plus_exp_neg()


@dataclass(frozen=True)
class BasePoint:
    generator: GeneratorSpec
    offset: float = 0.0

    def __post_init__(self):
        if not self.offset >= 0:
            raise DomainError(f"offset must be in [0, inf], got {self.offset}")

    @property
    def is_limit(self) -> bool:
        return self.offset == INF

    def __call__(self, tau: float) -> float:
        return evaluate_point(self, tau)


@dataclass(frozen=True)
class TimePair:
    t: float
    s: float

    def __post_init__(self):
        if not (self.t >= self.s >= 0):
            raise DomainError(f"need t >= s >= 0, got t={self.t}, s={self.s}")


def evaluate_point(x: BasePoint, tau: float) -> float:
    if tau < 0:
        raise DomainError(f"base point evaluated at negative time {tau}")
    if x.is_limit:
        return x.generator.limit_l
    return x.generator.eval(x.offset + tau)


def semiflow(t: float, s: float, x: BasePoint) -> BasePoint:
    """phi(t, s, x) = x_{t-s}."""
    if not (t >= s >= 0):
        raise DomainError(f"semiflow needs t >= s >= 0, got t={t}, s={s}")
    if t == s:
        return x
    return BasePoint(x.generator, x.offset + (t - s))


def translate(x: BasePoint, delta: float) -> BasePoint:
    return semiflow(delta, 0.0, x)


def metric(
    x: BasePoint, y: BasePoint, n_terms: int = 40, samples_per_unit: int = 64
) -> float:
    """Truncated distance of uniform convergence on compacts.

    d(x, y) = sum_{n=1}^{n_terms} 2^{-n} d_n / (1 + d_n), with d_n the sup of
    |x - y| over a uniform sample of [0, n] that includes both endpoints.
    The neglected tail is below 2^{-n_terms}.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if samples_per_unit < 2:
        raise ValueError("samples_per_unit must be >= 2")
    grid = np.linspace(0.0, float(n_terms), n_terms * samples_per_unit + 1)
    diffs = np.array([abs(x(tau) - y(tau)) for tau in grid])
    # running sup over [0, n] for every n at once
    running = np.maximum.accumulate(diffs)
    total = 0.0
    for n in range(1, n_terms + 1):
        d_n = running[n * samples_per_unit]
        total += 2.0 ** (-n) * d_n / (1.0 + d_n)
    return total

