"""Closed-form log-magnitude laws h(t) used by the diagonal cocycles.

An expression is a sum of tagged terms. Terms are evaluated separately so
that callers can hand the individual values to ``math.fsum``: the knot
interpolant ``log_g_knots`` reaches 1e37 on [0, 60] and differences such
as h(t) - h(s) + h(s) must cancel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Iterable, Sequence

from .base_space import DomainError

# 4**n overflows a double past n = 511
LOG_G_MAX_T = 500.0


def log_g_knots(t: float) -> float:
    """log g for the knot-specified g: log g(n) = n 4^n, log g(n + 4^{-n}) = 0.

    Piecewise linear in log between consecutive knots, and linear from
    log g(0) = 0 to log g(1) = 4 on [0, 1].
    """
    if t < 0:
        raise DomainError(f"log_g_knots needs t >= 0, got {t}")
    if t > LOG_G_MAX_T:
        raise DomainError(f"log_g_knots overflows past t={LOG_G_MAX_T}")
    n = int(math.floor(t))
    if n == 0:
        return 4.0 * t
    frac = t - n
    width = 4.0 ** (-n)
    if frac <= width:
        return n * 4.0**n * (1.0 - frac / width)
    return (n + 1) * 4.0 ** (n + 1) * (frac - width) / (1.0 - width)


def log_g_breakpoints(lo: float, hi: float) -> list[float]:
    out = []
    for n in range(max(1, int(math.floor(lo))), int(math.floor(hi)) + 1):
        for p in (float(n), n + 4.0 ** (-n)):
            if lo < p < hi:
                out.append(p)
    return out


@dataclass(frozen=True)
class Term:
    kind: str
    coef: float = 1.0
    coeffs: tuple[float, ...] = ()
    power: float = 1.0
    shift: float = 1.0

    def __call__(self, t: float) -> float:
        k = self.kind
        if k == "poly":
            return math.fsum(c * t**i for i, c in enumerate(self.coeffs) if c != 0.0)
        if k == "t_sin_t":
            return self.coef * t * math.sin(t)
        if k == "t_cos_t":
            return self.coef * t * math.cos(t)
        if k == "log_g_knots":
            return self.coef * log_g_knots(t)
        if k == "log_poly_shift":
            return self.coef * math.log(t**self.power + self.shift)
        if k == "sin_log":
            lt = math.log1p(t)
            return self.coef * math.sin(lt) * lt
        raise ValueError(f"unknown expression kind {k!r}")

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        if self.kind == "log_g_knots":
            return log_g_breakpoints(lo, hi)
        return []

    def to_json(self) -> dict[str, Any]:
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.coeffs)}
        if self.kind == "log_poly_shift":
            return {"kind": self.kind, "coef": self.coef, "power": self.power, "shift": self.shift}
        return {"kind": self.kind, "coef": self.coef}


KINDS = ("poly", "t_sin_t", "t_cos_t", "log_g_knots", "log_poly_shift", "sin_log")


@dataclass(frozen=True)
class Expression:
    terms: tuple[Term, ...] = ()

    def term_values(self, t: float) -> list[float]:
        return [term(t) for term in self.terms]

    def __call__(self, t: float) -> float:
        return math.fsum(self.term_values(t))

    def breakpoints(self, lo: float, hi: float) -> list[float]:
        return sorted({p for term in self.terms for p in term.breakpoints(lo, hi)})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "Expression") -> "Expression":
        return Expression(self.terms + other.terms)

    def scaled(self, factor: float) -> "Expression":
        out = []
        for term in self.terms:
            if term.kind == "poly":
                out.append(Term("poly", coeffs=tuple(factor * c for c in term.coeffs)))
            else:
                out.append(Term(term.kind, term.coef * factor, (), term.power, term.shift))
        return Expression(tuple(out))

    def to_json(self) -> list[dict[str, Any]]:
        return [term.to_json() for term in self.terms]

    @classmethod
    def from_json(cls, items: Iterable[dict[str, Any]]) -> "Expression":
        terms = []
        for item in items:
            kind = item.get("kind")
            if kind not in KINDS:
                raise ValueError(f"unknown expression kind {kind!r}")
            if kind == "poly":
                terms.append(Term("poly", coeffs=tuple(float(c) for c in item["coeffs"])))
            else:
                terms.append(Term(
                    kind,
                    float(item.get("coef", 1.0)),
                    (),
                    float(item.get("power", 1.0)),
                    float(item.get("shift", 1.0)),
                ))
        return cls(tuple(terms))


ZERO = Expression()


def poly(*coeffs: float) -> Expression:
    return Expression((Term("poly", coeffs=tuple(float(c) for c in coeffs)),))


def term(kind: str, coef: float = 1.0, power: float = 1.0, shift: float = 1.0) -> Expression:
    return Expression((Term(kind, coef, (), power, shift),))


def difference_terms(h: Expression, t: float, s: float) -> list[float]:
    """Values whose exact sum is h(t) - h(s)."""
    if t == s:
        return []
    return h.term_values(t) + [-v for v in h.term_values(s)]


def fsum_all(parts: Sequence[Iterable[float]]) -> float:
    return math.fsum(v for part in parts for v in part)
