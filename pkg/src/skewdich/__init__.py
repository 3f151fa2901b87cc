"""Exponential and polynomial dichotomies of skew-evolution semiflows, checked numerically."""

__version__ = "0.1.0"
