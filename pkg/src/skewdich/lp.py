"""Thin wrapper over scipy's HiGHS linear programming for the minimax fits."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
    "presolve": True,
}


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float


def solve(
    c: Sequence[float],
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    bounds: Sequence[tuple[Optional[float], Optional[float]]],
) -> Optional[LPResult]:
    """Minimize c.x subject to A_ub x <= b_ub and box bounds; None if infeasible."""
    res = linprog(
        np.asarray(c, dtype=float),
        A_ub=A_ub if len(A_ub) else None,
        b_ub=b_ub if len(b_ub) else None,
        bounds=list(bounds),
        method="highs",
        options=_OPTIONS,
    )
    if res.status != 0:
        return None
    return LPResult(np.asarray(res.x, dtype=float), float(res.fun))


def minimax(
    A: np.ndarray,
    b: np.ndarray,
    bounds: Sequence[tuple[float, float]],
) -> Optional[LPResult]:
    """min over the box of max_i (b_i + A_i x). The objective is that max."""
    n_rows, n_vars = A.shape
    A_ub = np.hstack([A, -np.ones((n_rows, 1))])
    res = solve(
        np.r_[np.zeros(n_vars), 1.0], A_ub, -b, list(bounds) + [(None, None)]
    )
    if res is None:
        return None
    return LPResult(res.x[:n_vars], res.objective)
