"""Projector families, complementary projectors and compatibility checks."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .base_space import BasePoint, semiflow
from .cocycles import SkewEvolution, project_log, to_log_vector
from .logscalar import relative_difference

IDEMPOTENCE_TOL = 1e-12
COMPAT_TOL = 1e-9


class ProjectorError(ValueError):
    """A matrix family is not a projector, or a pair is not complementary."""


class IncompatibleProjectors(ValueError):
    """The projector pair fails invariance under the cocycle."""

    def __init__(self, message: str, point: dict):
        super().__init__(message)
        self.point = point


@dataclass(frozen=True)
class ProjectorFamily:
    """x -> P(x), a projection on V for every base point."""

    fn: Callable[[BasePoint], np.ndarray]
    name: str = "custom"

    def matrix(self, x: BasePoint) -> np.ndarray:
        return np.asarray(self.fn(x), dtype=float)

    @classmethod
    def constant(cls, matrix, name: str = "constant") -> "ProjectorFamily":
        m = np.array(matrix, dtype=float)
        m.setflags(write=False)
        return cls(lambda x: m, name)

    def check_idempotent(self, x: BasePoint) -> None:
        m = self.matrix(x)
        err = float(np.max(np.abs(m @ m - m)))
        if err > IDEMPOTENCE_TOL:
            raise ProjectorError(f"{self.name}: P(x)^2 != P(x) (max entry error {err:.3e})")


def coordinate(k: int) -> ProjectorFamily:
    """P_1(x, v) = (v_1, 0) for k = 0, P_2(x, v) = (0, v_2) for k = 1."""
    m = np.zeros((2, 2))
    m[k, k] = 1.0
    return ProjectorFamily.constant(m, f"coordinate_{k + 1}")


def complementary(p: ProjectorFamily, probe: Optional[BasePoint] = None) -> ProjectorFamily:
    """Q(x) = I - P(x)."""
    if probe is not None:
        p.check_idempotent(probe)

    def q(x: BasePoint) -> np.ndarray:
        m = p.matrix(x)
        return np.eye(m.shape[0]) - m

    name = p.name[:-4] if p.name.endswith("_cmp") else p.name + "_cmp"
    return ProjectorFamily(q, name)


@dataclass(frozen=True)
class ProjectorPair:
    p1: ProjectorFamily
    p2: ProjectorFamily
    name: str = "custom"

    def __getitem__(self, k: int) -> ProjectorFamily:
        return (self.p1, self.p2)[k - 1]

    def check(self, x: BasePoint) -> None:
        """Idempotence, P1 + P2 = I, and P1 P2 = P2 P1 = 0 at x."""
        a, b = self.p1.matrix(x), self.p2.matrix(x)
        self.p1.check_idempotent(x)
        self.p2.check_idempotent(x)
        checks = {
            "P1 + P2 = I": a + b - np.eye(a.shape[0]),
            "P1 P2 = 0": a @ b,
            "P2 P1 = 0": b @ a,
        }
        for label, resid in checks.items():
            err = float(np.max(np.abs(resid)))
            if err > IDEMPOTENCE_TOL:
                raise ProjectorError(f"pair {self.name}: {label} fails (max entry error {err:.3e})")


def coordinate_pair() -> ProjectorPair:
    return ProjectorPair(coordinate(0), coordinate(1), "coordinate")


def pair_from_matrix(matrix) -> ProjectorPair:
    p1 = ProjectorFamily.constant(matrix, "explicit")
    return ProjectorPair(p1, complementary(p1), "explicit")


def invariance_residual(
    C: SkewEvolution, p: ProjectorFamily, t: float, s: float, x: BasePoint, v: Sequence[float]
) -> float:
    """Componentwise relative gap between P(phi(t,s,x)) Phi(t,s,x) v and Phi(t,s,x) P(x) v."""
    lv = to_log_vector(v)
    left = project_log(p.matrix(semiflow(t, s, x)), C.apply_log(t, s, x, lv))
    right = C.apply_log(t, s, x, project_log(p.matrix(x), lv))
    return max(relative_difference(a, b) for a, b in zip(left, right))


def validation_grid(t_max: float = 60.0, count: int = 7) -> list[tuple[float, float]]:
    """7 x 7 logarithmically spaced (t, s) pairs with t >= s."""
    axis = [0.0] + list(np.geomspace(0.1, t_max, count - 1))
    return [(t, s) for t in axis for s in axis if t >= s]


def check_compatible(
    C: SkewEvolution, pair: ProjectorPair, x: BasePoint, tol: float = COMPAT_TOL
) -> float:
    """Worst invariance residual of both projectors over the validation grid.

    Raises IncompatibleProjectors with the offending grid point.
    """
    pair.check(x)
    worst = 0.0
    for t, s in validation_grid():
        for v in ((1.0, 0.0), (0.0, 1.0)):
            for k in (1, 2):
                r = invariance_residual(C, pair[k], t, s, x, v)
                worst = max(worst, r)
                if not r <= tol:
                    raise IncompatibleProjectors(
                        f"projector P{k} of pair {pair.name} is not invariant "
                        f"(residual {r:.3e} at t={t:.6g}, s={s:.6g}, v={v})",
                        {"t": t, "s": s, "v": list(v), "k": k, "residual": r},
                    )
    return worst


def restrict(C: SkewEvolution, pair: ProjectorPair, k: int, x: BasePoint) -> SkewEvolution:
    """C_k with Phi_k(t, s, x) = Phi(t, s, x) P_k(x); the pair is validated first."""
    if k not in (1, 2):
        raise ValueError(f"k must be 1 or 2, got {k}")
    check_compatible(C, pair, x)
    return SkewEvolution(C.cocycle, pair[k], label=f"{C.label}|P{k}" if C.label else f"P{k}")

