"""The six dichotomy classes: margins, minimax fits, witness falsification, lattice.

Every class inequality is rewritten as a log-margin

    sign_k * r - rhs_k(t, s; params) <= 0

where r = log ||Phi_k(t,t0,x)v|| - log ||Phi_k(s,t0,x)v||, sign_k is +1 on
the stable branch and -1 on the unstable one, and rhs_k is linear in the
(log-scale) parameters. A fit is therefore a linear program over the grid
rows, and a margin is an exact fsum of the row terms and the parameter
contributions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import numpy as np

from . import lp
from .base_space import DEFAULT_GENERATOR, BasePoint, DomainError, GeneratorSpec
from .cocycles import SkewEvolution
from .expressions import ZERO, Expression
from .grid import GridSpec, Row, branch_ratio_terms, check_polynomial_domain, collect_rows
from .projectors import ProjectorPair


class DichotomyClass(str, Enum):
    UED = "UED"
    BVED = "BVED"
    ED = "ED"
    UPD = "UPD"
    BVPD = "BVPD"
    PD = "PD"

    @property
    def polynomial(self) -> bool:
        return self in (DichotomyClass.UPD, DichotomyClass.BVPD, DichotomyClass.PD)


ALL_CLASSES = tuple(DichotomyClass)

# unconditional implications (stronger -> weaker)
IMPLIES: dict[DichotomyClass, tuple[DichotomyClass, ...]] = {
    DichotomyClass.UED: (DichotomyClass.BVED, DichotomyClass.UPD),
    DichotomyClass.BVED: (DichotomyClass.ED,),
    DichotomyClass.ED: (DichotomyClass.PD,),
    DichotomyClass.UPD: (DichotomyClass.BVPD,),
    DichotomyClass.BVPD: (DichotomyClass.PD,),
    DichotomyClass.PD: (),
}


def weaker_closure(cls: DichotomyClass) -> set[DichotomyClass]:
    out: set[DichotomyClass] = set()
    stack = list(IMPLIES[cls])
    while stack:
        c = stack.pop()
        if c not in out:
            out.add(c)
            stack.extend(IMPLIES[c])
    return out


def stronger_closure(cls: DichotomyClass) -> set[DichotomyClass]:
    return {c for c in ALL_CLASSES if cls in weaker_closure(c)}


class LatticeError(RuntimeError):
    """A stronger class certified alongside a violated weaker one."""


# -- parameters ---------------------------------------------------------------

LOG_MAX = 10.0
RATE_MIN = 1e-6
EXPONENT_MAX = 50.0

# role -> (lower, upper) box used by the fitter
ROLE_BOUNDS = {
    "log": (0.0, LOG_MAX),
    "rate": (RATE_MIN, EXPONENT_MAX),
    "growth": (RATE_MIN, EXPONENT_MAX),
    "gauge": (0.0, EXPONENT_MAX),
}

VARIABLES: dict[DichotomyClass, tuple[tuple[str, str], ...]] = {
    DichotomyClass.UED: (("log_n1", "log"), ("nu1", "rate"), ("log_n2", "log"), ("nu2", "rate")),
    DichotomyClass.BVED: (
        ("log_n", "log"), ("alpha1", "rate"), ("beta1", "growth"),
        ("alpha2", "rate"), ("beta2", "growth"),
    ),
    DichotomyClass.ED: (
        ("log_k1", "log"), ("eta1", "gauge"), ("nu1", "rate"),
        ("log_k2", "log"), ("eta2", "gauge"), ("nu2", "rate"),
    ),
    DichotomyClass.UPD: (("log_n", "log"), ("alpha1", "rate"), ("alpha2", "rate")),
    DichotomyClass.BVPD: (
        ("log_n", "log"), ("alpha1", "rate"), ("beta1", "growth"),
        ("alpha2", "rate"), ("beta2", "growth"),
    ),
    DichotomyClass.PD: (("log_k", "log"), ("eta", "gauge"), ("alpha1", "rate"), ("alpha2", "rate")),
}

GAUGE_FORMS = ("exp", "power")


@dataclass(frozen=True)
class ClassParams:
    """Constants of one class, with N-type constants kept as logarithms.

    ED gauges are N_k(s) = exp(log_k_k + eta_k s + hint_k(s)). The PD gauge is
    exp(log_k + eta s + hint(s)) or exp(log_k + eta ln s + hint(s)).
    """

    cls: DichotomyClass
    values: tuple[tuple[str, float], ...]
    gauge_form: str = "exp"
    hints: tuple[Expression, Expression] = (ZERO, ZERO)

    def __post_init__(self):
        names = tuple(n for n, _ in VARIABLES[self.cls])
        if tuple(n for n, _ in self.values) != names:
            raise ValueError(f"{self.cls.value} params must be {names}")
        if self.gauge_form not in GAUGE_FORMS:
            raise ValueError(f"unknown gauge form {self.gauge_form!r}")
        for (name, role), (_, v) in zip(VARIABLES[self.cls], self.values):
            if not math.isfinite(v):
                raise ValueError(f"{name} must be finite")
            if role == "log" and v < 0:
                raise ValueError(f"{name} must be >= 0 (N >= 1)")
            if role in ("rate", "growth") and v <= 0:
                raise ValueError(f"{name} must be > 0")
            if role == "gauge" and v < 0:
                raise ValueError(f"{name} must be >= 0")

    @classmethod
    def make(
        cls,
        klass: DichotomyClass,
        values: Mapping[str, float],
        gauge_form: str = "exp",
        hints: tuple[Expression, Expression] = (ZERO, ZERO),
    ) -> "ClassParams":
        names = [n for n, _ in VARIABLES[klass]]
        missing = set(names) - set(values)
        extra = set(values) - set(names)
        if missing or extra:
            raise ValueError(f"{klass.value} params: missing {sorted(missing)}, unexpected {sorted(extra)}")
        return cls(klass, tuple((n, float(values[n])) for n in names), gauge_form, hints)

    def __getitem__(self, name: str) -> float:
        return dict(self.values)[name]

    def as_dict(self) -> dict[str, float]:
        return dict(self.values)

    def to_json(self) -> dict[str, Any]:
        out: dict[str, Any] = dict(self.values)
        if self.cls in (DichotomyClass.ED, DichotomyClass.PD):
            out["gauge_form"] = self.gauge_form
            out["gauge_hints"] = [h.to_json() for h in self.hints]
        return out


def lenient_params(
    cls: DichotomyClass,
    hints: tuple[Expression, Expression] = (ZERO, ZERO),
    gauge_form: str = "exp",
) -> ClassParams:
    """The box corner that minimizes every margin pointwise.

    Largest N, smallest decay rates, largest growth exponents. A witness
    that diverges here diverges for every parameter set in the box.
    """
    values = {}
    for name, role in VARIABLES[cls]:
        lo, hi = ROLE_BOUNDS[role]
        values[name] = lo if role == "rate" else hi
    return ClassParams.make(cls, values, gauge_form, hints)



def params_at(
    cls: DichotomyClass,
    log_value: float,
    rate: float,
    growth: float,
    hints: tuple[Expression, Expression] = (ZERO, ZERO),
    gauge_form: str = "exp",
) -> ClassParams:
    """One value per role: every log N = log_value, every decay rate = rate,
    growth exponents and gauge exponents = growth."""
    by_role = {"log": log_value, "rate": rate, "growth": growth, "gauge": growth}
    return ClassParams.make(cls, {n: by_role[r] for n, r in VARIABLES[cls]}, gauge_form, hints)

# -- margins ------------------------------------------------------------------


def _design(
    cls: DichotomyClass, branch: int, t: float, s: float, gauge_form: str
) -> dict[str, float]:
    """Coefficients of the parameters in the margin (margin = const + sum coef * value)."""
    k = str(branch)
    if cls is DichotomyClass.UED:
        return {"log_n" + k: -1.0, "nu" + k: t - s}
    if cls is DichotomyClass.BVED:
        return {"log_n": -1.0, "alpha" + k: t, "beta" + k: -s}
    if cls is DichotomyClass.ED:
        return {"log_k" + k: -1.0, "eta" + k: -s, "nu" + k: t}
    lt, ls = math.log(t), math.log(s)
    if cls is DichotomyClass.UPD:
        return {"log_n": -1.0, "alpha" + k: lt - ls}
    if cls is DichotomyClass.BVPD:
        return {"log_n": -1.0, "alpha" + k: lt, "beta" + k: -ls}
    gauge_arg = s if gauge_form == "exp" else ls
    return {"log_k": -1.0, "eta": -gauge_arg, "alpha" + k: lt}


def _const_terms(
    cls: DichotomyClass, row: Row, hints: tuple[Expression, Expression]
) -> list[float]:
    sign = 1.0 if row.branch == 1 else -1.0
    terms = [sign * v for v in row.terms]
    if cls in (DichotomyClass.ED, DichotomyClass.PD):
        hint = hints[row.branch - 1]
        if not hint.is_zero:
            terms.extend(-v for v in hint.term_values(row.s))
    return terms


def row_margin(cls: DichotomyClass, params: ClassParams, row: Row) -> float:
    coefs = _design(cls, row.branch, row.t, row.s, params.gauge_form)
    vals = params.as_dict()
    terms = _const_terms(cls, row, params.hints)
    terms.extend(c * vals[name] for name, c in coefs.items())
    return math.fsum(terms)


def _class_rows(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    cls: DichotomyClass,
    grid: GridSpec,
    generator: GeneratorSpec,
) -> list[Row]:
    rows = collect_rows(C, pair, grid, generator)
    if cls.polynomial:
        check_polynomial_domain(rows)
    # the basis vector and (1, 1) project to the same vector; keep one row
    seen = set()
    out = []
    for r in rows:
        key = (r.branch, r.t, r.s, r.t0, r.x_offset, r.terms)
        if key not in seen:
            seen.add(key)
            out.append(r)
    return out


def worst_row(
    cls: DichotomyClass, params: ClassParams, rows: Sequence[Row]
) -> tuple[float, Optional[Row]]:
    """Largest margin over the rows (ties go to the first row)."""
    worst, arg = -math.inf, None
    for r in rows:
        m = row_margin(cls, params, r)
        if m > worst or arg is None:
            worst, arg = m, r
    return worst, arg


def class_grid(cls: DichotomyClass, grid: GridSpec) -> GridSpec:
    """Polynomial classes live on the s >= 1 part of the grid."""
    return grid.polynomial() if cls.polynomial else grid


def class_margin(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    cls: DichotomyClass,
    params: ClassParams,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
) -> float:
    """max over the grid and both branches of log LHS - log RHS.

    Raises DomainError for a polynomial class on a grid with s < 1.
    """
    if params.cls is not cls:
        raise ValueError(f"params are for {params.cls.value}, not {cls.value}")
    rows = _class_rows(C, pair, cls, grid, generator)
    if not rows:
        return -math.inf
    return worst_row(cls, params, rows)[0]


# -- certificates and fitting ---------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    cls: DichotomyClass
    params: ClassParams
    grid: GridSpec
    worst_margin_log: float
    verdict: str
    argmax: Optional[dict[str, Any]] = None
    source: str = "fit"
    minimax_bound: Optional[float] = None
    notes: tuple[str, ...] = ()

    @property
    def certified(self) -> bool:
        return self.verdict == "certified"

    def to_json(self) -> dict[str, Any]:
        return {
            "class": self.cls.value,
            "verdict": self.verdict,
            "source": self.source,
            "worst_margin_log": self.worst_margin_log,
            "minimax_bound": self.minimax_bound,
            "argmax": self.argmax,
            "params": self.params.to_json(),
            "grid": self.grid.to_json(),
            "notes": list(self.notes),
        }


def _verdict(margin: float, tol: float) -> str:
    return "certified" if margin <= tol else "violated"


def certify(
    rows: Sequence[Row],
    cls: DichotomyClass,
    params: ClassParams,
    grid: GridSpec,
    source: str,
    minimax_bound: Optional[float] = None,
    notes: tuple[str, ...] = (),
) -> Certificate:
    worst, arg = worst_row(cls, params, rows)
    at_floor = [n for n, role in VARIABLES[cls] if role == "rate" and params[n] <= 1.0001 * RATE_MIN]
    if worst <= grid.tol_log and at_floor:
        notes = notes + (f"{', '.join(at_floor)} at the rate floor; the grid cannot tell this from zero",)
    return Certificate(
        cls, params, grid, worst, _verdict(worst, grid.tol_log),
        arg.point() if arg is not None else None, source, minimax_bound, notes,
    )


# rows whose constant part exceeds this cannot be offset by any box parameter
HOPELESS = 1e6
# rows this far below zero can never be the maximum
DROP_BELOW = -1.0
POLISH_LIMIT = 1e-6
_EPS_GROWTH = 1e-3


def _polish(
    cls: DichotomyClass, params: ClassParams, rows: Sequence[Row]
) -> ClassParams:
    """Absorb LP feasibility slack (<= 1e-6) into the N-type constants."""
    vals = params.as_dict()
    logs = [n for n, role in VARIABLES[cls] if role == "log"]
    per_branch = len(logs) == 2
    worst = {1: -math.inf, 2: -math.inf}
    for r in rows:
        worst[r.branch] = max(worst[r.branch], row_margin(cls, params, r))
    if per_branch:
        for b, name in zip((1, 2), logs):
            if 0 < worst[b] <= POLISH_LIMIT:
                vals[name] += worst[b]
    else:
        w = max(worst.values())
        if 0 < w <= POLISH_LIMIT:
            vals[logs[0]] += w
    return ClassParams.make(cls, vals, params.gauge_form, params.hints)


def _fit_form(
    cls: DichotomyClass,
    rows: Sequence[Row],
    grid: GridSpec,
    hints: tuple[Expression, Expression],
    gauge_form: str,
    claimed: Optional[Mapping[str, float]],
) -> Certificate:
    spec = VARIABLES[cls]
    names = [n for n, _ in spec]
    roles = [r for _, r in spec]
    bounds = [ROLE_BOUNDS[r] for r in roles]
    reach = np.array([max(abs(lo), abs(hi)) for lo, hi in bounds])

    b_list, a_list, keep = [], [], []
    hopeless = None
    for r in rows:
        const = math.fsum(_const_terms(cls, r, hints))
        coefs = _design(cls, r.branch, r.t, r.s, gauge_form)
        a = np.array([coefs.get(n, 0.0) for n in names])
        span = float(np.abs(a) @ reach)
        if const - span > HOPELESS:
            hopeless = r
            break
        if const + span < DROP_BELOW:
            continue
        b_list.append(const)
        a_list.append(a)
        keep.append(r)

    lenient = lenient_params(cls, hints, gauge_form)
    if hopeless is not None:
        return certify(
            rows, cls, lenient, grid, "fit",
            notes=(f"row at t={hopeless.t:.6g}, s={hopeless.s:.6g} exceeds every parameter in the box",),
        )
    if not keep:
        # every row sits below -1 whatever the parameters
        params = _fit_lexicographic(cls, None, None, bounds, roles, names, hints, gauge_form, 0.0, claimed)
        return certify(rows, cls, params, grid, "fit")
    A = np.vstack(a_list)
    b = np.array(b_list)
    first = lp.minimax(A, b, bounds)
    if first is None:
        return certify(rows, cls, lenient, grid, "fit", notes=("minimax LP failed",))
    z = first.objective
    if z > grid.tol_log:
        params = ClassParams.make(cls, dict(zip(names, first.x)), gauge_form, hints)
        return certify(rows, cls, params, grid, "fit", minimax_bound=z)
    params = _fit_lexicographic(cls, A, b, bounds, roles, names, hints, gauge_form, max(z, 0.0), claimed)
    if params is None:
        params = ClassParams.make(cls, dict(zip(names, first.x)), gauge_form, hints)
    params = _polish(cls, params, rows)
    return certify(rows, cls, params, grid, "fit", minimax_bound=z)


def _fit_lexicographic(
    cls, A, b, bounds, roles, names, hints, gauge_form, cap, claimed
) -> Optional[ClassParams]:
    """Smallest N, then largest decay rates, then closest to the claimed constants."""
    n = len(names)
    if A is None:
        A = np.zeros((0, n))
        b = np.zeros(0)
    A_ub = A.copy()
    b_ub = cap - b
    is_log = np.array([r == "log" for r in roles], dtype=float)
    stage2 = lp.solve(is_log, A_ub, b_ub, bounds)
    if stage2 is None:
        return None
    A_ub = np.vstack([A_ub, is_log])
    b_ub = np.r_[b_ub, stage2.objective + 1e-9]
    c3 = np.array([-1.0 if r == "rate" else (_EPS_GROWTH if r in ("growth", "gauge") else 0.0) for r in roles])
    stage3 = lp.solve(c3, A_ub, b_ub, bounds)
    if stage3 is None:
        return ClassParams.make(cls, dict(zip(names, stage2.x)), gauge_form, hints)
    x = stage3.x
    if claimed:
        target = np.array([claimed.get(nm, np.nan) for nm in names])
        mask = ~np.isnan(target)
        if mask.any():
            # minimize sum |x_j - target_j| over the stage-3 optimal face
            A4 = np.vstack([A_ub, c3])
            b4 = np.r_[b_ub, stage3.objective + 1e-9 * (1.0 + abs(stage3.objective))]
            m = int(mask.sum())
            idx = np.flatnonzero(mask)
            A_ext = np.hstack([A4, np.zeros((A4.shape[0], m))])
            rows_abs = []
            rhs_abs = []
            for j, i in enumerate(idx):
                for sgn in (1.0, -1.0):
                    row = np.zeros(n + m)
                    row[i] = sgn
                    row[n + j] = -1.0
                    rows_abs.append(row)
                    rhs_abs.append(sgn * target[i])
            A_all = np.vstack([A_ext, np.array(rows_abs)])
            b_all = np.r_[b4, rhs_abs]
            c4 = np.r_[np.zeros(n), np.ones(m)]
            stage4 = lp.solve(c4, A_all, b_all, list(bounds) + [(0.0, None)] * m)
            if stage4 is not None:
                x = stage4.x[:n]
    return ClassParams.make(cls, dict(zip(names, x)), gauge_form, hints)


def fit_class(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    cls: DichotomyClass,
    grid: GridSpec,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
    hints: tuple[Expression, Expression] = (ZERO, ZERO),
    claimed: Optional[Mapping[str, float]] = None,
) -> Certificate:
    """Minimax fit of the class constants over the grid.

    For PD both gauge forms are tried and the smaller worst margin wins
    (the power form on ties).
    """
    g = class_grid(cls, grid)
    if g.is_empty():
        raise ValueError(f"grid has no points for {cls.value}")
    rows = _class_rows(C, pair, cls, g, generator)
    if cls is DichotomyClass.PD:
        cands = [_fit_form(cls, rows, g, hints, form, claimed) for form in ("power", "exp")]
        return min(cands, key=lambda c: (not c.certified, c.worst_margin_log if not c.certified else 0.0))
    return _fit_form(cls, rows, g, hints, "exp", claimed)


# -- witnesses -------------------------------------------------------------------

FALSIFY_FINAL = 50.0
FALSIFY_MIN_STEP = 1e-3


@dataclass(frozen=True)
class WitnessSequence:
    """A closed-form sequence (t_n, s_n) probing one branch."""

    name: str
    branch: int
    t_of: Callable[[int], float] = field(compare=False)
    s_of: Callable[[int], float] = field(compare=False)
    formula: str
    target: DichotomyClass
    increment: Optional[float] = None

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name, "branch": self.branch, "formula": self.formula,
            "target": self.target.value, "increment": self.increment,
        }


@dataclass(frozen=True)
class Witness:
    sequence: WitnessSequence
    cls: DichotomyClass
    params: ClassParams
    n_values: tuple[int, ...]
    margins_log: tuple[float, ...]
    verdict: str
    note: str = ""

    @property
    def increments(self) -> tuple[float, ...]:
        m = self.margins_log
        return tuple(b - a for a, b in zip(m, m[1:]))

    @property
    def falsified(self) -> bool:
        return self.verdict == "falsified"

    def to_json(self) -> dict[str, Any]:
        return {
            "witness": self.sequence.to_json(),
            "class": self.cls.value,
            "verdict": self.verdict,
            "n": list(self.n_values),
            "margins_log": list(self.margins_log),
            "increments": list(self.increments),
            "params": self.params.to_json(),
            "note": self.note,
        }


def witness_margin(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    params: ClassParams,
    seq: WitnessSequence,
    n: int,
    generator: GeneratorSpec = DEFAULT_GENERATOR,
) -> float:
    """Class margin at (t_n, s_n) with t0 = s_n, base point f and the branch basis vector."""
    t, s = seq.t_of(n), seq.s_of(n)
    if not t > s:
        raise DomainError(f"witness {seq.name}: t_n <= s_n at n={n} (float resolution)")
    if params.cls.polynomial and s < 1.0:
        raise DomainError(f"witness {seq.name}: s_n={s} < 1 for a polynomial class")
    v = (1.0, 0.0) if seq.branch == 1 else (0.0, 1.0)
    x = BasePoint(generator, 0.0)
    terms = branch_ratio_terms(C, pair, seq.branch if pair is not None else None, t, s, s, x, v)
    if terms is None:
        return -math.inf
    row = Row(t, s, s, 0.0, v, seq.branch, terms)
    return row_margin(params.cls, params, row)


def witness_verdict(margins: Sequence[float]) -> str:
    """Falsified when the final margin is large and the second half keeps climbing.

    Only the tail is required to be monotone: at the lenient corner the large
    growth exponents can pull the first few margins down before the witness
    term takes over.
    """
    if len(margins) < 2:
        return "inconclusive"
    steps = [b - a for a, b in zip(margins, margins[1:])]
    tail = steps[len(steps) // 2:]
    if margins[-1] > FALSIFY_FINAL and all(d >= FALSIFY_MIN_STEP for d in tail):
        return "falsified"
    return "inconclusive"


def falsify(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    cls: DichotomyClass,
    params: Optional[ClassParams],
    seq: WitnessSequence,
    n_range: Iterable[int] = range(1, 13),
    generator: GeneratorSpec = DEFAULT_GENERATOR,
    hints: tuple[Expression, Expression] = (ZERO, ZERO),
) -> Witness:
    """Evaluate the class margin along the witness sequence.

    ``params`` defaults to the lenient corner of the fit box, so a
    "falsified" verdict there covers every constant set the fitter could
    return. The sequence is cut short, with a note, when it leaves the
    domain (float resolution, knot overflow, s < 1 for polynomial classes).
    """
    if params is None:
        # for s >= 1 the exp gauge dominates the power gauge
        params = lenient_params(cls, hints, "exp")
    if params.cls is not cls:
        raise ValueError(f"params are for {params.cls.value}, not {cls.value}")
    ns, margins, note = [], [], ""
    for n in n_range:
        try:
            m = witness_margin(C, pair, params, seq, n, generator)
        except DomainError as exc:
            note = f"stopped at n={n}: {exc}"
            break
        ns.append(n)
        margins.append(m)
    return Witness(seq, cls, params, tuple(ns), tuple(margins), witness_verdict(margins), note)


# -- lattice ---------------------------------------------------------------------


def convert(params: ClassParams, target: DichotomyClass) -> Optional[ClassParams]:
    """Constants for a weaker class implied by ``params``; None when the rule does not apply."""
    src, v = params.cls, params.as_dict()
    D = DichotomyClass
    if src is D.UED and target is D.BVED:
        n = max(v["log_n1"], v["log_n2"])
        return ClassParams.make(target, {
            "log_n": n, "alpha1": v["nu1"], "beta1": v["nu1"], "alpha2": v["nu2"], "beta2": v["nu2"],
        })
    if src is D.UED and target is D.UPD:
        n = max(v["log_n1"], v["log_n2"])
        return ClassParams.make(target, {"log_n": n, "alpha1": v["nu1"], "alpha2": v["nu2"]})
    if src is D.BVED and target is D.ED:
        return ClassParams.make(target, {
            "log_k1": v["log_n"], "eta1": v["beta1"], "nu1": v["alpha1"],
            "log_k2": v["log_n"], "eta2": v["beta2"], "nu2": v["alpha2"],
        })
    if src is D.BVED and target is D.BVPD:
        if v["alpha1"] < v["beta1"] or v["alpha2"] < v["beta2"]:
            return None
        return ClassParams.make(target, v)
    if src is D.UPD and target is D.BVPD:
        return ClassParams.make(target, {
            "log_n": v["log_n"], "alpha1": v["alpha1"], "beta1": v["alpha1"],
            "alpha2": v["alpha2"], "beta2": v["alpha2"],
        })
    if src is D.BVPD and target is D.PD:
        return ClassParams.make(target, {
            "log_k": v["log_n"], "eta": max(v["beta1"], v["beta2"]),
            "alpha1": v["alpha1"], "alpha2": v["alpha2"],
        }, gauge_form="power")
    if src is D.ED and target is D.PD:
        if params.hints[0] != params.hints[1]:
            return None
        return ClassParams.make(target, {
            "log_k": max(v["log_k1"], v["log_k2"]), "eta": max(v["eta1"], v["eta2"]),
            "alpha1": v["nu1"], "alpha2": v["nu2"],
        }, gauge_form="exp", hints=params.hints)
    return None


CONVERSIONS = (
    (DichotomyClass.UED, DichotomyClass.BVED),
    (DichotomyClass.UED, DichotomyClass.UPD),
    (DichotomyClass.BVED, DichotomyClass.ED),
    (DichotomyClass.BVED, DichotomyClass.BVPD),
    (DichotomyClass.UPD, DichotomyClass.BVPD),
    (DichotomyClass.BVPD, DichotomyClass.PD),
    (DichotomyClass.ED, DichotomyClass.PD),
)


@dataclass(frozen=True)
class Classification:
    certificates: dict[DichotomyClass, Certificate]
    witnesses: tuple[Witness, ...]

    def verdicts(self) -> dict[str, str]:
        return {c.value: self.certificates[c].verdict for c in ALL_CLASSES}

    def to_json(self) -> dict[str, Any]:
        return {
            "certificates": {c.value: self.certificates[c].to_json() for c in ALL_CLASSES},
            "witnesses": [w.to_json() for w in self.witnesses],
        }


def classify(
    C: SkewEvolution,
    pair: Optional[ProjectorPair],
    grid: GridSpec,
    witnesses: Sequence[WitnessSequence] = (),
    generator: GeneratorSpec = DEFAULT_GENERATOR,
    hints: tuple[Expression, Expression] = (ZERO, ZERO),
    claimed: Optional[Mapping[DichotomyClass, Mapping[str, float]]] = None,
    n_range: Iterable[int] = range(1, 13),
) -> Classification:
    """Fit all six classes, run the witnesses, then make the result lattice-consistent.

    Falsified classes demote every stronger class. Certified classes promote
    their weaker classes with converted constants, each conversion being
    re-checked on the grid; a conversion that fails its re-check raises
    LatticeError, as does any remaining stronger-certified / weaker-violated
    pair.
    """
    claimed = claimed or {}
    rows = {c: _class_rows(C, pair, c, class_grid(c, grid), generator) for c in ALL_CLASSES}
    certs = {
        c: fit_class(C, pair, c, grid, generator, hints, claimed.get(c))
        for c in ALL_CLASSES
    }

    n_values = list(n_range)
    results = []
    falsified: dict[DichotomyClass, Witness] = {}
    for seq in witnesses:
        for c in ALL_CLASSES:
            w = falsify(C, pair, c, None, seq, n_values, generator, hints)
            results.append(w)
            if w.falsified and c not in falsified:
                falsified[c] = w

    def demote(c: DichotomyClass, w: Witness, source: str) -> None:
        cert = certs[c]
        if not cert.certified:
            certs[c] = Certificate(
                cert.cls, cert.params, cert.grid, cert.worst_margin_log, cert.verdict,
                cert.argmax, source, cert.minimax_bound, cert.notes + (f"witness {w.sequence.name}",),
            )
            return
        # grid evidence passed but the witness is conclusive; report the
        # witness margin under the fitted constants
        m = falsify(C, pair, c, cert.params, w.sequence, w.n_values, generator, hints)
        point = {"witness": w.sequence.name, "n": m.n_values[-1]} if m.n_values else None
        certs[c] = Certificate(
            c, cert.params, cert.grid, m.margins_log[-1] if m.margins_log else math.inf,
            "violated", point, source, cert.minimax_bound,
            cert.notes + (f"grid passed, witness {w.sequence.name} diverges",),
        )

    for c, w in falsified.items():
        demote(c, w, "witness")
    for c, w in falsified.items():
        for stronger in stronger_closure(c):
            if stronger not in falsified:
                demote(stronger, w, f"implied by {c.value} falsified")

    # promote along the lattice in topological order
    changed = True
    while changed:
        changed = False
        for src, dst in CONVERSIONS:
            if not certs[src].certified or certs[dst].certified:
                continue
            conv = convert(certs[src].params, dst)
            if conv is None:
                continue
            cert = certify(rows[dst], dst, conv, class_grid(dst, grid), f"implied by {src.value}")
            if not cert.certified:
                raise LatticeError(
                    f"{src.value} -> {dst.value} conversion fails on the grid "
                    f"(margin {cert.worst_margin_log:.3e} at {cert.argmax})"
                )
            if dst in falsified:
                raise LatticeError(
                    f"{src.value} certified but {dst.value} falsified by {falsified[dst].sequence.name}"
                )
            certs[dst] = cert
            changed = True

    for strong in ALL_CLASSES:
        if not certs[strong].certified:
            continue
        for weak in weaker_closure(strong):
            if not certs[weak].certified:
                raise LatticeError(f"{strong.value} certified but {weak.value} violated")
    return Classification(certs, tuple(results))
