"""Registered example instances, with their claimed classes and witness sequences."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .base_space import DEFAULT_GENERATOR, GeneratorSpec
from .cocycles import DiagonalCocycle, SkewEvolution
from .dichotomy import DichotomyClass, WitnessSequence
from .expressions import ZERO, Expression, Term, poly, term
from .projectors import ProjectorPair, coordinate_pair

D = DichotomyClass
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Instance:
    name: str
    description: str
    cocycle: DiagonalCocycle
    generator: GeneratorSpec = DEFAULT_GENERATOR
    pair: ProjectorPair = field(default_factory=coordinate_pair, compare=False)
    # class -> True/False as stated by the source example; absent = no claim
    claimed: dict[DichotomyClass, bool] = field(default_factory=dict)
    # class -> constants in ClassParams variable names
    claimed_params: dict[DichotomyClass, dict[str, float]] = field(default_factory=dict)
    hint: Expression = ZERO
    witnesses: tuple[WitnessSequence, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def hints(self) -> tuple[Expression, Expression]:
        return (self.hint, self.hint)

    def evolution(self) -> SkewEvolution:
        return SkewEvolution(self.cocycle, None, self.name)

    def witness(self, name: str) -> WitnessSequence:
        for w in self.witnesses:
            if w.name == name:
                return w
        known = ", ".join(w.name for w in self.witnesses) or "none"
        raise KeyError(f"instance {self.name} has no witness {name!r} (known: {known})")

    def to_json(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "description": self.description,
            "generator": self.generator.to_json(),
            "cocycle": self.cocycle.to_json(),
            "projectors": self.pair.name,
            "claimed": {c.value: v for c, v in sorted(self.claimed.items(), key=lambda kv: kv[0].value)},
            "gauge_hint": self.hint.to_json(),
            "witnesses": [w.to_json() for w in self.witnesses],
            "notes": list(self.notes),
        }


def _neg(e: Expression) -> Expression:
    return e.scaled(-1.0)


def _ray(target: DichotomyClass, branch: int = 1) -> WitnessSequence:
    return WitnessSequence(
        "linear-ray" if branch == 1 else "linear-ray-2", branch,
        lambda n: 1.0 + 10.0 * n, lambda n: 1.0, "t = 1 + 10 n, s = 1", target,
    )


def ex21(generator: GeneratorSpec = DEFAULT_GENERATOR, alpha1: float = -1.0, alpha2: float = 1.0) -> Instance:
    l = generator.limit_l
    claimed = alpha1 < 0 < alpha2
    return Instance(
        "ex21",
        "Phi = diag(exp(alpha1 I), exp(alpha2 I)) with I the base integral",
        DiagonalCocycle(ZERO, ZERO, alpha1, alpha2),
        generator,
        claimed={D.UED: claimed} if claimed else {},
        claimed_params={D.UED: {"log_n1": 0.0, "nu1": -alpha1 * l, "log_n2": 0.0, "nu2": alpha2 * l}}
        if claimed and l > 0 else {},
    )


def bved(generator: GeneratorSpec = DEFAULT_GENERATOR) -> Instance:
    l = generator.limit_l
    h1 = Expression((Term("t_sin_t", 1.0), Term("poly", coeffs=(0.0, -2.0))))
    h2 = Expression((Term("poly", coeffs=(0.0, 3.0)), Term("t_cos_t", -2.0)))
    sin_peaks = WitnessSequence(
        "sin-peaks", 1,
        lambda n: TWO_PI * n + math.pi / 2, lambda n: TWO_PI * n,
        "t = 2 n pi + pi/2, s = 2 n pi", D.UED, TWO_PI,
    )
    cos_peaks = WitnessSequence(
        "cos-peaks", 2,
        lambda n: TWO_PI * n, lambda n: TWO_PI * n - math.pi,
        "t = 2 n pi, s = 2 n pi - pi", D.UED, 8.0 * math.pi,
    )
    return Instance(
        "bved",
        "oscillating exponents t sin t and t cos t; nonuniform but not uniform",
        DiagonalCocycle(h1, h2, -1.0, 1.0),
        generator,
        claimed={D.UED: False, D.BVED: True, D.ED: True},
        claimed_params={D.BVED: {
            "log_n": 0.0, "alpha1": 1 + l, "beta1": 3 + l, "alpha2": 1 + l, "beta2": 1 + l,
        }},
        witnesses=(sin_peaks, cos_peaks),
    )


def _knot_drop(branch: int) -> WitnessSequence:
    return WitnessSequence(
        "knot-drop" if branch == 1 else "knot-drop-2", branch,
        lambda n: n + 4.0 ** (-n), lambda n: float(n),
        "t = n + 4^-n, s = n", D.BVED,
    )


def ed_gap(generator: GeneratorSpec = DEFAULT_GENERATOR) -> Instance:
    l = generator.limit_l
    log_g = term("log_g_knots")
    h1 = _neg(log_g) + poly(0.0, -1.0)
    h2 = log_g + poly(0.0, 1.0)
    gauge = {"log_k1": 0.0, "eta1": 1 + l, "nu1": 1 + l, "log_k2": 0.0, "eta2": 1 + l, "nu2": 1 + l}
    return Instance(
        "ed_gap",
        "knot function g with log g(n) = n 4^n and g(n + 4^-n) = 1",
        DiagonalCocycle(h1, h2, -1.0, 1.0),
        generator,
        claimed={D.BVED: False, D.ED: True, D.BVPD: False, D.PD: True},
        claimed_params={
            D.ED: gauge,
            D.PD: {"log_k": 0.0, "eta": 1 + l, "alpha1": 1 + l, "alpha2": 1 + l},
        },
        hint=log_g,
        witnesses=(_knot_drop(1), _knot_drop(2)),
        notes=("log g is linear on [0, 1] so that g is continuous at t = 1",),
    )


def _log_shift(power: float) -> Expression:
    return term("log_poly_shift", 1.0, power=power, shift=1.0)


def upd(generator: GeneratorSpec = DEFAULT_GENERATOR) -> Instance:
    l = generator.limit_l
    g = _log_shift(2.0)
    return Instance(
        "upd",
        "g(t) = t^2 + 1",
        DiagonalCocycle(_neg(g), g, -1.0, 1.0),
        generator,
        claimed={D.UED: False, D.UPD: True},
        claimed_params={D.UPD: {"log_n": 0.0, "alpha1": 1 + l, "alpha2": 2 + l}},
        witnesses=(_ray(D.UED),),
    )


def bvpd(generator: GeneratorSpec = DEFAULT_GENERATOR) -> Instance:
    l = generator.limit_l
    g = _log_shift(1.0)
    return Instance(
        "bvpd",
        "g(t) = t + 1",
        DiagonalCocycle(_neg(g), g, -1.0, 1.0),
        generator,
        claimed={D.BVED: False, D.BVPD: True},
        claimed_params={D.BVPD: {
            "log_n": 0.0, "alpha1": 1 + l, "beta1": 2 + l, "alpha2": 1 + l, "beta2": 2 + l,
        }},
        witnesses=(_ray(D.BVED),),
    )


def _exp_log_peaks(branch: int) -> WitnessSequence:
    return WitnessSequence(
        "exp-log-peaks" if branch == 1 else "exp-log-peaks-2", branch,
        lambda n: math.expm1(TWO_PI * n + math.pi / 2),
        lambda n: math.expm1(TWO_PI * n - math.pi / 2),
        "t = e^(2 n pi + pi/2) - 1, s = e^(2 n pi - pi/2) - 1", D.UPD,
    )


def bvpd_osc(generator: GeneratorSpec = DEFAULT_GENERATOR, name: str = "bvpd_osc") -> Instance:
    l = generator.limit_l
    # log g = (3 - sin ln(t+1)) ln(t+1)
    log_g = Expression((Term("log_poly_shift", 3.0, (), 1.0, 1.0), Term("sin_log", -1.0)))
    return Instance(
        name,
        "g(t) = (t + 1)^(3 - sin ln(t + 1))",
        DiagonalCocycle(_neg(log_g), log_g, -1.0, 1.0),
        generator,
        claimed={D.UPD: False, D.BVPD: True},
        claimed_params={D.BVPD: {
            "log_n": math.log(4.0), "alpha1": 1 + l, "beta1": 3 + l, "alpha2": 2 + l, "beta2": 8 + l,
        }},
        witnesses=(_exp_log_peaks(1), _exp_log_peaks(2)),
    )


def pd_swapped(generator: GeneratorSpec = DEFAULT_GENERATOR, name: str = "pd_swapped") -> Instance:
    g = _log_shift(1.0)
    return Instance(
        name,
        "g(t) = t + 1 with the base integral entering the stable branch with a plus sign",
        DiagonalCocycle(_neg(g), g, 1.0, -1.0),
        generator,
        claimed={D.ED: False, D.BVPD: True, D.PD: True},
        witnesses=(_ray(D.PD),),
        notes=("the source prints |v_k| in this cocycle; the linear map v_k is used",),
    )


def synthetic(slope1: float = -2.0, slope2: float = 2.0, name: str = "synthetic") -> Instance:
    claimed = slope1 < 0 < slope2
    return Instance(
        name,
        f"h1(t) = {slope1:g} t, h2(t) = {slope2:g} t, no base coupling",
        DiagonalCocycle(poly(0.0, slope1), poly(0.0, slope2), 0.0, 0.0),
        claimed={c: True for c in DichotomyClass} if claimed else {},
        claimed_params={D.UED: {"log_n1": 0.0, "nu1": -slope1, "log_n2": 0.0, "nu2": slope2}}
        if claimed else {},
    )


def pure_growth() -> Instance:
    return Instance(
        "pure_growth",
        "h1(t) = h2(t) = 2t: both components grow",
        DiagonalCocycle(poly(0.0, 2.0), poly(0.0, 2.0), 0.0, 0.0),
        claimed={D.ED: False},
    )


L0_GENERATOR = GeneratorSpec.reciprocal_shift(1.0, 1.0)

_BUILDERS: dict[str, Callable[..., Instance]] = {
    "ex21": ex21,
    "bved": bved,
    "ed_gap": ed_gap,
    "upd": upd,
    "bvpd": bvpd,
    "bvpd_osc": bvpd_osc,
    "bvpd_osc_l0": lambda generator=None: bvpd_osc(generator or L0_GENERATOR, "bvpd_osc_l0"),
    "pd_swapped": pd_swapped,
    "pd_swapped_l0": lambda generator=None: pd_swapped(generator or L0_GENERATOR, "pd_swapped_l0"),
    "synthetic": lambda generator=None: synthetic(),
    "pure_growth": lambda generator=None: pure_growth(),
}

NAMES = tuple(_BUILDERS)
# the seven instances drawn from the source examples
SOURCE_INSTANCES = ("ex21", "bved", "ed_gap", "upd", "bvpd", "bvpd_osc", "pd_swapped")


def get(
    name: str,
    generator: Optional[GeneratorSpec] = None,
    alpha1: Optional[float] = None,
    alpha2: Optional[float] = None,
) -> Instance:
    if name not in _BUILDERS:
        raise KeyError(f"unknown gallery instance {name!r} (known: {', '.join(NAMES)})")
    if name == "ex21":
        kwargs: dict[str, Any] = {}
        if alpha1 is not None:
            kwargs["alpha1"] = alpha1
        if alpha2 is not None:
            kwargs["alpha2"] = alpha2
        return ex21(generator or DEFAULT_GENERATOR, **kwargs)
    if alpha1 is not None or alpha2 is not None:
        raise ValueError("--alpha1/--alpha2 only apply to ex21")
    builder = _BUILDERS[name]
    if name in ("synthetic", "pure_growth"):
        return builder()
    return builder(generator) if generator is not None else builder()
