"""Command line: classify, criteria, falsify, gallery-list, compose-check, spectral-sample.

Exit codes: 0 done (verdicts are in the report), 2 bad input, 3 incompatible
projectors, 4 criteria not applicable.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from typing import Any, Optional, Sequence

import numpy as np

from . import gallery, report
from .base_space import DEFAULT_GENERATOR, BasePoint, GeneratorSpec
from .cocycles import SkewEvolution, compose_residual
from .criteria import criteria_roundtrip
from .dichotomy import DichotomyClass, LatticeError, classify, falsify, fit_class, params_at
from .gallery import Instance
from .grid import Axis, GridSpec
from .projectors import IncompatibleProjectors, check_compatible
from .spectral import DEFAULT_MODES, ModeVector, spectral_evolution, write_samples_csv
from .specfile import SpecError, load_instance

EXIT_INPUT = 2
EXIT_PROJECTORS = 3
EXIT_NOT_APPLICABLE = 4

COMPOSE_TOL = 1e-9
T_MAX = 60.0


class InputError(Exception):
    pass


# -- argument plumbing -----------------------------------------------------------------


def _generator(text: Optional[str]) -> Optional[GeneratorSpec]:
    if text is None:
        return None
    if text.lstrip().startswith("{"):
        try:
            return GeneratorSpec.from_json(json.loads(text))
        except (json.JSONDecodeError, TypeError, ValueError) as exc:
            raise InputError(f"bad --generator: {exc}") from None
    presets = {
        "one_plus_exp_neg": GeneratorSpec.one_plus_exp_neg,
        "reciprocal_shift": GeneratorSpec.reciprocal_shift,
        "constant": GeneratorSpec.constant,
    }
    if text not in presets:
        raise InputError(f"unknown generator {text!r}; use one of {sorted(presets)} or a JSON object")
    return presets[text]()


def _instance(args: argparse.Namespace) -> Instance:
    if args.spec:
        if args.alpha1 is not None or args.alpha2 is not None:
            raise InputError("--alpha1/--alpha2 only apply to --gallery ex21")
        try:
            return load_instance(args.spec)
        except SpecError as exc:
            raise InputError(str(exc)) from None
    try:
        return gallery.get(args.gallery, _generator(args.generator), args.alpha1, args.alpha2)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _grid(args: argparse.Namespace) -> GridSpec:
    grid = GridSpec()
    try:
        if args.grid_t:
            grid = replace(grid, t_axis=Axis.parse(args.grid_t))
        if args.grid_s:
            grid = replace(grid, s_axis=Axis.parse(args.grid_s))
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if args.tol_log is not None:
        if not args.tol_log >= 0:
            raise InputError("--tol-log must be >= 0")
        grid = replace(grid, tol_log=args.tol_log)
    return grid


def _emit(args: argparse.Namespace, payload: dict[str, Any], summary: str) -> None:
    text = report.dumps(payload)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    if args.json:
        sys.stdout.write(text)
    elif summary:
        print(summary)


def _claims(inst: Instance, verdicts: dict[str, str]) -> dict[str, Any]:
    out = {}
    for c in DichotomyClass:
        if c in inst.claimed:
            tool = verdicts.get(c.value)
            out[c.value] = {
                "claimed": inst.claimed[c],
                "tool": tool,
                "agrees": (tool == "certified") == inst.claimed[c],
            }
    return out


def _evolution(inst: Instance) -> SkewEvolution:
    C = inst.evolution()
    check_compatible(C, inst.pair, BasePoint(inst.generator, 0.0))
    return C


# -- subcommands ------------------------------------------------------------------


def cmd_classify(args: argparse.Namespace) -> int:
    inst = _instance(args)
    grid = _grid(args)
    C = _evolution(inst)
    claimed = {c: v for c, v in inst.claimed_params.items()}
    result = classify(C, inst.pair, grid, inst.witnesses, inst.generator, inst.hints, claimed)
    verdicts = result.verdicts()
    payload = report.make_report(
        "classify", inst.to_json(), grid.to_json(), result.to_json(),
        verdicts=verdicts, claims=_claims(inst, verdicts),
    )
    summary = "\n".join(f"{inst.name} {c}: {v}" for c, v in verdicts.items())
    _emit(args, payload, summary)
    return 0


def cmd_criteria(args: argparse.Namespace) -> int:
    inst = _instance(args)
    grid = _grid(args)
    C = _evolution(inst)
    ed = fit_class(C, inst.pair, DichotomyClass.ED, grid, inst.generator, inst.hints,
                   inst.claimed_params.get(DichotomyClass.ED))
    rt = criteria_roundtrip(C, inst.pair, ed, grid, inst.generator, inst.hint, force=args.force)
    payload = report.make_report(
        "criteria", inst.to_json(), grid.to_json(), rt.to_json(), ed_certificate=ed.to_json(),
    )
    _emit(args, payload, f"{inst.name} criteria: {rt.status}")
    return 0 if rt.applicable else EXIT_NOT_APPLICABLE


def cmd_falsify(args: argparse.Namespace) -> int:
    inst = _instance(args)
    try:
        seq = inst.witness(args.witness)
    except KeyError as exc:
        raise InputError(exc.args[0]) from None
    cls = DichotomyClass(args.cls)
    C = _evolution(inst)
    params = None
    if args.log_n is not None or args.rate is not None or args.beta is not None:
        try:
            params = params_at(
                cls,
                10.0 if args.log_n is None else args.log_n,
                1e-3 if args.rate is None else args.rate,
                1.0 if args.beta is None else args.beta,
                inst.hints,
            )
        except ValueError as exc:
            raise InputError(str(exc)) from None
    w = falsify(C, inst.pair, cls, params, seq, range(1, args.n_max + 1), inst.generator, inst.hints)
    payload = report.make_report("falsify", inst.to_json(), None, w.to_json())
    lines = [f"{inst.name} {cls.value} {seq.name}: {w.verdict}"]
    lines += [f"  n={n} margin_log={m:.6f}" for n, m in zip(w.n_values, w.margins_log)]
    _emit(args, payload, "\n".join(lines))
    return 0


def cmd_gallery_list(args: argparse.Namespace) -> int:
    items = [gallery.get(name).to_json() for name in gallery.NAMES]
    payload = report.make_report("gallery-list", None, None, items)
    summary = "\n".join(f"{it['name']:<15} {it['description']}" for it in items)
    _emit(args, payload, summary)
    return 0


def _random_triples(rng: np.random.Generator, count: int) -> list[tuple[float, float, float]]:
    out = []
    for _ in range(count):
        t, s, t0 = sorted(rng.uniform(0.0, T_MAX, 3), reverse=True)
        out.append((float(t), float(s), float(t0)))
    return out


def compose_sweep(
    C: SkewEvolution, generator: GeneratorSpec, dim: int, count: int, seed: int
) -> dict[str, Any]:
    """Largest cocycle-law residual over ``count`` random (t, s, t0, x, v)."""
    rng = np.random.default_rng(seed)
    worst, where = 0.0, None
    for t, s, t0 in _random_triples(rng, count):
        x = BasePoint(generator, float(rng.uniform(0.0, 5.0)))
        v = tuple(float(a) for a in rng.normal(size=dim))
        r = compose_residual(C, t, s, t0, x, v)
        if r > worst or where is None:
            worst, where = r, {"t": t, "s": s, "t0": t0, "x_offset": x.offset}
    return {"count": count, "seed": seed, "max_residual_log": worst, "at": where,
            "passed": worst <= COMPOSE_TOL}


def cmd_compose_check(args: argparse.Namespace) -> int:
    if args.gallery or args.spec:
        targets = [_instance(args)]
    else:
        targets = [gallery.get(n) for n in gallery.SOURCE_INSTANCES]
    results = {}
    for inst in targets:
        results[inst.name] = compose_sweep(inst.evolution(), inst.generator, 2, args.count, args.seed)
    if not (args.gallery or args.spec) or args.spectral:
        results["spectral"] = compose_sweep(
            spectral_evolution(args.modes), DEFAULT_GENERATOR, args.modes, args.count, args.seed
        )
    payload = report.make_report("compose-check", None, None, results, tolerance=COMPOSE_TOL)
    summary = "\n".join(
        f"{name:<12} max residual {r['max_residual_log']:.3e} {'ok' if r['passed'] else 'FAILED'}"
        for name, r in results.items()
    )
    _emit(args, payload, summary)
    return 0


def _floats(text: str, flag: str) -> list[float]:
    try:
        return [float(p) for p in text.split(",") if p.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def cmd_spectral_sample(args: argparse.Namespace) -> int:
    if args.coeffs:
        coeffs = _floats(args.coeffs, "--coeffs")
        if len(coeffs) > args.modes:
            raise InputError(f"{len(coeffs)} coefficients for {args.modes} modes")
        v = ModeVector(tuple(coeffs + [0.0] * (args.modes - len(coeffs))))
    else:
        try:
            v = ModeVector.basis(args.mode, args.modes)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    times = _floats(args.times, "--times")
    if any(t < 0 for t in times):
        raise InputError("--times must be >= 0")
    n_y = args.points
    if n_y < 2:
        raise InputError("--points must be >= 2")
    ys = [i / (n_y - 1) for i in range(n_y)]
    x = BasePoint(_generator(args.generator) or DEFAULT_GENERATOR, args.offset)
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        write_samples_csv(out, v, x, times, ys)
    finally:
        if args.out:
            out.close()
    return 0


# -- parser -----------------------------------------------------------------------


def _add_common(p: argparse.ArgumentParser, instance: bool = True, grid: bool = True) -> None:
    if instance:
        src = p.add_mutually_exclusive_group(required=True)
        src.add_argument("--gallery", choices=gallery.NAMES, help="registered instance")
        src.add_argument("--spec", help="instance-spec JSON file")
        p.add_argument("--alpha1", type=float, help="ex21 stable exponent")
        p.add_argument("--alpha2", type=float, help="ex21 unstable exponent")
        p.add_argument("--generator", help="preset name or JSON object for f")
    if grid:
        p.add_argument("--grid-t", help="min:max:count")
        p.add_argument("--grid-s", help="min:max:count")
        p.add_argument("--tol-log", type=float, help="margin tolerance in log units")
    p.add_argument("--out", help="write the JSON report here")
    p.add_argument("--json", action="store_true", help="print the JSON report to stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="skewdich", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", help="fit all six classes and run the witnesses")
    _add_common(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("criteria", help="integral criteria from ED constants")
    _add_common(p)
    p.add_argument("--force", action="store_true", help="run even if the growth/decay gates fail")
    p.set_defaults(func=cmd_criteria)

    p = sub.add_parser("falsify", help="margins along a witness sequence")
    _add_common(p, grid=False)
    p.add_argument("--class", dest="cls", required=True, choices=[c.value for c in DichotomyClass])
    p.add_argument("--witness", required=True)
    p.add_argument("--n-max", type=int, default=12)
    p.add_argument("--log-n", type=float, help="every log N constant (default: lenient corner)")
    p.add_argument("--rate", type=float, help="every decay rate")
    p.add_argument("--beta", type=float, help="every growth / gauge exponent")
    p.set_defaults(func=cmd_falsify)

    p = sub.add_parser("gallery-list", help="list registered instances")
    _add_common(p, instance=False, grid=False)
    p.set_defaults(func=cmd_gallery_list)

    p = sub.add_parser("compose-check", help="cocycle law on random triples")
    src = p.add_mutually_exclusive_group()
    src.add_argument("--gallery", choices=gallery.NAMES)
    src.add_argument("--spec")
    p.add_argument("--alpha1", type=float)
    p.add_argument("--alpha2", type=float)
    p.add_argument("--generator")
    p.add_argument("--spectral", action="store_true", help="include the spectral cocycle")
    p.add_argument("--count", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--modes", type=int, default=DEFAULT_MODES)
    p.add_argument("--out")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_compose_check)

    p = sub.add_parser("spectral-sample", help="CSV of t, y, value for the spectral cocycle")
    p.add_argument("--modes", type=int, default=DEFAULT_MODES)
    p.add_argument("--mode", type=int, default=1, help="basis vector to evolve")
    p.add_argument("--coeffs", help="comma-separated coefficients instead of --mode")
    p.add_argument("--times", default="0,0.01,0.05,0.1")
    p.add_argument("--points", type=int, default=11)
    p.add_argument("--offset", type=float, default=0.0, help="base point offset")
    p.add_argument("--generator")
    p.add_argument("--out")
    p.set_defaults(func=cmd_spectral_sample)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except IncompatibleProjectors as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PROJECTORS
    except LatticeError as exc:
        print(f"error: inconsistent classification: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
