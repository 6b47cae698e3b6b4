"""Command-line interface.

Four subcommands: ``simulate`` writes sample paths as CSV, ``surface``
tabulates the conditional-moment surface over an (x, h) grid, ``asymptotics``
reports the explosive-regime limits as JSON, and ``validate`` runs one of
the built-in self-check suites.

Exit codes: 0 success, 1 validation failure, 2 usage error, 3 numerical
failure.  All numeric output is serialized with 17 significant digits so a
run is reproducible byte for byte; JSON keys are emitted in alphabetical
order and CSV rows are sorted by (x, h) no matter how the worker pool
schedules them.  The environment variable STABLE_ANTICIPATE_THREADS
overrides the worker count.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .errors import (DivergenceError, DomainError, InsufficientDataError,
                     MomentExistenceError, NumericalError, ParameterError,
                     StableAnticipateError, UnsupportedError)
from .models import (AR1, AR2, AggComponent, Aggregated, OU, PathConfig,
                     Regime)
from .moments import (asymptotic_moments, bernoulli_summary, cond_summary,
                      kurtosis_min_horizon)
from .simulate import simulate_agg, simulate_ar1, simulate_ar2, simulate_ou
from .validation import SUITE_NAMES, run_suite

_USAGE_ERRORS = (ParameterError, DomainError, UnsupportedError,
                 MomentExistenceError)
_NUMERICAL_ERRORS = (NumericalError, DivergenceError, InsufficientDataError)


def _fmt(value) -> str:
    return format(float(value), ".17g")


def _to_json(obj, indent=0) -> str:
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _fmt(obj) if math.isfinite(obj) else "null"
    pad, inner = "  " * indent, "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        body = ",\n".join(f"{inner}{json.dumps(str(k))}: {_to_json(v, indent + 1)}"
                          for k, v in sorted(obj.items()))
        return "{\n" + body + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        body = ",\n".join(f"{inner}{_to_json(v, indent + 1)}" for v in obj)
        return "[\n" + body + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _n_workers() -> int:
    env = os.environ.get("STABLE_ANTICIPATE_THREADS", "")
    if env.strip():
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _write_text(text: str, out_path):
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# flag plumbing: every option defaults to None so a --config file can fill
# the gaps, with explicit command-line values always winning


def _read_config(path, parser):
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.split("#", 1)[0].strip()
                if not line:
                    continue
                if "=" not in line:
                    parser.error(f"{path}:{lineno}: expected key=value")
                key, value = line.split("=", 1)
                values[key.strip().replace("-", "_")] = value.strip()
    except OSError as exc:
        parser.error(f"cannot read config file: {exc}")
    return values


def _merge_config(args, parser, converters):
    if args.config is None:
        return
    file_values = _read_config(args.config, parser)
    for dest, value in file_values.items():
        if dest not in converters:
            parser.error(f"unknown config key {dest!r}")
        if getattr(args, dest, None) is not None:
            continue  # command line wins
        try:
            setattr(args, dest, converters[dest](value))
        except ValueError:
            parser.error(f"config key {dest!r}: cannot parse {value!r}")


def _require(args, parser, names):
    for name in names:
        if getattr(args, name) is None:
            flag = "--" + name.replace("_", "-")
            parser.error(f"{flag} is required for --model {args.model}")


def _parse_component(text: str) -> AggComponent:
    parts = text.split(",")
    if len(parts) != 4:
        raise ValueError("expected pi,rho,beta,sigma")
    pi, rho, beta, sigma = (float(p) for p in parts)
    return AggComponent(pi, rho, beta, sigma)


_MODEL_CONVERTERS = {
    "model": str, "out": str,
    "alpha": float, "beta": float, "sigma": float, "rho": float,
    "lam": float, "psi1": float, "psi2": float, "c": float,
    "component": lambda text: [_parse_component(t) for t in text.split()],
}


def _add_model_flags(sub):
    sub.add_argument("--model", choices=("ar1", "ou", "agg", "ar2"))
    sub.add_argument("--alpha", type=float)
    sub.add_argument("--beta", type=float)
    sub.add_argument("--sigma", type=float)
    sub.add_argument("--rho", type=float)
    sub.add_argument("--lam", type=float)
    sub.add_argument("--psi1", type=float)
    sub.add_argument("--psi2", type=float)
    sub.add_argument("--c", type=float)
    sub.add_argument("--component", action="append", type=_parse_component,
                     metavar="PI,RHO,BETA,SIGMA")
    sub.add_argument("--config", metavar="PATH")
    sub.add_argument("--out", metavar="PATH")


def _build_model(args, parser):
    if args.model is None:
        parser.error("--model is required")
    if args.model == "ar1":
        _require(args, parser, ("alpha", "beta", "sigma", "rho"))
        return AR1(args.alpha, args.beta, args.sigma, args.rho)
    if args.model == "ou":
        _require(args, parser, ("alpha", "beta", "lam"))
        return OU(args.alpha, args.beta, args.lam)
    if args.model == "agg":
        _require(args, parser, ("alpha", "c"))
        if not args.component:
            parser.error("--component is required for --model agg")
        return Aggregated(args.alpha, args.c, tuple(args.component))
    _require(args, parser, ("alpha", "beta", "sigma", "psi1", "psi2"))
    return AR2(args.alpha, args.beta, args.sigma, args.psi1, args.psi2)


# ---------------------------------------------------------------------------
# simulate


_SIMULATORS = {"ar1": simulate_ar1, "ou": simulate_ou,
               "agg": simulate_agg, "ar2": simulate_ar2}


def cmd_simulate(args, parser) -> int:
    model = _build_model(args, parser)
    if args.n is None or args.n < 1:
        parser.error("--n must be a positive integer")
    cfg = PathConfig(args.n, seed=args.seed, dt=args.dt)
    path = _SIMULATORS[args.model](model, cfg)
    step = args.dt if args.model == "ou" else 1
    lines = ["t,x"]
    for i, value in enumerate(path):
        t = i * step
        t_text = str(i) if args.model != "ou" else _fmt(t)
        lines.append(f"{t_text},{_fmt(value)}")
    _write_text("\n".join(lines) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# surface


def _surface_row(x, h, model, tol, h_text):
    mean, var, skew, kurt = cond_summary(x, model, h, tol=tol)
    fields = [_fmt(x), h_text]
    regimes = set()
    for res in (mean, var, skew, kurt):
        if res.value is None:
            fields += ["", ""]
        else:
            fields += [_fmt(res.value), _fmt(res.err)]
            regimes.add(res.regime)
    if not regimes:
        regime = Regime.UNDEFINED.value
    elif Regime.ASYMPTOTIC in regimes:
        regime = Regime.ASYMPTOTIC.value
    else:
        regime = Regime.EXACT.value
    fields.append(regime)
    return ",".join(fields)


def cmd_surface(args, parser) -> int:
    model = _build_model(args, parser)
    for name in ("x_min", "x_max"):
        if getattr(args, name) is None:
            parser.error(f"--{name.replace('_', '-')} is required")
    if args.x_max <= args.x_min:
        parser.error("--x-max must exceed --x-min")
    xs = np.linspace(args.x_min, args.x_max, args.x_count)
    if args.model == "ou":
        hs = np.linspace(args.h_min, args.h_max, args.h_count)
        h_texts = [_fmt(h) for h in hs]
    else:
        hs = list(range(int(args.h_min), int(args.h_max) + 1))
        h_texts = [str(h) for h in hs]
    jobs = [(float(x), h, h_texts[j]) for x in xs for j, h in enumerate(hs)]
    with ThreadPoolExecutor(max_workers=_n_workers()) as pool:
        futures = [pool.submit(_surface_row, x, h, model, args.tol, h_text)
                   for x, h, h_text in jobs]
        rows = [f.result() for f in futures]
    header = ("x,h,mean,mean_err,var,var_err,skew,skew_err,"
              "kurt_ex,kurt_err,regime")
    _write_text("\n".join([header] + rows) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# asymptotics


def cmd_asymptotics(args, parser) -> int:
    model = _build_model(args, parser)
    if args.h is None:
        parser.error("--h is required")
    h = args.h if args.model == "ou" else int(args.h)
    try:
        survival, growth = bernoulli_summary(model, h, args.x)
        limits = asymptotic_moments(model, h, +1)
        h0 = kurtosis_min_horizon(model)
    except _USAGE_ERRORS as exc:
        payload = {"code": "asymptotics-unsupported", "message": str(exc)}
        _write_text(_to_json(payload) + "\n", args.out)
        return 2
    payload = {
        "explosion_level": growth,
        "gamma1_limit": limits[2].value,
        "gamma2_limit": limits[3].value,
        "h0": h0,
        "survival_prob": survival,
    }
    _write_text(_to_json(payload) + "\n", args.out)
    return 0


# ---------------------------------------------------------------------------
# validate


def cmd_validate(args, parser) -> int:
    checks = run_suite(args.suite, n_paths=args.n_paths, seed=args.seed)
    passed = all(c["passed"] for c in checks)
    report = {"checks": checks, "passed": passed, "suite": args.suite}
    _write_text(_to_json(report) + "\n", args.out)
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# entry point


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="stable-anticipate",
        description="Conditional moments and simulation of anticipative "
                    "stable processes.")
    subs = parser.add_subparsers(dest="command", required=True)

    sim = subs.add_parser("simulate", help="write a sample path as CSV")
    _add_model_flags(sim)
    sim.add_argument("--n", type=int)
    sim.add_argument("--seed", type=int)
    sim.add_argument("--dt", type=float)

    surf = subs.add_parser("surface", help="tabulate conditional moments "
                                           "over an (x, h) grid as CSV")
    _add_model_flags(surf)
    surf.add_argument("--x-min", type=float)
    surf.add_argument("--x-max", type=float)
    surf.add_argument("--x-count", type=int)
    surf.add_argument("--h-min", type=float)
    surf.add_argument("--h-max", type=float)
    surf.add_argument("--h-count", type=int)
    surf.add_argument("--tol", type=float)

    asym = subs.add_parser("asymptotics", help="explosive-regime limits "
                                               "as JSON")
    _add_model_flags(asym)
    asym.add_argument("--h", type=float)
    asym.add_argument("--x", type=float)

    val = subs.add_parser("validate", help="run a self-check suite")
    val.add_argument("--suite", choices=SUITE_NAMES, required=True)
    val.add_argument("--n-paths", type=int)
    val.add_argument("--seed", type=int)
    val.add_argument("--config", metavar="PATH")
    val.add_argument("--out", metavar="PATH")
    return parser


_DEFAULTS = {
    "simulate": {"seed": 0, "dt": 1.0},
    "surface": {"x_count": 101, "h_min": 1.0, "h_max": 30.0, "h_count": 30,
                "tol": 1e-10},
    "asymptotics": {"x": 1.0},
    "validate": {},
}

_CONVERTERS = {
    "simulate": {**_MODEL_CONVERTERS, "n": int, "seed": int, "dt": float},
    "surface": {**_MODEL_CONVERTERS, "x_min": float, "x_max": float,
                "x_count": int, "h_min": float, "h_max": float,
                "h_count": int, "tol": float},
    "asymptotics": {**_MODEL_CONVERTERS, "h": float, "x": float},
    "validate": {"suite": str, "n_paths": int, "seed": int},
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _merge_config(args, parser, _CONVERTERS[args.command])
    for dest, value in _DEFAULTS[args.command].items():
        if getattr(args, dest, None) is None:
            setattr(args, dest, value)
    commands = {"simulate": cmd_simulate, "surface": cmd_surface,
                "asymptotics": cmd_asymptotics, "validate": cmd_validate}
    try:
        return commands[args.command](args, parser)
    except _USAGE_ERRORS as exc:
        parser.error(str(exc))
    except _NUMERICAL_ERRORS as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
