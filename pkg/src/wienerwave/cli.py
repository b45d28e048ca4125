"""Batch command line for the experiment harnesses.

Exit codes: 0 success, 1 usage error, 2 admissibility rejection,
3 numerical non-convergence. Rational flags are parsed exactly from
"p/q" strings; outputs go to --output-dir, or to $WIENERWAVE_OUTPUT_DIR,
or to the working directory.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from .regions import ExtendedRational

__all__ = ["RunConfig", "UsageError", "AdmissibilityError", "run", "main", "OUTPUT_ENV"]

OUTPUT_ENV = "WIENERWAVE_OUTPUT_DIR"
SCHEMA_VERSION = 1


class UsageError(Exception):
    pass


class AdmissibilityError(Exception):
    pass


def _rational(text: str) -> ExtendedRational:
    try:
        return ExtendedRational(str(text))
    except (ValueError, ZeroDivisionError, TypeError) as exc:
        raise UsageError(f"not a rational: {text!r}") from exc


def _rational_list(text: str):
    return [_rational(t) for t in str(text).split(",") if t.strip()]


# parameter name -> parser; unknown keys are rejected
_SCHEMA = {
    "kernel": {"gamma": _rational, "radius": float, "time": float, "method": str, "band": float},
    "decay": {"gamma": _rational, "r": _rational, "rt": _rational, "regime": str, "estimator": str,
              "threads": int, "truncation": float},
    "regions": {"check": str, "sample": str, "n": int, "sigma": _rational, "gamma": _rational,
                "q": _rational, "qt": _rational, "r": _rational, "rt": _rational,
                "q1": _rational, "qt1": _rational, "r1": _rational, "rt1": _rational,
                "k": _rational, "denominator": int},
    "quotient": {"sigma": _rational, "q": _rational, "qt": _rational, "r": _rational, "rt": _rational,
                 "dilations": _rational_list, "width": float, "t_max": float, "dt": _rational,
                 "box_radius": float, "threads": int},
    "nlw": {"k": _rational, "q": _rational, "qt": _rational, "r": _rational, "rt": _rational,
            "amplitude": float, "velocity_amplitude": float, "C": float, "form": str, "sign": int,
            "slices": int, "length": float, "modes": int, "threads": int},
    "norms": {"input": str, "inner_p": _rational, "outer_q": _rational, "width": float,
              "amplitude": float, "estimator": str},
}


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_dir: Path | None = None

    def __post_init__(self):
        if self.command not in _SCHEMA:
            raise UsageError(f"unknown command {self.command!r}")
        schema = _SCHEMA[self.command]
        parsed = {}
        for key, raw in self.parameters.items():
            if raw is None:
                continue
            if key not in schema:
                raise UsageError(f"unknown parameter {key!r} for {self.command}")
            conv = schema[key]
            try:
                parsed[key] = raw if not isinstance(raw, str) or conv is str else conv(raw)
            except ValueError as exc:
                raise UsageError(f"bad value for {key}: {raw!r}") from exc
        self.parameters = parsed
        out = self.output_dir or os.environ.get(OUTPUT_ENV) or "."
        self.output_dir = Path(out)

    def need(self, *keys):
        missing = [k for k in keys if k not in self.parameters]
        if missing:
            raise UsageError(f"{self.command}: missing required parameter(s) {', '.join(missing)}")
        return [self.parameters[k] for k in keys]

    def get(self, key, default=None):
        return self.parameters.get(key, default)


def _emit(config: RunConfig, name: str, doc: dict) -> Path:
    config.output_dir.mkdir(parents=True, exist_ok=True)
    path = config.output_dir / name
    path.write_text(json.dumps(doc, indent=2, default=str) + "\n", encoding="utf-8")
    print(json.dumps(doc, default=str))
    return path


def _threads(config: RunConfig) -> int:
    return int(config.get("threads", os.cpu_count() or 1))


def _run_kernel(config: RunConfig) -> int:
    from .kernel import CONE_BAND, KernelQuery, kernel_closed_form_n3, kernel_eval

    gamma, radius, time = config.need("gamma", "radius", "time")
    method = config.get("method", "damped")
    if method == "closed":
        value = complex(kernel_closed_form_n3(float(gamma), radius, time))
        err, label = 0.0, "closed_form_n3"
    elif method == "damped":
        kv = kernel_eval(KernelQuery(3, float(gamma), radius, time), band=config.get("band", CONE_BAND))
        value, err, label = kv.value, kv.abs_error_estimate, kv.method.value
    else:
        raise UsageError("method must be 'damped' or 'closed'")
    _emit(config, "kernel.json", {"schema_version": SCHEMA_VERSION, "gamma": str(gamma), "radius": radius,
                                  "time": time, "re": value.real, "im": value.imag,
                                  "abs_error_estimate": err, "method": label})
    return 0


def _run_decay(config: RunConfig) -> int:
    from .decaylab import Estimator, Regime, decay_experiment, write_norm_csv, write_summary_json
    from .regions import propfix_admissible

    gamma, r, rt = config.need("gamma", "r", "rt")
    if not propfix_admissible(3, gamma, r, rt):
        raise AdmissibilityError(f"(gamma={gamma}, r={r}, r~={rt}) is outside the decay range")
    regime = config.get("regime", "both")
    regimes = {"small": [Regime.SMALL_T], "large": [Regime.LARGE_T],
               "both": [Regime.SMALL_T, Regime.LARGE_T]}.get(regime)
    estimator = config.get("estimator", "both")
    estimators = {"direct": [Estimator.DIRECT], "surrogate": [Estimator.SURROGATE],
                  "both": [Estimator.DIRECT, Estimator.SURROGATE]}.get(estimator)
    if regimes is None or estimators is None:
        raise UsageError("regime must be small|large|both and estimator direct|surrogate|both")
    kw = {}
    if "truncation" in config.parameters:
        kw["truncation"] = config.get("truncation")
    report = decay_experiment(gamma, r, rt, estimators, regimes, threads=_threads(config), **kw)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    write_norm_csv(config.output_dir / "decay.csv", report.tables)
    write_summary_json(config.output_dir / "decay_summary.json", report)
    print(json.dumps(report.summary()))
    return 0


def _tuple_from(config: RunConfig, need_sigma: bool = False):
    from .regions import ExponentTuple

    q, qt, r, rt = config.need("q", "qt", "r", "rt")
    duals = [config.get(k) for k in ("q1", "qt1", "r1", "rt1")]
    kw = {}
    if any(d is not None for d in duals):
        if any(d is None for d in duals):
            raise UsageError("dual indices q1, qt1, r1, rt1 must be given together")
        kw = dict(q1=duals[0], q1_tilde=duals[1], r1=duals[2], r1_tilde=duals[3])
    sigma = config.get("sigma")
    if need_sigma and sigma is None:
        raise UsageError("missing required parameter sigma")
    return ExponentTuple(config.get("n", 3), q, qt, r, rt, sigma=sigma, gamma=config.get("gamma"), **kw)


def _run_regions(config: RunConfig) -> int:
    from . import regions as rg

    check, sample = config.get("check"), config.get("sample")
    if (check is None) == (sample is None):
        raise UsageError("regions needs exactly one of --check or --sample")
    n = config.get("n", 3)
    if sample is not None:
        den = config.get("denominator", 40)
        config.output_dir.mkdir(parents=True, exist_ok=True)
        if sample == "region":
            (sigma,) = config.need("sigma")
            rows = rg.sample_region(n, sigma, den)
            path = rg.write_region_csv(config.output_dir / "region.csv", rows)
        elif sample == "propfix":
            (gamma,) = config.need("gamma")
            rows = [(r.reciprocal(), rt.reciprocal(), True) for r, rt in rg.sample_propfix(n, gamma, den)]
            path = rg.write_region_csv(config.output_dir / "propfix.csv", rows)
        elif sample == "kmax":
            sigmas = [ExtendedRational(f"{j}/{den}") for j in range(0, den * n // 2)]
            rows = rg.kmax_curve(n, sigmas)
            path = rg.write_region_csv(config.output_dir / "kmax.csv", rows, ("sigma", "k_max"))
        else:
            raise UsageError("sample must be region|propfix|kmax")
        print(json.dumps({"rows": len(rows), "path": str(path)}))
        return 0

    if check == "wave":
        q, r, sigma = config.need("q", "r", "sigma")
        ok = rg.is_wave_admissible(n, q, r, sigma)
    elif check == "propfix":
        gamma, r, rt = config.need("gamma", "r", "rt")
        ok = rg.propfix_admissible(n, gamma, r, rt)
    elif check == "thm1":
        ok = rg.thm1_admissible(_tuple_from(config, need_sigma=True))
    elif check == "thm2":
        t = _tuple_from(config)
        ok = rg.thm2_admissible(t, config.need("gamma")[0])
    elif check == "corollary":
        ok = rg.corollary_admissible(_tuple_from(config), config.get("sigma"))
    elif check == "nlw":
        (k,) = config.need("k")
        ok = rg.nlw_admissible(_tuple_from(config), k)
    else:
        raise UsageError("check must be wave|propfix|thm1|thm2|corollary|nlw")
    _emit(config, "regions.json", {"schema_version": SCHEMA_VERSION, "check": check, "admissible": bool(ok)})
    return 0


def _gaussian(width: float, amplitude: float = 1.0):
    from .amalgam import RadialProfile

    radii = np.linspace(0.0, 12.0 * width, 400)
    return RadialProfile.from_function(lambda s: amplitude * np.exp(-(s / width) ** 2), radii,
                                       label=f"{amplitude} exp(-(r/{width})^2)")


def _run_quotient(config: RunConfig) -> int:
    from .decaylab import strichartz_quotient
    from .regions import corollary_admissible, thm1_admissible

    t = _tuple_from(config, need_sigma=True)
    if not (thm1_admissible(t) or corollary_admissible(t, t.sigma)):
        raise AdmissibilityError(f"tuple {t.as_strings()} is outside the Strichartz range")
    dilations = config.get("dilations") or [ExtendedRational(Fraction(2) ** k) for k in range(-3, 4)]
    kw = {}
    for key in ("t_max", "box_radius"):
        if key in config.parameters:
            kw[key] = config.get(key)
    if "dt" in config.parameters:
        kw["dt"] = float(config.get("dt"))
    family = [_gaussian(config.get("width", 1.0))]
    rows = strichartz_quotient(t.sigma, t, family, [float(d) for d in dilations], **kw)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    with (config.output_dir / "quotient.csv").open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["family", "lambda", "quotient"])
        for idx, lam, qv in rows:
            w.writerow([idx, repr(lam), repr(qv)])
    values = [qv for _, _, qv in rows]
    spread = max(values) / min(values)
    _emit(config, "quotient_summary.json", {"schema_version": SCHEMA_VERSION, "tuple": t.as_strings(),
                                            "dilations": [str(d) for d in dilations], "max_over_min": spread,
                                            "pass": spread <= 1.1})
    return 0


def _run_nlw(config: RunConfig) -> int:
    from .nlw import Nonlinearity, RadialGrid, fixed_point_solve, write_manifest, write_snapshots
    from .regions import nlw_admissible

    (k,) = config.need("k")
    t = _tuple_from(config)
    if not nlw_admissible(t, k):
        raise AdmissibilityError(f"tuple {t.as_strings()} with k={k} is outside the well-posedness range")
    grid = RadialGrid(config.get("length", 32.0), config.get("modes", 4096))
    a, b = config.get("amplitude", 0.1), config.get("velocity_amplitude", 0.0)
    f = grid.sample(lambda r: a * np.exp(-r**2))
    g = grid.sample(lambda r: b * np.exp(-r**2))
    F = Nonlinearity(float(k), config.get("form", "signed_power"), config.get("sign", 1))
    result = fixed_point_solve(f, g, F, t, C=config.get("C", 1.0), slices=config.get("slices", 64))
    config.output_dir.mkdir(parents=True, exist_ok=True)
    write_manifest(config.output_dir / "nlw_manifest.json", result, t, F,
                   f"f = {a} exp(-r^2), g = {b} exp(-r^2)")
    write_snapshots(config.output_dir / "snapshots", result.solution)
    print(json.dumps({"iterations": result.iterations, "T": result.plan.T,
                      "contraction_ratios": result.contraction_ratios, "converged": result.converged}))
    return 0 if result.converged else 3


def _run_norms(config: RunConfig) -> int:
    from .amalgam import RadialProfile, amalgam_norm_radial, amalgam_surrogate_radial

    p, q = config.need("inner_p", "outer_q")
    if config.get("input"):
        data = np.loadtxt(config.get("input"), delimiter=",", skiprows=1, ndmin=2)
        profile = RadialProfile(data[:, 0], data[:, 1])
    else:
        profile = _gaussian(config.get("width", 1.0), config.get("amplitude", 1.0))
    est = config.get("estimator", "direct")
    if est == "direct":
        value = amalgam_norm_radial(profile, p, q)
    elif est == "surrogate":
        value = amalgam_surrogate_radial(profile, p, q)
    else:
        raise UsageError("estimator must be direct or surrogate")
    _emit(config, "norms.json", {"schema_version": SCHEMA_VERSION, "inner_p": str(p), "outer_q": str(q),
                                 "estimator": est, "profile": profile.label or config.get("input"),
                                 "norm": value})
    return 0


_DISPATCH = {"kernel": _run_kernel, "decay": _run_decay, "regions": _run_regions,
             "quotient": _run_quotient, "nlw": _run_nlw, "norms": _run_norms}


def run(config: RunConfig) -> int:
    """Dispatch one command; exceptions are mapped to exit codes with a message on stderr."""
    from .decaylab import CoverageError, SpotCheckError
    from .kernel import ConeBandError, ConvergenceError
    from .nlw import AliasingError, ContractionError

    try:
        return _DISPATCH[config.command](config)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except (AdmissibilityError, ConeBandError) as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, ContractionError, AliasingError, SpotCheckError, CoverageError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wienerwave", description=__doc__.splitlines()[0])
    parser.add_argument("--output-dir", default=None, help=f"output directory (default ${OUTPUT_ENV} or .)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    required = {
        "kernel": ("gamma", "radius", "time"),
        "decay": ("gamma", "r", "rt"),
        "quotient": ("sigma", "q", "qt", "r", "rt"),
        "nlw": ("k", "q", "qt", "r", "rt"),
        "norms": ("inner_p", "outer_q"),
    }
    for name, schema in _SCHEMA.items():
        p = sub.add_parser(name)
        p.add_argument("--output-dir", default=argparse.SUPPRESS)
        for key in schema:
            flag = "--" + key.replace("_", "-")
            p.add_argument(flag, dest=key, default=None, required=key in required.get(name, ()))
    return parser


def main(argv=None) -> int:
    try:
        ns = _build_parser().parse_args(argv)
        params = {k: v for k, v in vars(ns).items() if k not in ("command", "output_dir")}
        config = RunConfig(ns.command, params, ns.output_dir)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
