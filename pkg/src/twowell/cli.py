"""Command-line interface: ``twowell <verb> [flags]``.

Exit codes: 0 success, 2 invalid parameters, 3 non-equilibrium point,
4 I/O failure, 1 any other numerical failure.
"""
from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import __version__
from .boundary import classify, divergence_lambda, mu_divergence, triple_point
from .eigensolve import eigh_tridiagonal, ground_gap
from .errors import DivergentParameters, InvalidParameters, NoBoundary, TwoWellError
from .meanfield import minimize_energy
from .model import ModelParams, build_tridiagonal
from .saddle import expansion_coefficients, landscape, xi_quadrature
from .scan import PathKind, SweepSpec, emit, fit_exponent, read_rows, run_sweep
from .thermo import DEFAULT_CAP, BathParams, dominant_mode, thermal_observables

EXIT_OK, EXIT_FAIL, EXIT_INVALID, EXIT_DIVERGENT, EXIT_IO = 0, 1, 2, 3, 4

# flags that do not change what a sweep computes stay out of the file header
_UNRECORDED = {"out", "jobs", "func", "verb"}


def _print_json(obj) -> None:
    def clean(v):
        if isinstance(v, float) and not math.isfinite(v):
            return None
        if isinstance(v, (list, tuple)):
            return [clean(x) for x in v]
        if isinstance(v, dict):
            return {k: clean(x) for k, x in v.items()}
        if isinstance(v, np.generic):
            return v.item()
        return v
    print(json.dumps(clean(obj), indent=2))


def cmd_spectrum(args) -> int:
    params = ModelParams(args.gamma, args.lam)
    spec = eigh_tridiagonal(build_tridiagonal(params, args.M), want_vectors=False)
    levels = spec.eigenvalues[: args.levels]
    _print_json({"M": args.M, "gamma": args.gamma, "lambda": args.lam,
                 "levels": levels.tolist(), "gap": ground_gap(spec),
                 "ground_energy_per_particle": float(spec.eigenvalues[0]) / args.M})
    return EXIT_OK


def cmd_meanfield(args) -> int:
    sol = minimize_energy(ModelParams(args.gamma, args.lam))
    _print_json({"phase": sol.phase.value, "lambda_c": sol.lambda_c,
                 "minima": [[m.theta, m.phi] for m in sol.minima],
                 "phi_star": sol.phi_star, "energy_per_particle": sol.energy_per_particle})
    return EXIT_OK


def cmd_thermo(args) -> int:
    params = ModelParams(args.gamma, args.lam)
    obs = thermal_observables(params, BathParams(args.beta, args.mu), tol=args.tol,
                              m_cap=args.m_cap)
    mode = dominant_mode(obs)
    _print_json({"log_xi": obs.log_xi, "m_ax": obs.m_ax, "m_mean": obs.m_mean,
                 "energy": obs.energy, "interaction": obs.interaction,
                 "current": obs.current, "hop": obs.hop, "imbalance": obs.imbalance,
                 "phi_max": mode.phi_max, "n": mode.n, "n_perp": mode.n_perp,
                 "degenerate": mode.degenerate})
    return EXIT_OK


def cmd_boundary(args) -> int:
    out = {"gamma": args.gamma, "triple_point": list(triple_point(args.gamma))}
    if args.lam is not None:
        out["mu_divergence"] = mu_divergence(args.lam, args.gamma)
        if args.mu is not None:
            region = classify(args.lam, args.mu, args.gamma)
            out["case"] = region.label.value
            out["f_star"] = region.f_star
    if args.mu_d is not None:
        bp = divergence_lambda(args.mu_d, args.gamma)
        out["divergence_point"] = {"mu_d": bp.mu_d, "lambda_d": bp.lambda_d,
                                   "kappa": bp.kappa, "alpha": bp.alpha,
                                   "case": bp.case_label.value,
                                   "triple": bp.is_triple_point}
    _print_json(out)
    return EXIT_OK


def cmd_saddle(args) -> int:
    params = ModelParams(args.gamma, args.lam)
    land = landscape(params, args.mu)
    coef = expansion_coefficients(params, args.mu)
    out = {"f_star": land.f_star, "maxima": [list(m) for m in land.maxima],
           "alpha_x_sq": coef.alpha_x_sq, "alpha_y_sq": coef.alpha_y_sq,
           "gamma_y_sq": coef.gamma_y_sq, "subcase": coef.subcase.value}
    out["log_xi_quad"] = xi_quadrature(params, BathParams(args.beta, args.mu))
    _print_json(out)
    return EXIT_OK


def _header(args) -> str:
    flags = " ".join(f"--{k.replace('_', '-')}={v}" for k, v in sorted(vars(args).items())
                     if k not in _UNRECORDED)
    return f"twowell {__version__} {args.verb} {flags}"


def cmd_scan(args) -> int:
    spec = SweepSpec(gamma=args.gamma, beta=args.beta, path=PathKind(args.path),
                     mu_d=args.mu_d, start=args.start, end=args.end, points=args.points,
                     log_spacing=not args.linear, angle=args.angle, tol=args.tol,
                     m_cap=args.m_cap)
    rows = run_sweep(spec, jobs=args.jobs)
    emit(rows, args.format, args.out if args.out != "-" else sys.stdout,
         comment=_header(args) if args.format == "csv" else None)
    return EXIT_OK


def cmd_fit(args) -> int:
    rows = read_rows(args.input)
    fit = fit_exponent(rows, args.field, args.distance)
    _print_json({"field": args.field, "slope": fit.slope, "intercept": fit.intercept,
                 "r_squared": fit.r_squared, "rows": len(rows)})
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="twowell",
                                     description="Two-well boson model: spectra, "
                                                 "grand-canonical thermodynamics and sweeps.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="verb", required=True)

    def model_flags(p, need_lambda=True):
        p.add_argument("--gamma", type=float, default=1.0)
        p.add_argument("--lambda", dest="lam", type=float,
                       required=need_lambda, default=None)

    p = sub.add_parser("spectrum", help="lowest levels of one sector")
    model_flags(p)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--levels", type=int, default=10)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("meanfield", help="collective-mode minima")
    model_flags(p)
    p.set_defaults(func=cmd_meanfield)

    p = sub.add_parser("thermo", help="grand-canonical observables at one point")
    model_flags(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--m-cap", type=int, default=DEFAULT_CAP)
    p.set_defaults(func=cmd_thermo)

    p = sub.add_parser("boundary", help="equilibrium region and divergence curve")
    model_flags(p, need_lambda=False)
    p.add_argument("--mu", type=float, default=None)
    p.add_argument("--mu-d", type=float, default=None)
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("saddle", help="saddle landscape and quadrature estimate of Xi")
    model_flags(p)
    p.add_argument("--mu", type=float, required=True)
    p.add_argument("--beta", type=float, default=1.0)
    p.set_defaults(func=cmd_saddle)

    p = sub.add_parser("scan", help="sweep toward the divergence curve")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--path", choices=[k.value for k in PathKind], default="fixed-lambda")
    p.add_argument("--mu-d", type=float, default=-2.0)
    p.add_argument("--angle", type=float, default=5.0 * math.pi / 4.0)
    p.add_argument("--start", type=float, default=1e-1)
    p.add_argument("--end", type=float, default=1e-2)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--linear", action="store_true", help="linear instead of log spacing")
    p.add_argument("--tol", type=float, default=1e-7)
    p.add_argument("--m-cap", type=int, default=DEFAULT_CAP)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", default="-")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fit", help="power-law exponent of a sweep column")
    p.add_argument("--input", required=True)
    p.add_argument("--field", default="n_perp")
    p.add_argument("--distance", default="distance")
    p.set_defaults(func=cmd_fit)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (DivergentParameters, NoBoundary) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except InvalidParameters as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except TwoWellError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
