"""Command-line front end.

Subcommands: kernel (evaluate H_t or a derivative on a grid), upsilon
(evaluate the majorant), area / gfun (apply the square functions to a
coefficient-specified expansion), verify <suite|all>, and sweep (run a
verifier over a parameter list).  Verification reports append to a JSON-lines
file; grid evaluations go to CSV with header theta,phi,t,value.

Exit codes: 0 success, 1 configuration error, 2 when any verify suite reports
verdict=violated, 3 on numerical failure.
"""

import argparse
import csv
import dataclasses
import json
import math
import sys
import time
from dataclasses import dataclass

import numpy as np

from . import __version__
from .area_integrals import ConeGrid, area_integral, g_function
from .cz_verifier import (GammaChoice, LEMMA_SUITES, VerificationReport,
                          check_growth, check_lemma, check_smoothness_phi,
                          check_smoothness_theta, l2_operator_check)
from .jacobi_core import JacobiParams
from .poisson_kernel import DerivativeSpec, NonConvergenceError, kernel_derivative
from .upsilon_estimates import UpsilonSpec, upsilon

STD_SUITES = ("gr", "sm1", "sm2")
ALL_MN_PAIRS = ((1, 0), (0, 1), (1, 1), (0, 2), (2, 1))


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Validated per-command parameter bundle."""

    params: JacobiParams
    d: DerivativeSpec | None = None
    gamma: float | None = None
    seed: int = 0
    out: str | None = None
    extras: dict = dataclasses.field(default_factory=dict)


def _parse_values(text: str) -> np.ndarray:
    """Grid syntax: 'v', 'v1,v2,...', or 'start:stop:count'."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ConfigError(f"range syntax is start:stop:count, got {text!r}")
        lo, hi, cnt = float(parts[0]), float(parts[1]), int(parts[2])
        return np.linspace(lo, hi, cnt)
    return np.array([float(v) for v in text.split(",")])


def _build_params(args) -> JacobiParams:
    try:
        return JacobiParams(args.alpha, args.beta)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _build_spec(args, need_positive=False) -> DerivativeSpec:
    d = DerivativeSpec(args.M, args.N, "D" if args.flavor == "D" else "delta")
    if need_positive and d.M + d.N <= 0:
        raise ConfigError("the area integral requires M + N > 0")
    return d


def emit_report(report: VerificationReport, path: str, runtime_ms: int = 0):
    """Append one fixed-schema JSON line per suite."""
    record = {
        "suite": report.suite,
        "alpha": report.alpha,
        "beta": report.beta,
        "M": report.M,
        "N": report.N,
        "flavor": report.flavor,
        "gamma": report.gamma,
        "measuredC": report.measuredC,
        "refinementDelta": report.refinementDelta,
        "samples": report.samples,
        "verdict": report.verdict,
        "seed": report.seed,
        "runtimeMs": runtime_ms,
        "version": __version__,
    }
    try:
        with open(path, "a") as fh:
            fh.write(json.dumps(record) + "\n")
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc


def _emit_grid(rows, path: str | None):
    header = ("theta", "phi", "t", "value")
    if path is None:
        writer = csv.writer(sys.stdout)
        writer.writerow(header)
        writer.writerows(rows)
        return
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
    except OSError as exc:
        raise OSError(f"cannot write grid to {path}: {exc}") from exc


def _fmt(x: float) -> str:
    return repr(float(x))


# ---------------------------------------------------------------------------
# subcommands


def _cmd_kernel(args) -> int:
    p = _build_params(args)
    d = _build_spec(args)
    rows = []
    for t in _parse_values(args.t):
        for th in _parse_values(args.theta):
            for ph in _parse_values(args.phi):
                kv = kernel_derivative(d, t, th, ph, p, min_t=args.min_t)
                rows.append((_fmt(th), _fmt(ph), _fmt(t), _fmt(kv.value)))
    _emit_grid(rows, args.out)
    return 0


def _cmd_upsilon(args) -> int:
    p = _build_params(args)
    spec = UpsilonSpec(args.W, args.s, p)
    rows = []
    for t in _parse_values(args.t):
        for th in _parse_values(args.theta):
            for ph in _parse_values(args.phi):
                val = upsilon(spec, t, th, ph, args.npts)
                rows.append((_fmt(th), _fmt(ph), _fmt(t), _fmt(val)))
    _emit_grid(rows, args.out)
    return 0


def _coeffs(args) -> np.ndarray:
    try:
        c = np.array([float(v) for v in args.coeffs.split(",")])
    except ValueError:
        raise ConfigError(f"bad coefficient list {args.coeffs!r}") from None
    if c.size == 0:
        raise ConfigError("need at least one coefficient")
    return c


def _cmd_area(args) -> int:
    p = _build_params(args)
    d = _build_spec(args, need_positive=True)
    cg = ConeGrid(t_min=args.t_min, T_max=args.t_max,
                  n_levels=args.cone_levels, eta_per_level=args.eta_nodes)
    coeffs = _coeffs(args)
    rows = []
    for th in _parse_values(args.theta):
        val = area_integral(coeffs, d, th, p, cg)
        rows.append((_fmt(th), "", "", _fmt(val)))
    _emit_grid(rows, args.out)
    return 0


def _cmd_gfun(args) -> int:
    p = _build_params(args)
    d = _build_spec(args, need_positive=True)
    coeffs = _coeffs(args)
    rows = []
    for th in _parse_values(args.theta):
        val = g_function(coeffs, d, th, p)
        rows.append((_fmt(th), "", "", _fmt(val)))
    _emit_grid(rows, args.out)
    return 0


def _iter_verify_jobs(args):
    """(callable, label) pairs for the requested suite(s)."""
    p = _build_params(args)
    scale = args.scale
    nsps = max(2, int(round(4 * scale)))
    nsam = max(40, int(round(args.samples * scale)))
    cone = ConeGrid(t_min=1e-3, T_max=math.pi,
                    n_levels=max(12, int(round(args.cone_levels * scale))),
                    eta_per_level=max(6, int(round(args.eta_nodes * scale))))

    def std_jobs(which):
        for M, N in ALL_MN_PAIRS:
            d0 = DerivativeSpec(M, N)
            if which == "gr":
                yield (lambda d=d0: check_growth(
                    d, p, seed=args.seed, n_per_stratum=nsps, cone=cone,
                    include_extreme_diag=not args.quick))
            else:
                for flavor in ("delta", "D"):
                    d1 = DerivativeSpec(M, N, flavor)
                    if which == "sm1":
                        g = GammaChoice(min(0.5, min(p.alpha, p.beta) + 1) * 0.9)
                        yield (lambda d=d1, g=g: check_smoothness_theta(
                            d, p, g, seed=args.seed, n_per_stratum=nsps, cone=cone))
                    else:
                        yield (lambda d=d1: check_smoothness_phi(
                            d, p, seed=args.seed, n_per_stratum=nsps, cone=cone))

    def lemma_job(name):
        d = DerivativeSpec(args.M, args.N, args.flavor)
        if d.M + d.N == 0:
            d = DerivativeSpec(1, 0)
        kwargs = dict(d=d, seed=args.seed, n_samples=nsam,
                      npts=max(12, int(round(40 * scale))),
                      quad_n=64, grid_n=max(6, int(round(12 * scale))),
                      n_panels=max(20, int(round(60 * scale))))
        if args.gamma is not None:
            kwargs["gamma"] = args.gamma
        return lambda: check_lemma(name, p, **kwargs)

    requested = args.which
    if requested == "all":
        for name in LEMMA_SUITES:
            yield lemma_job(name)
        for which in STD_SUITES:
            yield from std_jobs(which)
    elif requested in LEMMA_SUITES:
        yield lemma_job(requested)
    elif requested in STD_SUITES:
        yield from std_jobs(requested)
    elif requested == "l2":
        for flavor in ("delta", "D"):
            d = DerivativeSpec(max(args.M, 1) if args.M + args.N == 0 else args.M,
                               args.N, flavor)
            yield (lambda d=d: l2_operator_check(
                d, p, nmodes=12, trials=max(10, int(round(30 * scale))),
                seed=args.seed, cone=cone, n_theta=24))
    else:
        raise ConfigError(
            f"unknown suite {requested!r}; choose one of "
            f"{LEMMA_SUITES + STD_SUITES + ('l2', 'all')}")


def _cmd_verify(args) -> int:
    worst = 0
    for job in _iter_verify_jobs(args):
        t0 = time.perf_counter()
        report = job()
        ms = int((time.perf_counter() - t0) * 1000)
        line = (f"{report.suite:18s} alpha={report.alpha:+.3f} beta={report.beta:+.3f} "
                f"M={report.M} N={report.N} flavor={report.flavor} "
                f"C={report.measuredC:.6g} delta={report.refinementDelta:.3g} "
                f"verdict={report.verdict}")
        print(line)
        if args.out:
            emit_report(report, args.out, runtime_ms=ms)
        if report.verdict == "violated":
            worst = 2
    return worst


def _cmd_sweep(args) -> int:
    worst = 0
    alphas = _parse_values(args.alpha_list)
    betas = _parse_values(args.beta_list)
    for alpha in alphas:
        for beta in betas:
            sub = argparse.Namespace(**vars(args))
            sub.alpha, sub.beta = float(alpha), float(beta)
            code = _cmd_verify(sub)
            worst = max(worst, code)
    return worst


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="jacobi-lusin",
        description="Jacobi-Poisson kernels, mixed Lusin area integrals, and "
                    "numerical verification of their kernel estimates.")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(sp, spec=True):
        sp.add_argument("--alpha", type=float, required=True)
        sp.add_argument("--beta", type=float, required=True)
        if spec:
            sp.add_argument("--M", type=int, default=0)
            sp.add_argument("--N", type=int, default=0)
            sp.add_argument("--flavor", choices=("delta", "D"), default="delta")

    sp = sub.add_parser("kernel", help="evaluate H_t or a mixed derivative")
    common(sp)
    sp.add_argument("--t", required=True, help="value, list, or start:stop:count")
    sp.add_argument("--theta", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--min-t", type=float, default=1e-4,
                    help="small-time floor for the spectral series")
    sp.add_argument("--out", default=None, help="CSV path (default stdout)")
    sp.set_defaults(fn=_cmd_kernel)

    sp = sub.add_parser("upsilon", help="evaluate the majorant")
    common(sp, spec=False)
    sp.add_argument("--W", type=float, required=True)
    sp.add_argument("--s", type=float, default=0.0)
    sp.add_argument("--t", required=True)
    sp.add_argument("--theta", required=True)
    sp.add_argument("--phi", required=True)
    sp.add_argument("--npts", type=int, default=60)
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_upsilon)

    for name, fn in (("area", _cmd_area), ("gfun", _cmd_gfun)):
        sp = sub.add_parser(name, help=f"apply the {name} square function")
        common(sp)
        sp.add_argument("--coeffs", required=True,
                        help="comma-separated expansion coefficients")
        sp.add_argument("--theta", required=True)
        if name == "area":
            sp.add_argument("--t-min", type=float, default=1e-3)
            sp.add_argument("--t-max", type=float, default=math.pi)
            sp.add_argument("--cone-levels", type=int, default=64)
            sp.add_argument("--eta-nodes", type=int, default=32)
        sp.add_argument("--out", default=None)
        sp.set_defaults(fn=fn)

    sp = sub.add_parser("verify", help="run verification suites")
    sp.add_argument("which", help="suite name or 'all'")
    common(sp)
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--cone-levels", type=int, default=28)
    sp.add_argument("--eta-nodes", type=int, default=12)
    sp.add_argument("--scale", type=float, default=1.0,
                    help="multiply every grid dimension (e.g. 0.5 for quick)")
    sp.add_argument("--quick", action="store_true",
                    help="skip the most expensive near-diagonal sample")
    sp.add_argument("--out", default=None, help="JSON-lines report path")
    sp.set_defaults(fn=_cmd_verify)

    sp = sub.add_parser("sweep", help="run a verifier over parameter lists")
    sp.add_argument("which", help="suite name or 'all'")
    sp.add_argument("--alpha-list", dest="alpha_list", required=True)
    sp.add_argument("--beta-list", dest="beta_list", required=True)
    sp.add_argument("--M", type=int, default=1)
    sp.add_argument("--N", type=int, default=0)
    sp.add_argument("--flavor", choices=("delta", "D"), default="delta")
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--samples", type=int, default=200)
    sp.add_argument("--cone-levels", type=int, default=28)
    sp.add_argument("--eta-nodes", type=int, default=12)
    sp.add_argument("--scale", type=float, default=1.0)
    sp.add_argument("--quick", action="store_true")
    sp.add_argument("--out", default=None)
    sp.set_defaults(fn=_cmd_sweep)

    return ap


def run(argv=None) -> int:
    """Entry point returning the process exit code."""
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return 1 if exc.code not in (0, None) else 0
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except (NonConvergenceError, FloatingPointError, ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
