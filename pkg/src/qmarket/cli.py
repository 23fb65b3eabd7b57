"""Command-line entry point: ``qmarket <command> [options]``.

Exit codes: 0 success, 1 usage error, 2 oracle check failed, 3 degenerate
input (zero amplitude, degenerate slice, unsamplable opponent).
"""

from __future__ import annotations

import argparse
import cmath
import math
import os
import sys
import warnings

import numpy as np

from . import export
from .curves import conditional_demand, demand_curve, detect_giffen, integrated_anomaly_check
from .errors import (
    DegenerateSliceError,
    InvalidParameterError,
    OutOfDomainError,
    QMarketError,
    SignIndefiniteError,
    ZeroAmplitudeError,
)
from .figures import FIGURES, FigureJob, figure_oracle, run_figure
from .game import AdmissibilityRule, OpponentModel, fixed_point_iterate, simulate_repeated_game
from .risk import RiskParams, minimal_risk, risk_expectation, risk_expectation_quadrature
from .spectral import dft_supply, supply_amplitude, supply_density, supply_density_quadrature, to_supply
from .strategy import (
    GaussianComponent,
    GridSpec,
    Strategy,
    amplitude_q,
    density_q,
    moments,
    norm_squared,
    norm_squared_quadrature,
    sample,
    upper_tail,
)
from .tactics import apply, from_z
from .wigner import slice_at_p, wigner_field, wigner_point_quadrature, wigner_values

EXIT_OK, EXIT_USAGE, EXIT_ORACLE, EXIT_DEGENERATE = 0, 1, 2, 3
ORACLE_THRESHOLD = 1e-6
HBAR_ENV = "QMARKET_HBAR_E"

# Options whose values may legitimately start with '-' (e.g. "--grid -6:9:1024").
_VALUE_OPTS = {"--grid", "--pgrid", "--qgrid", "--z", "--z2", "--slice-z"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_complex(text: str) -> complex:
    """Parse ``"x"``, ``"re,im"``, polar ``"mod@arg"`` or ``"inf"``."""
    t = text.strip().lower()
    try:
        if t in ("inf", "infinity", "+inf", "-inf"):
            return complex(math.inf, 0.0)
        if "@" in t:
            mod, arg = t.split("@")
            return cmath.rect(float(mod), float(arg))
        if "," in t:
            re, im = t.split(",")
            return complex(float(re), float(im))
        return complex(t.replace("i", "j")) if ("i" in t or "j" in t) else complex(float(t))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"cannot parse {text!r}; use x, re,im, mod@arg or inf"
        ) from None


def _grid(text: str) -> GridSpec:
    try:
        return GridSpec.parse(text)
    except InvalidParameterError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _default_hbar() -> float:
    raw = os.environ.get(HBAR_ENV)
    if raw is None:
        return 1.0
    try:
        v = float(raw)
    except ValueError:
        raise UsageError(f"{HBAR_ENV}={raw!r} is not a number") from None
    if not v > 0:
        raise UsageError(f"{HBAR_ENV} must be positive, got {raw}")
    return v


def _add_output(p):
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    p.add_argument("--oracle", action="store_true", help="run the independent cross-check")


def _add_strategy(p, delta=0.0, z="0"):
    p.add_argument("--delta", type=float, default=delta, help="tactic shift in log-price")
    p.add_argument("--z", type=parse_complex, default=parse_complex(z), help="x | re,im | mod@arg | inf")
    p.add_argument("--width", type=_positive, default=1.0, help="width of the base Gaussian")
    p.add_argument("--hbar-e", type=_positive, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qmarket", description="Quantum market game computations.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("figure", help="emit the data behind a figure")
    p.add_argument("figure_id", choices=sorted(FIGURES))
    p.add_argument("--delta", type=float)
    p.add_argument("--z", type=parse_complex)
    p.add_argument("--z2", type=parse_complex, help="dashed-series z for supply figures")
    p.add_argument("--grid", type=_grid)
    p.add_argument("--pgrid", type=_grid)
    p.add_argument("--qgrid", type=_grid)
    p.add_argument("--p", type=float, help="slice momentum for conditional-demand figures")
    p.add_argument("--hbar-e", type=_positive, default=None)
    _add_output(p)

    p = sub.add_parser("density", help="demand density of D_delta(z) applied to a Gaussian")
    _add_strategy(p)
    p.add_argument("--grid", type=_grid)
    _add_output(p)

    p = sub.add_parser("supply", help="supply density")
    _add_strategy(p)
    p.add_argument("--grid", type=_grid, default=GridSpec(-4.0, 4.0, 1024))
    _add_output(p)

    p = sub.add_parser("wigner", help="Wigner field")
    _add_strategy(p)
    p.add_argument("--pgrid", type=_grid, default=GridSpec(-4.0, 4.0, 256))
    p.add_argument("--qgrid", type=_grid)
    _add_output(p)

    p = sub.add_parser("curve", help="demand curve, or conditional demand with --p")
    _add_strategy(p)
    p.add_argument("--grid", type=_grid)
    p.add_argument("--p", type=float)
    p.add_argument("--pgrid", type=_grid, default=GridSpec(-4.0, 4.0, 201))
    _add_output(p)

    p = sub.add_parser("risk", help="risk inclination expectation")
    _add_strategy(p)
    p.add_argument("--m", type=_positive, default=1.0)
    p.add_argument("--theta", type=_positive, default=2 * math.pi)
    p.add_argument("--p0", type=float)
    p.add_argument("--q0", type=float)
    _add_output(p)

    p = sub.add_parser("game", help="repeated game against a passive opponent")
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--slice-delta", type=float, help="use a Wigner-slice opponent of D_delta(z)")
    p.add_argument("--slice-z", type=parse_complex, default=None)
    p.add_argument("--slice-p", type=float, default=0.4)
    p.add_argument("--exact", action="store_true", help="quadrature instead of sampling")
    p.add_argument("--x0", type=float, default=0.0)
    p.add_argument("--tol", type=_positive, default=None)
    p.add_argument("--max-iter", type=int, default=1000)
    p.add_argument("--rounds", type=int, default=50)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--side", choices=("sell", "buy"), default="sell")
    p.add_argument("--renormalize", action="store_true", help="measure the conditional mean")
    p.add_argument("--hbar-e", type=_positive, default=None)
    _add_output(p)
    return parser


def _normalize_argv(argv):
    out, i = [], 0
    while i < len(argv):
        a = argv[i]
        if a in _VALUE_OPTS and i + 1 < len(argv):
            out.append(f"{a}={argv[i + 1]}")
            i += 2
            continue
        out.append(a)
        i += 1
    return out


def _strategy(args) -> Strategy:
    base = Strategy((GaussianComponent(1.0, 0.0, args.width),), hbar_e=args.hbar_e)
    return apply(from_z(args.delta, args.z), base)


def _default_qgrid(s: Strategy) -> GridSpec:
    lo, hi = s.support()
    return GridSpec(math.floor(lo), math.ceil(hi), 1024)


def _emit(args, text: str, report: dict | None = None) -> None:
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
        if report is not None and args.format == "csv":
            with open(args.out + ".report.json", "w", encoding="utf-8") as fh:
                fh.write(export.to_json("report", report))
    else:
        sys.stdout.write(text)
        if report is not None and args.format == "csv":
            sys.stderr.write(export.to_json("report", report))


def _finish_oracle(args, deviations: dict) -> int:
    if not args.oracle:
        return EXIT_OK
    worst = max(deviations.values()) if deviations else 0.0
    for k, v in deviations.items():
        print(f"oracle {k}: {v:.3e}", file=sys.stderr)
    ok = worst <= ORACLE_THRESHOLD
    print(f"oracle max deviation {worst:.3e} ({'ok' if ok else 'FAILED'})", file=sys.stderr)
    return EXIT_OK if ok else EXIT_ORACLE


def cmd_figure(args) -> int:
    overrides = {
        k: getattr(args, k)
        for k in ("delta", "z", "z2", "grid", "pgrid", "qgrid", "p", "hbar_e")
        if getattr(args, k) is not None
    }
    if "hbar_e" not in overrides and os.environ.get(HBAR_ENV) is not None:
        overrides["hbar_e"] = args.hbar_e_default
    job = FigureJob(args.figure_id, overrides)
    result = run_figure(job)
    deviations = figure_oracle(job, result) if args.oracle else {}
    report = dict(result.report)
    if args.oracle:
        report["oracle"] = deviations
    if args.format == "json":
        text = export.to_json("figure", {"report": report, "columns": result.columns})
        _emit(args, text)
    else:
        _emit(args, export.columns_to_csv(result.columns), report)
    return _finish_oracle(args, deviations)


def cmd_density(args) -> int:
    s = _strategy(args)
    grid = args.grid or _default_qgrid(s)
    q = grid.points
    amp = np.asarray(amplitude_q(s, q)) / math.sqrt(norm_squared(s))
    cols = {"q": q, "density": density_q(s, q), "amplitude_re": amp.real, "amplitude_im": amp.imag}
    q0, sigma = moments(s)
    report = {"q0": q0, "sigma": sigma, "norm_squared": norm_squared(s)}
    dev = {}
    if args.oracle:
        direct = np.abs(amplitude_q(s, q)) ** 2 / norm_squared_quadrature(s)
        dev["density_vs_quadrature_norm"] = float(np.max(np.abs(direct - cols["density"])))
    if args.format == "json":
        _emit(args, export.to_json("density", {"report": report, "columns": cols}))
    else:
        _emit(args, export.columns_to_csv(cols), report)
    return _finish_oracle(args, dev)


def cmd_supply(args) -> int:
    s = _strategy(args)
    sa = to_supply(s)
    p = args.grid.points
    amp = np.asarray(supply_amplitude(sa, p)) / math.sqrt(norm_squared(s))
    cols = {"p": p, "density": supply_density(sa, p), "amplitude_re": amp.real, "amplitude_im": amp.imag}
    dev = {}
    if args.oracle:
        lo, hi = s.support(8.0)
        dft = dft_supply(sample(s, GridSpec(lo, hi, 2048)))
        pts = dft.grid.points
        keep = (pts >= p[0]) & (pts <= p[-1])
        dev["dft_vs_analytic"] = float(
            np.max(np.abs(np.abs(dft.values[keep]) ** 2 - supply_density(sa, pts[keep])))
        )
        step = max(1, len(p) // 16)
        quad = np.array([supply_density_quadrature(s, x) for x in p[::step]])
        dev["quadrature_spots"] = float(np.max(np.abs(quad - cols["density"][::step])))
    if args.format == "json":
        _emit(args, export.to_json("supply", {"columns": cols}))
    else:
        _emit(args, export.columns_to_csv(cols))
    return _finish_oracle(args, dev)


def cmd_wigner(args) -> int:
    s = _strategy(args)
    qgrid = args.qgrid or _default_qgrid(s)
    f = wigner_field(s, args.pgrid, qgrid)
    dev = {}
    if args.oracle:
        P, Q = f.pgrid.points[:, None], f.qgrid.points[None, :]
        dev["demand_vs_supply_formula"] = float(np.max(np.abs(wigner_values(s, P, Q, "supply") - f.values)))
        rows = np.linspace(0, f.pgrid.n - 1, 4).astype(int)
        cols = np.linspace(0, f.qgrid.n - 1, 4).astype(int)
        dev["quadrature_spots"] = max(
            abs(wigner_point_quadrature(s, f.pgrid.points[i], f.qgrid.points[j]) - f.values[i, j])
            for i in rows
            for j in cols
        )
    text = export.wigner_to_json(f) if args.format == "json" else export.wigner_to_csv(f)
    _emit(args, text)
    return _finish_oracle(args, dev)


def cmd_curve(args) -> int:
    s = _strategy(args)
    grid = args.grid or _default_qgrid(s)
    q0, sigma = moments(s)
    dev = {}
    if args.p is None:
        q = grid.points
        curve = demand_curve(q, density_q(s, q), q0=q0, sigma=sigma)
        cols = {"q": q, "cumulative": curve.cumulative, "price": curve.prices()}
        report = {"q0": q0, "sigma": sigma, "giffen": detect_giffen(curve).to_dict()}
        if args.oracle:
            exact = upper_tail(s, q) - upper_tail(s, q[-1])
            dev["curve_vs_closed_form"] = float(np.max(np.abs(exact - curve.cumulative)))
    else:
        f = wigner_field(s, args.pgrid, grid)
        curve = conditional_demand(f, args.p, q0=q0, sigma=sigma)
        sl = slice_at_p(f, args.p)
        cols = {
            "q": curve.coords,
            "cumulative": curve.cumulative,
            "price": curve.prices(),
            "slice": sl.values / curve.scale,
        }
        report = {
            "p": args.p,
            "q0": q0,
            "sigma": sigma,
            "slice_integral": curve.scale,
            "giffen": detect_giffen(curve).to_dict(),
            "marginal_monotone": integrated_anomaly_check(f),
        }
        if args.oracle:
            q = curve.coords
            idx = np.arange(0, len(q), max(1, len(q) // 32))
            quad = np.array([wigner_point_quadrature(s, args.p, q[i]) for i in idx]) / curve.scale
            dev["slice_quadrature_spots"] = float(np.max(np.abs(quad - cols["slice"][idx])))
    if args.format == "json":
        _emit(args, export.to_json("curve", {"report": report, "columns": cols}))
    else:
        _emit(args, export.columns_to_csv(cols), report)
    return _finish_oracle(args, dev)


def cmd_risk(args) -> int:
    s = _strategy(args)
    rp = RiskParams(args.m, args.theta, args.p0, args.q0)
    value = risk_expectation(s, rp)
    row = {
        "hbar_e": s.hbar_e,
        "m": rp.m,
        "theta": rp.theta,
        "omega": rp.omega,
        "risk": value,
        "minimal_risk": minimal_risk(rp, s.hbar_e),
    }
    dev = {}
    if args.oracle:
        dev["risk_vs_quadrature"] = abs(risk_expectation_quadrature(s, rp) - value)
    if args.format == "json":
        _emit(args, export.to_json("risk", row))
    else:
        _emit(args, export.columns_to_csv({k: [v] for k, v in row.items()}))
    return _finish_oracle(args, dev)


def cmd_game(args) -> int:
    if args.slice_delta is not None:
        z = args.slice_z if args.slice_z is not None else complex(-math.sqrt(0.9))
        base = Strategy((GaussianComponent(1.0, 0.0, 1.0),), hbar_e=args.hbar_e)
        s = apply(from_z(args.slice_delta, z), base)
        q = _default_qgrid(s).points
        opponent = OpponentModel.from_slice(q, wigner_values(s, args.slice_p, q))
    else:
        opponent = OpponentModel.gaussian(args.mu, args.sigma)
    rule = AdmissibilityRule(args.side, args.renormalize)
    if args.exact:
        tol = args.tol if args.tol is not None else 1e-8
        trace = fixed_point_iterate(opponent, args.x0, tol, args.max_iter, rule)
    else:
        tol = args.tol if args.tol is not None else 0.05
        trace = simulate_repeated_game(opponent, args.rounds, args.samples, args.seed, args.x0, rule, tol)
    dev = {}
    if args.oracle and trace.converged and opponent.kind.value == "gaussian" and args.sigma > 0:
        from scipy.optimize import brentq

        from .game import update_map

        root = brentq(lambda x: update_map(opponent, x, rule) - x, -50.0, 50.0, xtol=1e-14)
        dev["fixed_point_vs_root_finder"] = abs(trace.fixed_point - root) if args.exact else 0.0
    if args.format == "json":
        _emit(args, trace.to_jsonl())
    else:
        cols = {
            "round": [r.round for r in trace.iterates],
            "estimate_Eq": [r.estimate_Eq for r in trace.iterates],
            "withdrawal_price_log": [r.withdrawal_price_log for r in trace.iterates],
        }
        text = export.columns_to_csv(cols)
        report = {
            "mode": trace.mode,
            "converged": trace.converged,
            "fixed_point": trace.fixed_point,
            "reason": trace.reason,
        }
        _emit(args, text, report)
    return _finish_oracle(args, dev)


COMMANDS = {
    "figure": cmd_figure,
    "density": cmd_density,
    "supply": cmd_supply,
    "wigner": cmd_wigner,
    "curve": cmd_curve,
    "risk": cmd_risk,
    "game": cmd_game,
}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        hbar_default = _default_hbar()
    except UsageError as exc:
        print(f"qmarket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        args = parser.parse_args(_normalize_argv(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    args.hbar_e_default = hbar_default
    if getattr(args, "hbar_e", None) is None and args.command != "figure":
        args.hbar_e = hbar_default
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("default")
            return COMMANDS[args.command](args)
    except (ZeroAmplitudeError, DegenerateSliceError, SignIndefiniteError) as exc:
        print(f"qmarket: degenerate input: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except (InvalidParameterError, OutOfDomainError) as exc:
        print(f"qmarket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"qmarket: cannot write output: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QMarketError as exc:  # pragma: no cover
        print(f"qmarket: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
