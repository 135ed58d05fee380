"""Command-line scenario runner and report emitter.

Subcommands:
  run          verify scenarios from a config file and/or a preset
  bound-only   evaluate the bound side only (no eigensolve)
  convergence  grid-refinement study with Richardson extrapolation
  asymptotics  weak/strong coupling tables

Exit codes: 0 all inequalities hold, 2 violation beyond tolerance,
3 solver failure, 4 configuration error.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from pathlib import Path

from .eigensolve import EigensolveError
from .geometry import Profile, StripBump, StripNeumannWindow, TubeRadial
from .ltbound import BoundSpec, QuadratureConfig, lt_bound
from .pipeline import (
    ConfigError,
    GridConfig,
    PRESETS,
    Scenario,
    continuum_threshold,
    emit,
    run_asymptotics_strong,
    run_asymptotics_weak,
    run_convergence,
    run_scenario,
)
from .quadrature import QuadratureError

EXIT_OK = 0
EXIT_VIOLATION = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _floats(text: str) -> list[float]:
    return [float(t) for t in text.replace(",", " ").split()]


def _geometry_from_options(opt: dict):
    preset = opt.get("preset")
    if preset:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        if preset == "corollary1":
            return PRESETS[preset](alpha=float(opt.get("alpha", 1.0)),
                                   b=float(opt.get("b", 1.0)))
        if preset == "corollary2":
            return PRESETS[preset](kind=opt.get("profile", "rectangular"),
                                   amplitude=float(opt.get("amplitude", 1.0)),
                                   width=float(opt.get("width", 1.0)))
        return PRESETS[preset](r=float(opt.get("r", 1.2)),
                               width=float(opt.get("width", 2.0)))
    family = opt.get("family")
    if family == "strip-window":
        window = _floats(opt.get("window", "0 1"))
        return StripNeumannWindow((window[0], window[1]), float(opt.get("b", 1.0)))
    if family == "strip-bump":
        support = _floats(opt.get("support", "0 1"))
        kind = opt.get("profile", "rectangular")
        amp = float(opt.get("amplitude", 1.0))
        if kind == "rectangular":
            prof = Profile.rectangular(amp, (support[0], support[1]))
        elif kind in ("cos2", "smooth-bump"):
            prof = Profile.cos_bump(amp, (support[0], support[1]))
        elif kind == "tabulated":
            pts = _floats(opt.get("samples", ""))
            prof = Profile.tabulated(list(zip(pts[0::2], pts[1::2])))
        else:
            raise ConfigError(f"unknown profile kind {kind!r}")
        return StripBump(prof)
    if family == "tube":
        support = _floats(opt.get("support", "0 2"))
        return TubeRadial(Profile.rectangular(float(opt.get("r", 1.2)) - 1.0,
                                              (support[0], support[1])))
    raise ConfigError("scenario needs either a preset or a geometry family")


def _scenario_from_options(name: str, opt: dict, args) -> Scenario:
    geometry = _geometry_from_options(opt)
    sigmas = tuple(_floats(opt.get("sigma", "0.5")))
    extent = tuple(_floats(opt["extent"])) if "extent" in opt else None
    grid = GridConfig(
        h_xi=float(opt.get("h_xi", 0.02)),
        h_t=float(opt.get("h_eta", opt.get("h_rho", opt.get("h_t", 0.005)))),
        extent=extent,
        truncation_tol=float(opt.get("truncation_tol", 1e-6)),
        presolve=opt.get("presolve", "true").lower() != "false",
    )
    return Scenario(
        name=name,
        geometry=geometry,
        sigmas=sigmas,
        grid=grid,
        quad=QuadratureConfig(abs_tol=float(opt.get("quad_tol", 1e-10))),
        eps_disc=float(opt.get("eps_disc", 1e-2)),
        dump_matrix=opt.get("dump_matrix", "false").lower() == "true",
    )


def _load_scenarios(args) -> list[Scenario]:
    scenarios = []
    if args.config:
        parser = configparser.ConfigParser()
        read = parser.read(args.config)
        if not read:
            raise ConfigError(f"config file {args.config!r} not found")
        for section in parser.sections():
            name = section.split(":", 1)[1] if ":" in section else section
            opt = dict(parser[section])
            scenarios.append(_scenario_from_options(name, _merge_cli(opt, args), args))
    if args.preset and not scenarios:
        opt = _merge_cli({"preset": args.preset}, args)
        scenarios.append(_scenario_from_options(args.preset, opt, args))
    if not scenarios:
        raise ConfigError("no scenarios: give a config file or --preset")
    return scenarios


def _merge_cli(opt: dict, args) -> dict:
    for key in ("alpha", "b", "amplitude", "width", "r", "sigma",
                "h_xi", "h_eta", "truncation_tol", "eps_disc"):
        val = getattr(args, key, None)
        if val is not None:
            opt[key] = val if isinstance(val, str) else str(val)
    if getattr(args, "grid", None):
        parts = _floats(args.grid)
        opt["h_xi"] = str(parts[0])
        opt["h_eta"] = str(parts[-1])
    if getattr(args, "preset", None):
        opt["preset"] = args.preset
    return opt


def _print_report(name: str, rep) -> None:
    slack = "" if rep.slack_ratio is None else f" riesz={rep.riesz_mean:.6g} slack={rep.slack_ratio:.4f}"
    status = ""
    if rep.slack_ratio is not None:
        ok = rep.slack_ratio <= 1.0 + rep.diagnostics.get("eps_disc", 1e-2)
        status = "  OK" if ok else "  VIOLATION"
    print(f"{name} sigma={rep.sigma:g} I={rep.integral:.6g} "
          f"bound={rep.bound:.6g}{slack}{status}")


def cmd_run(args) -> int:
    scenarios = _load_scenarios(args)
    worst = EXIT_OK
    for sc in scenarios:
        result = run_scenario(sc)
        for rep in result.reports:
            _print_report(sc.name, rep)
        if args.out:
            emit(result, args.out)
        if not result.ok:
            worst = EXIT_VIOLATION
    return worst


def cmd_bound_only(args) -> int:
    scenarios = _load_scenarios(args)
    for sc in scenarios:
        from .pipeline import snap_geometry

        geom, _ = snap_geometry(sc.geometry, sc.grid)
        tau = continuum_threshold(geom)
        reports = [lt_bound(geom, BoundSpec(s, tau), sc.quad) for s in sc.sigmas]
        for rep in reports:
            _print_report(sc.name, rep)
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            payload = {"scenario": sc.name,
                       "reports": [r.to_json_dict() for r in reports]}
            (out / f"{sc.name}.report.json").write_text(
                json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def cmd_convergence(args) -> int:
    scenarios = _load_scenarios(args)
    for sc in scenarios:
        res = run_convergence(sc, levels=args.levels)
        print(f"{sc.name}: steps {['%.5g' % s for s in res.steps]}")
        for sigma, seq in res.riesz.items():
            print(f"  sigma={sigma:g} riesz={['%.8g' % v for v in seq]} "
                  f"order={res.orders[sigma]:.2f} "
                  f"extrapolated={res.extrapolated[sigma]:.8g}")
        if res.lowest_order is not None:
            print(f"  lowest eigenvalue order={res.lowest_order:.2f} "
                  f"extrapolated={res.lowest_extrapolated:.10g}")
        print(f"  eps_disc={res.eps_disc:.3e}")
        if args.out:
            out = Path(args.out)
            out.mkdir(parents=True, exist_ok=True)
            payload = {
                "scenario": sc.name,
                "steps": res.steps,
                "lowest": res.lowest,
                "riesz": {str(k): v for k, v in res.riesz.items()},
                "orders": {str(k): v for k, v in res.orders.items()},
                "extrapolated": {str(k): v for k, v in res.extrapolated.items()},
                "eps_disc": res.eps_disc,
            }
            (out / f"{sc.name}.convergence.json").write_text(
                json.dumps(payload, sort_keys=True, indent=1) + "\n")
    return EXIT_OK


def cmd_asymptotics(args) -> int:
    alphas = [float(a) for a in args.alphas]
    if args.family == "weak":
        rows = run_asymptotics_weak(alphas)
        header = "alpha,lambda,asymptote,lower_order4,satisfied"
    else:
        rows = run_asymptotics_strong(alphas, sigma=args.sigma_value)
        header = ("alpha,trace,bracket_lower,bracket_upper,lt_bound,"
                  "trace_per_alpha,asymptote_slope,within_brackets")
    print(header)
    lines = [header]
    ok = True
    for row in rows:
        vals = [row[k] for k in _row_keys(args.family)]
        line = ",".join("" if v is None else str(v) for v in vals)
        print(line)
        lines.append(line)
        flag = row.get("satisfied", row.get("within_brackets", True))
        ok = ok and bool(flag)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / f"asymptotics-{args.family}.csv").write_text("\n".join(lines) + "\n")
    return EXIT_OK if ok else EXIT_VIOLATION


def _row_keys(family: str):
    if family == "weak":
        return ["alpha", "lambda", "asymptote", "lower", "satisfied"]
    return ["alpha", "trace", "bracket_lower", "bracket_upper", "lt_bound",
            "trace_per_alpha", "asymptote_slope", "within_brackets"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="guidebound",
        description="Trapped-mode spectra of perturbed waveguides and "
                    "Lieb-Thirring-type bounds on their Riesz means.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, with_config=True):
        if with_config:
            p.add_argument("config", nargs="?", help="INI config with [scenario:*] sections")
        p.add_argument("--preset", choices=sorted(PRESETS))
        p.add_argument("--sigma", help="space-separated Riesz orders, e.g. '0.5 1 1.5'")
        p.add_argument("--grid", help="steps 'h_xi h_eta'")
        p.add_argument("--alpha", type=float)
        p.add_argument("--b", type=float)
        p.add_argument("--amplitude", type=float)
        p.add_argument("--width", type=float)
        p.add_argument("--r", type=float)
        p.add_argument("--h-xi", dest="h_xi", type=float)
        p.add_argument("--h-eta", dest="h_eta", type=float)
        p.add_argument("--truncation-tol", dest="truncation_tol", type=float)
        p.add_argument("--eps-disc", dest="eps_disc", type=float)
        p.add_argument("--out", help="output directory for reports")

    p_run = sub.add_parser("run", help="verify the inequality end to end")
    add_common(p_run)
    p_run.set_defaults(func=cmd_run)

    p_bound = sub.add_parser("bound-only", help="evaluate the bound side only")
    add_common(p_bound)
    p_bound.set_defaults(func=cmd_bound_only)

    p_conv = sub.add_parser("convergence", help="grid refinement study")
    add_common(p_conv)
    p_conv.add_argument("--levels", type=int, default=3)
    p_conv.set_defaults(func=cmd_convergence)

    p_asym = sub.add_parser("asymptotics", help="weak/strong coupling tables")
    p_asym.add_argument("--family", choices=("weak", "strong"), required=True)
    p_asym.add_argument("--alphas", nargs="+", required=True)
    p_asym.add_argument("--sigma", dest="sigma_value", type=float, default=0.5)
    p_asym.add_argument("--out")
    p_asym.set_defaults(func=cmd_asymptotics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, configparser.Error) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigensolveError, QuadratureError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
