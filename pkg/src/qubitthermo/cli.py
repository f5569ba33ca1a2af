"""Command-line front end: run, list, audit and sweep scenarios.

Exit codes: 0 all audits passed, 1 audit or run failure, 2 usage or
input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .scenarios import (
    BUILTIN_NAMES,
    ConfigError,
    RunReport,
    SWEEPABLE_PARAMS,
    audit_report,
    builtin_config,
    config_from_dict,
    render_report,
    resolve_scenario,
    run_scenario,
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qubitthermo",
        description="Open-system qubit dynamics with dual heat/work bookkeeping")
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="run one scenario and write its outputs")
    run_p.add_argument("--scenario", required=True,
                       help="built-in name or path to a JSON config")
    run_p.add_argument("--dt", type=float, help="override the integrator step")
    run_p.add_argument("--tmax", type=float, help="override the time horizon")
    run_p.add_argument("--out", help="override the output directory")
    run_p.add_argument("--no-svg", action="store_true", help="skip SVG panels")
    run_p.add_argument("--no-png", action="store_true",
                       help="skip matplotlib PNG panels")

    sub.add_parser("list", help="print the built-in scenario registry")

    audit_p = sub.add_parser("audit", help="run scenarios and tabulate audit verdicts")
    audit_p.add_argument("names", nargs="*",
                         help="scenario names (default: every built-in)")
    audit_p.add_argument("--out", help="override the output directory")

    sweep_p = sub.add_parser("sweep", help="run one scenario across parameter values")
    sweep_p.add_argument("--scenario", required=True)
    sweep_p.add_argument("--param", required=True,
                         help=f"one of: {', '.join(SWEEPABLE_PARAMS)}")
    sweep_p.add_argument("--values", required=True,
                         help="comma-separated numbers")
    sweep_p.add_argument("--dt", type=float, help="override the integrator step")
    sweep_p.add_argument("--tmax", type=float, help="override the time horizon")
    sweep_p.add_argument("--out", help="override the output directory")
    sweep_p.add_argument("--no-svg", action="store_true")
    sweep_p.add_argument("--no-png", action="store_true")
    return parser


def _apply_overrides(cfg, args):
    updates = {}
    if getattr(args, "dt", None) is not None:
        updates["dt"] = args.dt
    if getattr(args, "tmax", None) is not None:
        updates["t_max"] = args.tmax
    if getattr(args, "out", None) is not None:
        updates["out_dir"] = args.out
    return dataclasses.replace(cfg, **updates) if updates else cfg


def _cmd_run(args) -> int:
    cfg = _apply_overrides(resolve_scenario(args.scenario), args)
    report = run_scenario(cfg, no_svg=args.no_svg, no_png=args.no_png)
    print(render_report(report), end="")
    return 0 if report.passed else 1


def _cmd_list() -> int:
    for name in BUILTIN_NAMES:
        cfg = builtin_config(name)
        print(f"{name:<16} model={cfg.model:<17} t_max={cfg.t_max:<5g} "
              f"{cfg.description}")
    return 0


def _cmd_audit(args) -> int:
    names = args.names or list(BUILTIN_NAMES)
    reports: list[RunReport] = []
    for name in names:
        cfg = _apply_overrides(resolve_scenario(name), args)
        reports.append(run_scenario(cfg, no_svg=True, no_png=True))
    text, status = audit_report(reports)
    print(text, end="")
    return status


def _cmd_sweep(args) -> int:
    if args.param not in SWEEPABLE_PARAMS:
        raise ConfigError(f"--param must be one of {', '.join(SWEEPABLE_PARAMS)}, "
                          f"got {args.param!r}")
    try:
        values = [float(v) for v in args.values.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"--values expects comma-separated numbers, "
                          f"got {args.values!r}") from None
    if not values:
        raise ConfigError("--values is empty")
    base = _apply_overrides(resolve_scenario(args.scenario), args)
    reports = []
    for value in values:
        raw = base.to_dict()
        raw[args.param] = value
        raw["name"] = f"{base.name}__{args.param}={value:g}"
        cfg = config_from_dict(raw, origin=f"sweep {args.param}={value:g}")
        cfg = dataclasses.replace(cfg, panels=base.panels,
                                  description=base.description)
        reports.append(run_scenario(cfg, no_svg=args.no_svg, no_png=args.no_png))
    text, status = audit_report(reports)
    print(text, end="")
    return status


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list()
        if args.command == "audit":
            return _cmd_audit(args)
        if args.command == "sweep":
            return _cmd_sweep(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 2


if __name__ == "__main__":
    sys.exit(main())
