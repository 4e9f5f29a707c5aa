"""Command-line interface: subcommand dispatch over the report layer.

Outputs are deterministic: a fixed float format, no timestamps, and a
manifest block naming the tool version, inputs, and overrides, so
identical invocations produce byte-identical artifacts.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from pathlib import Path
from typing import Any

from . import reports
from .config import ConfigError, load_platform
from .jsonio import csv_text, dumps
from .platform import Platform
from .presets import load_preset, preset_names
from .reports import DomainInfeasibleError
from .wrench_sets import CannotLiftWeightError

OUTPUT_DIR_ENV = "TILTHOVER_OUTPUT_DIR"

EXIT_OK = 0
EXIT_INFEASIBLE = 1
EXIT_INPUT = 2


def _parse_override(text: str) -> float | dict[int, float]:
    """Either a plain number (uniform) or idx:value pairs, comma separated."""
    if ":" not in text:
        return float(text)
    out: dict[int, float] = {}
    for part in text.split(","):
        idx, _, val = part.partition(":")
        out[int(idx)] = float(val)
    return out


def _per_prop(platform: Platform, field: str, spec: float | dict[int, float]) -> Platform:
    props = list(platform.propellers)
    targets = range(len(props)) if isinstance(spec, float) else spec.keys()
    for i in targets:
        if not 0 <= i < len(props):
            raise ConfigError(f"--{field} index {i} out of range for {len(props)} propellers")
        value = spec if isinstance(spec, float) else spec[i]
        props[i] = dataclasses.replace(props[i], **{field: value})
    return dataclasses.replace(platform, propellers=tuple(props))


def _load_source(args: argparse.Namespace) -> tuple[Platform, str]:
    if args.preset and args.config:
        raise ConfigError("give either a config file or --preset, not both")
    if args.preset:
        try:
            platform = load_preset(args.preset)
        except KeyError:
            raise ConfigError(
                f"unknown preset {args.preset!r}; available: {', '.join(preset_names())}"
            ) from None
        source = f"preset:{args.preset}"
    elif args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {path}")
        platform = load_platform(path.read_text(encoding="utf-8"))
        source = str(path)
    else:
        raise ConfigError("a platform is required: pass a config file or --preset NAME")

    overrides = {}
    if args.mass is not None:
        platform = dataclasses.replace(platform, mass=args.mass)
        overrides["mass"] = args.mass
    for flag, field in (("umax", "u_max"), ("u_rate", "u_rate_max"), ("angle_rate", "angle_rate_max")):
        raw = getattr(args, flag)
        if raw is not None:
            spec = _parse_override(raw)
            platform = _per_prop(platform, field, spec)
            overrides[flag.replace("_", "-")] = raw
    args._overrides = overrides
    return platform, source


def _add_source_args(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("config", nargs="?", help="platform config file (YAML)")
    sub.add_argument("--preset", help=f"built-in platform: {', '.join(preset_names())}")
    sub.add_argument("--mass", type=float, help="override mass [kg]")
    sub.add_argument("--umax", help="override max thrust [N], uniform or idx:val,...")
    sub.add_argument("--u-rate", dest="u_rate", help="override thrust rate [N/s]")
    sub.add_argument("--angle-rate", dest="angle_rate", help="override tilt rate [rad/s]")
    sub.add_argument("--rank-tol", type=float, default=None, help="relative rank tolerance")
    sub.add_argument("--threads", type=int, default=1, help="worker cap for sweeps")
    sub.add_argument("--format", choices=("json", "csv"), default="json")
    sub.add_argument("--output", help="write to this path instead of stdout")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tilthover",
        description="Static hover analysis for multi-rotor vehicles with tiltable propellers",
    )
    parser.add_argument("--version", action="version", version=f"tilthover {reports.tool_version()}")
    subs = parser.add_subparsers(dest="subcommand", required=True)

    def sub(name: str, help_text: str) -> argparse.ArgumentParser:
        s = subs.add_parser(name, help=help_text)
        _add_source_args(s)
        return s

    sub("analyze", "classification, hover check, and actuation ranks")

    s = sub("hover-solve", "hover witness at one orientation")
    s.add_argument("--phi", type=float, required=True, help="roll about body x [deg]")
    s.add_argument("--theta", type=float, required=True, help="pitch about body y [deg]")

    s = sub("hover-map", "hover feasibility over the orientation grid")
    s.add_argument("--step", type=float, default=30.0, help="grid step [deg]")

    s = sub("odl", "omnidirectional lift: inscribed ball of the zero-moment force set")
    s.add_argument("--resolution", type=int, default=2048, help="probe directions")

    s = sub("force-set", "zero-moment force set point cloud")
    s.add_argument("--resolution", type=int, default=2048)

    s = sub("lhi", "local hoverability index at one orientation")
    s.add_argument("--phi", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--resolution", type=int, default=2048)

    s = sub("lhi-map", "local hoverability index over the orientation grid")
    s.add_argument("--step", type=float, default=30.0, help="grid step [deg]")
    s.add_argument("--resolution", type=int, default=2048)

    s = sub("moment-sets", "rate-limited local moment sets at a hover point")
    s.add_argument("--phi", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--resolution", type=int, default=512)

    s = sub("simulate", "rigid-body experiment at a hover point")
    s.add_argument("--experiment", choices=("moment-step", "force-track"), required=True)
    s.add_argument("--phi", type=float, required=True)
    s.add_argument("--theta", type=float, required=True)
    s.add_argument("--axis", choices=("x", "y", "z"), default="x", help="moment step axis")
    s.add_argument("--magnitude", type=float, default=1.5, help="moment step size [N*m]")
    s.add_argument("--rotation", type=float, default=5.0, help="force rotation [deg]")
    s.add_argument("--duration", type=float, default=2.0, help="simulated time [s]")
    s.add_argument("--dt", type=float, default=1e-3, help="integration step [s]")
    s.add_argument("--gain", type=float, default=50.0, help="wrench tracking gain [1/s]")

    s = sub("dump-allocation", "allocation matrices and ranks at an operating point")
    s.add_argument("--phi", type=float, default=None, help="use the hover witness here")
    s.add_argument("--theta", type=float, default=None)

    sub("presets", "list built-in platforms")
    return parser


def _manifest(args: argparse.Namespace, source: str, outputs: list[str]) -> dict[str, Any]:
    return {
        "tool": "tilthover",
        "version": reports.tool_version(),
        "subcommand": args.subcommand,
        "source": source,
        "overrides": getattr(args, "_overrides", {}),
        "outputs": outputs,
    }


def _resolve_output(raw: str | None) -> Path | None:
    if raw is None:
        return None
    path = Path(raw)
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not path.is_absolute():
        path = Path(base) / path
    return path


def _emit(
    args: argparse.Namespace,
    source: str,
    report: dict[str, Any],
    csv_parts: tuple[list[str], list[list[Any]]] | None,
) -> None:
    out_path = _resolve_output(args.output)
    outputs = [str(out_path) if out_path else "-"]
    manifest = _manifest(args, source, outputs)
    if args.format == "csv":
        if csv_parts is None:
            raise ConfigError(f"{args.subcommand} has no CSV form; use --format json")
        header, rows = csv_parts
        comments = [
            f"tilthover {manifest['version']} {manifest['subcommand']}",
            f"source: {source}",
            f"overrides: {manifest['overrides']}",
        ]
        text = csv_text(header, rows, comments)
    else:
        text = dumps({"manifest": manifest, **report})
    if out_path:
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(text, encoding="utf-8", newline="")
    else:
        sys.stdout.write(text)


def _run(args: argparse.Namespace) -> int:
    if args.subcommand == "presets":
        # no platform source needed
        report = reports.presets_report()
        args._overrides = {}
        _emit(args, "builtin", report, None)
        return EXIT_OK

    platform, source = _load_source(args)
    rank_tol = args.rank_tol
    tol_kw = {} if rank_tol is None else {"rank_tol": rank_tol}

    if args.subcommand == "analyze":
        report = reports.analyze_report(platform, **tol_kw)
        _emit(args, source, report, None)
    elif args.subcommand == "hover-solve":
        report = reports.hover_solve_report(platform, args.phi, args.theta)
        _emit(args, source, report, None)
        if not report["feasible"]:
            return EXIT_INFEASIBLE
    elif args.subcommand == "hover-map":
        report = reports.hover_map_report(platform, step_deg=args.step, threads=args.threads)
        _emit(args, source, report, reports.hover_map_rows(report))
    elif args.subcommand == "odl":
        report = reports.odl_report(platform, resolution=args.resolution)
        _emit(args, source, report, None)
    elif args.subcommand == "force-set":
        report = reports.force_set_report(platform, resolution=args.resolution)
        _emit(args, source, report, reports.force_set_rows(report))
    elif args.subcommand == "lhi":
        report = reports.lhi_report(platform, args.phi, args.theta, resolution=args.resolution)
        _emit(args, source, report, None)
    elif args.subcommand == "lhi-map":
        report = reports.lhi_map_report(
            platform, step_deg=args.step, resolution=args.resolution, threads=args.threads
        )
        _emit(args, source, report, reports.lhi_map_rows(report))
    elif args.subcommand == "moment-sets":
        report = reports.moment_sets_report(
            platform, args.phi, args.theta, resolution=args.resolution
        )
        _emit(args, source, report, reports.moment_sets_rows(report))
    elif args.subcommand == "simulate":
        summary, result = reports.simulate_report(
            platform,
            args.experiment,
            args.phi,
            args.theta,
            axis=args.axis,
            magnitude=args.magnitude,
            rotation_deg=args.rotation,
            duration=args.duration,
            dt=args.dt,
            wrench_gain=args.gain,
        )
        csv_parts = reports.simulate_rows(platform, result)
        out_path = _resolve_output(args.output)
        if out_path is not None:
            # one base path, two artifacts: summary JSON plus series CSV
            base = out_path.with_suffix("") if out_path.suffix in (".json", ".csv") else out_path
            json_path, csv_path = base.with_suffix(".json"), base.with_suffix(".csv")
            manifest = _manifest(args, source, [str(json_path), str(csv_path)])
            base.parent.mkdir(parents=True, exist_ok=True)
            json_path.write_text(dumps({"manifest": manifest, **summary}), encoding="utf-8", newline="")
            header, rows = csv_parts
            comments = [
                f"tilthover {manifest['version']} simulate {args.experiment}",
                f"source: {source}",
                f"overrides: {manifest['overrides']}",
            ]
            csv_path.write_text(csv_text(header, rows, comments), encoding="utf-8", newline="")
        else:
            _emit(args, source, summary, csv_parts)
    elif args.subcommand == "dump-allocation":
        report = reports.allocation_report(platform, args.phi, args.theta, **tol_kw)
        _emit(args, source, report, None)
    else:  # unreachable with required=True
        raise ConfigError(f"unknown subcommand {args.subcommand!r}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse uses exit code 2 for usage errors
        return int(exc.code or 0)
    try:
        return _run(args)
    except (DomainInfeasibleError, CannotLiftWeightError) as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
