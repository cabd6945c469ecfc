"""Command-line entry point: ``stagmuscl run | converge | list-presets``."""
from __future__ import annotations

import argparse
import logging
import sys

from .config import CaseConfig, ConfigError, load_config
from .presets import PRESETS, preset, preset_summary
from .run import EXIT_CONFIG, EXIT_OK, StudyError, convergence_study, run_case

log = logging.getLogger("stagmuscl")

# CLI flag -> configuration key
OVERRIDES = {
    "scheme": "scheme.scheme",
    "xi_plus": "scheme.xi_plus",
    "xi_minus": "scheme.xi_minus",
    "nu": "scheme.nu",
    "dt": "scheme.dt",
    "final_time": "case.final_time",
    "snapshots": "output.snapshots",
}


def _case_arguments(p: argparse.ArgumentParser) -> None:
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", metavar="PATH", help="case configuration file")
    src.add_argument("--preset", metavar="NAME", help="named case (see list-presets)")
    p.add_argument("--output", metavar="DIR", default=None, help="output directory")
    p.add_argument("--scheme", choices=("upwind", "centered", "muscl"))
    p.add_argument("--xi-plus", type=float)
    p.add_argument("--xi-minus", type=float)
    p.add_argument("--nu", type=float, help="stabilization coefficient")
    p.add_argument("--dt", type=float, help="time step")
    p.add_argument("--final-time", type=float)
    p.add_argument("--snapshots", type=int, metavar="N", help="number of field snapshots")
    p.add_argument("--set", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override any configuration key (repeatable)")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stagmuscl", description="Staggered MUSCL flow solver")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one case")
    _case_arguments(run)
    conv = sub.add_parser("converge", help="refinement study with observed orders")
    _case_arguments(conv)
    conv.add_argument("--levels", help="comma separated cell counts per direction")
    conv.add_argument("--schemes", help="comma separated list of schemes to compare")
    sub.add_parser("list-presets", help="list the named cases")
    return parser


def resolve_config(args) -> CaseConfig:
    cfg = load_config(args.config) if args.config else preset(args.preset)
    overrides = {}
    for attr, key in OVERRIDES.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[key] = value
    for item in args.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects SECTION.KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    return cfg.with_overrides(overrides) if overrides else cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "list-presets":
        for name in sorted(PRESETS):
            print(preset_summary(name))
        return EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.command == "run":
        report = run_case(cfg, args.output)
        sys.stdout.write(report.to_text())
        if not report.ok:
            print(report.message, file=sys.stderr)
        return report.exit_code
    levels = [int(v) for v in args.levels.split(",")] if args.levels else None
    schemes = [s.strip() for s in args.schemes.split(",")] if args.schemes else None
    try:
        table = convergence_study(cfg, levels, schemes, output_dir=args.output)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except StudyError as exc:
        print(str(exc), file=sys.stderr)
        return exc.exit_code
    for scheme, orders in table.orders.items():
        text = ", ".join(f"{var} {order:.3f}" for var, order in orders.items())
        print(f"{scheme}: {text}")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
