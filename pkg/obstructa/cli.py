"""Command-line entry point.

    obstructa validate <config>
    obstructa paste <config> [--stats]
    obstructa color <config> [--find | --count | --enumerate] [--dimacs OUT]
    obstructa colimit <config>
    obstructa spectrum <config> [--functor F]
    obstructa pipeline <config> [--functor F] [--json]
    obstructa selftest

<config> is a JSON file or the name of a bundled dataset. Every command takes
--threads N (default: OBSTRUCTA_THREADS, then the CPU count). Exit codes: 0 on
success, 1 on invalid input, 2 when a cross-check or theorem check fails.
Results go to stdout; logs go to stderr.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

from obstructa import complexes, config
from obstructa.cat import CategoryError
from obstructa.complexes import COLOR_MODES, ConfigurationError, FrameComplex
from obstructa.reports import PropertyViolation
from obstructa.selftest import run_selftest
from obstructa.spectra import SpectrumFunctor, complex_boolean_colimit, complex_spectrum_limit, nogo_pipeline

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_VIOLATION = 2

COMMANDS = ("validate", "paste", "color", "colimit", "spectrum", "pipeline", "selftest")


@dataclass
class RunConfig:
    """Validated command-line request."""
    command: str
    source: Optional[str] = None
    mode: str = "count"
    functor: SpectrumFunctor = SpectrumFunctor.GELFAND
    dimacs: Optional[Path] = None
    threads: int = 1
    json_output: bool = False
    stats: bool = False

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        """Build and check a RunConfig before any computation.

        Raises:
            ValueError: On an unknown command, mode or functor, or a bad thread count
        """
        if args.command not in COMMANDS:
            raise ValueError(f"Unknown command {args.command!r}")
        mode = getattr(args, "mode", None) or "count"
        if mode not in COLOR_MODES:
            raise ValueError(f"mode must be one of {COLOR_MODES}")
        source = getattr(args, "config", None)
        if args.command != "selftest" and not source:
            raise ValueError(f"{args.command} needs a configuration")
        dimacs = getattr(args, "dimacs", None)
        return cls(
            command=args.command,
            source=source,
            mode=mode,
            functor=SpectrumFunctor(getattr(args, "functor", None) or SpectrumFunctor.GELFAND.value),
            dimacs=Path(dimacs) if dimacs else None,
            threads=config.get_threads(args.threads),
            json_output=getattr(args, "json", False),
            stats=getattr(args, "stats", False),
        )


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--threads", type=int, default=None, metavar="N",
        help="Solver threads (default: OBSTRUCTA_THREADS, then CPU count)",
    )

    parser = argparse.ArgumentParser(
        prog="obstructa",
        description="Kochen-Specker colorings, Boolean colimits and spectrum limits of frame complexes.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    functors = [f.value for f in SpectrumFunctor]

    p = sub.add_parser("validate", parents=[common], help="Exact validation of a configuration")
    p.add_argument("config", help="Configuration JSON file or bundled dataset name")

    p = sub.add_parser("paste", parents=[common], help="Paste the bases into a partial Boolean algebra")
    p.add_argument("config")
    p.add_argument("--stats", action="store_true", help="Print element and shared-subspace counts")

    p = sub.add_parser("color", parents=[common], help="Search 2-colorings")
    p.add_argument("config")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--find", dest="mode", action="store_const", const="find")
    group.add_argument("--count", dest="mode", action="store_const", const="count")
    group.add_argument("--enumerate", dest="mode", action="store_const", const="enumerate")
    p.add_argument("--dimacs", metavar="OUT", help="Also write the coloring CNF in DIMACS format")

    p = sub.add_parser("colimit", parents=[common], help="Boolean colimit of the total subalgebras")
    p.add_argument("config")

    p = sub.add_parser("spectrum", parents=[common], help="Limit locale of a spectrum functor")
    p.add_argument("config")
    p.add_argument("--functor", choices=functors, default="gelfand")

    p = sub.add_parser("pipeline", parents=[common], help="Full no-go pipeline with cross-checks")
    p.add_argument("config")
    p.add_argument("--functor", choices=functors, default="gelfand")
    p.add_argument("--json", action="store_true", help="Print the JSON report")

    sub.add_parser("selftest", parents=[common], help="Run the invariant suite")
    return parser


def _bool(value: bool) -> str:
    return "true" if value else "false"


def _load_valid(cfg: RunConfig) -> FrameComplex:
    c = complexes.load_complex(cfg.source)
    report = complexes.validate_complex(c)
    if not report.ok:
        raise ConfigurationError(f"invalid frame complex: {report.law} at {report.witness}")
    return c


def cmd_validate(cfg: RunConfig) -> int:
    c = complexes.load_complex(cfg.source)
    report = complexes.validate_complex(c)
    if not report.ok:
        print(f"invalid: {report.law} at {list(report.witness or ())}")
        return EXIT_INVALID
    print(f"valid: dimension {c.dimension}, {len(c.rays)} rays, {len(c.bases)} bases")
    return EXIT_OK


def cmd_paste(cfg: RunConfig) -> int:
    pasted = complexes.paste(_load_valid(cfg))
    stats = pasted.stats()
    if cfg.stats:
        stats["blocks"] = len(pasted.pba.blocks())
        for key in sorted(stats):
            value = stats[key]
            print(f"{key}: {json.dumps(value, sort_keys=True) if isinstance(value, dict) else value}")
    else:
        print(f"pasted: {stats['elements']} elements, {stats['shared']} shared")
    return EXIT_OK


def cmd_color(cfg: RunConfig) -> int:
    c = _load_valid(cfg)
    if cfg.dimacs:
        cfg.dimacs.write_text(complexes.to_dimacs(c), encoding="utf-8")
        logger.info("Wrote DIMACS to %s", cfg.dimacs)
    result = complexes.color_search(c, mode=cfg.mode, threads=cfg.threads)
    if cfg.mode == "count":
        print(result.count)
    elif cfg.mode == "find":
        print("".join(map(str, result.found)) if result.found else "uncolorable")
    else:
        for coloring in result.colorings:
            print("".join(map(str, coloring)))
    return EXIT_OK


def cmd_colimit(cfg: RunConfig) -> int:
    colimit = complex_boolean_colimit(_load_valid(cfg), threads=cfg.threads)
    print(f"atoms: {colimit.algebra.atom_count}")
    print(f"size: {colimit.size}")
    print(f"terminal: {_bool(colimit.size == 1)}")
    return EXIT_OK


def cmd_spectrum(cfg: RunConfig) -> int:
    limit = complex_spectrum_limit(_load_valid(cfg), cfg.functor)
    print(f"functor: {cfg.functor.value}")
    print(f"limit opens: {limit.frame.size}")
    print(f"limit points: {limit.point_count}")
    print(f"initial: {_bool(limit.frame.size == 1)}")
    return EXIT_OK


def cmd_pipeline(cfg: RunConfig) -> int:
    report = nogo_pipeline(complexes.load_complex(cfg.source), cfg.functor, threads=cfg.threads)
    if cfg.json_output:
        print(json.dumps(report.to_json_dict(), sort_keys=True, indent=2))
        return EXIT_OK
    print(f"colorings: {report.colorings}")
    print(f"boolean colimit size: {report.boolean_colimit_size}")
    print(f"limit opens: {report.limit_opens}")
    print(f"limit points: {report.limit_points}")
    print(f"initial: {_bool(report.initial)}")
    print(f"functor: {report.functor.value}")
    print(f"checks: {len(report.checks)} passed")
    return EXIT_OK


def cmd_selftest(cfg: RunConfig) -> int:
    report = run_selftest(threads=cfg.threads)
    for result in report.results:
        status = "PASS" if result.ok else "FAIL"
        suffix = f": {result.message}" if result.message else ""
        print(f"{status} {result.name} ({result.elapsed:.2f}s){suffix}")
    return EXIT_OK if report.ok else EXIT_VIOLATION


HANDLERS = {
    "validate": cmd_validate,
    "paste": cmd_paste,
    "color": cmd_color,
    "colimit": cmd_colimit,
    "spectrum": cmd_spectrum,
    "pipeline": cmd_pipeline,
    "selftest": cmd_selftest,
}


def run(cfg: RunConfig) -> int:
    """Dispatch a validated request and map failures to exit codes."""
    try:
        return HANDLERS[cfg.command](cfg)
    except ConfigurationError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except PropertyViolation as e:
        print(f"property violation: {e}", file=sys.stderr)
        for check in e.checks:
            if not check.ok:
                print(f"  {check.name}: {check.law} {list(check.witness or ())}", file=sys.stderr)
        return EXIT_VIOLATION
    except CategoryError as e:
        print(f"property violation: {e}", file=sys.stderr)
        return EXIT_VIOLATION


def main(argv: Optional[Sequence[str]] = None) -> int:
    config.load_config()
    config.configure_logging(default_level="WARNING")
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig.from_args(args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    logger.debug("Running %s on %s with %d threads", cfg.command, cfg.source, cfg.threads)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
