import argparse
import json
import logging
import sys
from typing import List, Optional

from .catalog import list_examples, load_example
from .config import settings
from .domain import ConfigError, UnknownExample, VerificationReport
from .runner import VerificationRunner, load_config, parse_config

# Configure logging
logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger(__name__)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {value}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {value}")
    return value


def parse_args(argv: Optional[List[str]] = None) -> argparse.Namespace:
    run_flags = argparse.ArgumentParser(add_help=False)
    run_flags.add_argument(
        "--samples",
        type=_positive_int,
        default=None,
        help=f"Sample points per check (default {settings.samples})",
    )
    run_flags.add_argument(
        "--seed",
        type=int,
        default=None,
        help=f"Seed of the sample sequence (default {settings.seed})",
    )
    run_flags.add_argument(
        "--tol",
        type=_positive_float,
        default=None,
        help=f"Residual tolerance (default {settings.tol:g})",
    )
    run_flags.add_argument(
        "--format",
        choices=["text", "json"],
        default=None,
        help=f"Report format (default {settings.report_format})",
    )
    verbosity = run_flags.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", action="store_true", help="Warnings only")

    p = argparse.ArgumentParser(
        prog="metallic",
        description="Numerically verify metallic and Kenmotsu structure identities",
    )
    commands = p.add_subparsers(dest="command", required=True)

    verify = commands.add_parser(
        "verify", parents=[run_flags], help="Run the checks of a JSON config"
    )
    verify.add_argument("path", help="Path to the verification config")

    examples = commands.add_parser("examples", help="Built-in example catalog")
    actions = examples.add_subparsers(dest="action", required=True)
    actions.add_parser("list", help="List the bundled examples")
    run = actions.add_parser("run", parents=[run_flags], help="Run a bundled example")
    run.add_argument("name", help="Example name, see 'examples list'")
    return p.parse_args(argv)


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.INFO
    if verbose:
        level = logging.DEBUG
    elif quiet:
        level = logging.WARNING
    logging.getLogger().setLevel(level)


def render_text(report: VerificationReport) -> str:
    lines = []
    if report.title:
        lines.append(report.title)
        lines.append("=" * len(report.title))
    for check in report.checks:
        if not check.enforced:
            status = "INFO"
        else:
            status = "PASS" if check.passed else "FAIL"
        lines.append(
            f"[{status}] {check.name}: max {check.max_residual:.3e} "
            f"mean {check.mean_residual:.3e} tol {check.tol:.1e} n={check.samples}"
        )
        if check.worst_point and not check.passed:
            point = ", ".join(f"{x:.6g}" for x in check.worst_point)
            lines.append(f"    worst at ({point})")
        for note in check.notes:
            lines.append(f"    note: {note}")
    if report.notes:
        lines.append("notes:")
        lines.extend(f"  - {note}" for note in report.notes)
    verdict = "PASS" if report.passed else "FAIL"
    lines.append(
        f"RESULT: {verdict} ({len(report.checks)} results, "
        f"worst residual {report.worst_residual:.3e})"
    )
    return "\n".join(lines)


def render_json(report: VerificationReport) -> str:
    return json.dumps(report.to_dict(), indent=2, allow_nan=False, default=float)


def run(argv: Optional[List[str]] = None) -> int:
    """
    Entry point; returns the process exit code.

    0 when every enforced check passes, 1 when one fails and 2 when the
    config or the example name is rejected.
    """
    args = parse_args(argv)

    if args.command == "examples" and args.action == "list":
        for name, description in list_examples():
            print(f"{name:<24} {description}")
        return 0

    configure_logging(args.verbose, args.quiet)
    try:
        if args.command == "verify":
            logger.info(f"🚀 Verifying {args.path}")
            config = load_config(args.path)
        else:
            logger.info(f"🚀 Running example {args.name}")
            config = parse_config(load_example(args.name), source=args.name)
        runner = VerificationRunner(
            config, samples=args.samples, seed=args.seed, tol=args.tol
        )
        report = runner.run()
    except (ConfigError, UnknownExample) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    report_format = args.format or config.format or settings.report_format
    if report_format == "json":
        print(render_json(report))
    else:
        print(render_text(report))
    if report.passed:
        logger.info("🎉 All enforced checks passed")
        return 0
    logger.error(f"❌ {len(report.failed_checks)} checks failed")
    return 1


if __name__ == "__main__":
    sys.exit(run())
