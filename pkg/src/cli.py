"""Command-line interface for SCLV Lab.

Usage:
    sclv-lab volume --config config/minkowski_cone.yaml
    sclv-lab verify --config config/guenther_grw.yaml --out out/guenther
    sclv-lab ratio --config config/gromov_a.yaml --format csv
    sclv-lab counterexample
    sclv-lab oracle --config config/oracle.yaml --seed 7

Exit codes: 0 success, 1 internal or numerical failure, 2 input-domain error or
inapplicable verdict, 3 configuration error, 4 violated verdict.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .config import get_settings, load_run_config
from .exceptions import ConfigError, InputDomainError, LabError
from .formatters import ReportFormatter
from .main import COMMANDS, LabOrchestrator, verdict_status
from .models import VerdictStatus
from .verifiers import ratio_sum_counterexample

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_INPUT_DOMAIN = 2
EXIT_CONFIG = 3
EXIT_VIOLATED = 4


def setup_logging(verbose: bool = False, level_name: str = "INFO") -> None:
    """Configure logging for command-line runs."""
    level = logging.DEBUG if verbose else getattr(logging, level_name.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        datefmt="%Y-%m-%d %H:%M:%S",
    )
    logging.getLogger("src").setLevel(level)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", "-c", help="Run configuration (YAML)")
    common.add_argument("--out", "-o", help="Output directory (overrides output.out_dir)")
    common.add_argument(
        "--format",
        choices=("json", "csv", "both"),
        help="Output format (overrides output.format)",
    )
    common.add_argument("--threads", type=int, help="Worker threads (overrides SCLV_THREADS)")
    common.add_argument("--seed", type=int, help="Monte-Carlo seed (oracle only)")
    common.add_argument("--verbose", "-v", action="store_true", help="Enable verbose logging")

    parser = argparse.ArgumentParser(
        prog="sclv-lab",
        description="Numerical laboratory for volume comparison of star-shaped tangent subsets",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    helps = {
        "volume": "Volume of exp_p(U) and of its model counterpart",
        "verify": "Check a comparison theorem and report a verdict",
        "ratio": "Ratio curve V(r) = vol(U^r)/vol(U0^r)",
        "expand": "Small-t expansion fits and local comparisons",
        "counterexample": "Exact ratio-sum counterexample",
        "search": "Search a family for increases of V(r)",
        "oracle": "Monte-Carlo volume oracle",
    }
    for command in COMMANDS:
        sub.add_parser(command, parents=[common], help=helps[command])
    return parser


def _run_counterexample(args: argparse.Namespace) -> int:
    formatter = ReportFormatter()
    report = ratio_sum_counterexample()
    sys.stdout.write(formatter.format_counterexample(report))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "counterexample.json", "w", encoding="utf-8", newline="\n") as f:
            f.write(formatter.to_json({"report": report}))
    return EXIT_OK if report.reversed_everywhere else EXIT_VIOLATED


def run(args: argparse.Namespace) -> int:
    """Execute a parsed command and map the outcome to an exit code."""
    if args.command == "counterexample" and not args.config:
        return _run_counterexample(args)
    if not args.config:
        raise ConfigError(f"the {args.command} command needs --config")

    config = load_run_config(args.config)
    orchestrator = LabOrchestrator(config, threads=args.threads)
    result = orchestrator.run(args.command, seed=args.seed)
    orchestrator.write_outputs(result, args.out, args.format)
    sys.stdout.write(orchestrator.formatter.format_summary(args.command, result["report"]))

    status = verdict_status(result)
    if status is VerdictStatus.INAPPLICABLE:
        return EXIT_INPUT_DOMAIN
    if status is VerdictStatus.VIOLATED:
        return EXIT_VIOLATED
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ConfigError as e:
        setup_logging(args.verbose)
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    setup_logging(args.verbose, settings.log_level)

    try:
        return run(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG
    except InputDomainError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INPUT_DOMAIN
    except LabError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_INTERNAL
    except Exception:
        logger.exception("Unexpected failure")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
