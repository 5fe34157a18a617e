"""
Main entry point for the epoint command-line tool.

This module parses the command line, configures logging and dispatches to
the subcommand handlers: find-ep, vector, sweep and encircle.
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

# Load environment variables from .env file (if available)
try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    # dotenv not available, continue without it
    pass

from config import COMMANDS, EXIT_BAD_INPUT, LOG_LEVEL
from errors import ConfigError
from handlers import HANDLERS, load_run_config

# Configure logging; stdout is reserved for reports
logging.basicConfig(
    format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING),
    stream=sys.stderr,
)

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epoint",
        description="Exceptional points of two-level non-Hermitian Hamiltonians H = H0 + lambda H1.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for name, help_text in COMMANDS.items():
        sub = subparsers.add_parser(name, help=help_text, description=help_text)
        sub.add_argument("--config", required=True, type=Path, help="JSON run configuration")
        sub.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")
        sub.add_argument("--seed", type=int, default=None, help="seed for random model sweeps")
    return parser


def _config_error_message(path: Path, error: ConfigError) -> str:
    if error.line:
        return f"{path}:{error.line}:{error.column}: {error}"
    return f"{path}: {error}"


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # argparse exits 2 on usage errors, which is the degenerate-model code here
        return EXIT_BAD_INPUT if e.code else 0

    logger.info("[MAIN] Command %s with config %s", args.command, args.config)
    try:
        config = load_run_config(args.config, seed=args.seed, out=args.out)
    except ConfigError as e:
        message = _config_error_message(args.config, e)
        logger.error("[MAIN] %s", message)
        print(f"error: {message}", file=sys.stderr)
        return EXIT_BAD_INPUT

    exit_code = HANDLERS[args.command](config)
    logger.info("[MAIN] %s finished with exit code %d", args.command, exit_code)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
