# -*- coding: utf-8 -*-
"""
Command-line interface for ptlab.
"""
import sys
import os
import argparse
import logging
from pathlib import Path
from typing import Optional

from . import __version__
from .config import THREADS_ENV_VAR
from .create_examples import create_example_configs
from .errors import (EXIT_CONFIG_ERROR, EXIT_NUMERICAL_FAILURE, EXIT_OK, ConfigError, DomainError,
                     NumericalError)
from .runconfig import parse_config
from .scan import run, write_output

APP_NAME = "ptlab"
LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=APP_NAME,
        description="Spectra, effective couplings and pseudo-PT thresholds of modulated\n"
                    "non-Hermitian tight-binding lattices.",
        formatter_class=argparse.RawTextHelpFormatter,  # Keep newlines in help text
        epilog="Example: ptlab examples demo && ptlab run demo/ptlab_examples/chain_kappa_scan.json --out scan.csv"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "-v", "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr (-v for info, -vv for debug)."
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run the scenario of a JSON config and write CSV.")
    run_parser.add_argument("config", help="Path to the JSON run configuration.")
    run_parser.add_argument(
        "--out",
        default=None,
        help="CSV output path. Overrides the config's 'output'.\nWithout either, the main table goes to stdout."
    )
    run_parser.add_argument(
        "--threads",
        type=int,
        default=None,
        help=f"Worker threads for scans. Falls back to ${THREADS_ENV_VAR}, then 1."
    )

    validate_parser = commands.add_parser("validate", help="Check a JSON run configuration without running it.")
    validate_parser.add_argument("config", help="Path to the JSON run configuration.")

    examples_parser = commands.add_parser("examples", help="Write example configurations into a directory.")
    examples_parser.add_argument("directory", help="Directory in which to create the examples folder.")
    return parser


def resolve_threads(flag: Optional[int]) -> int:
    """--threads wins over the environment; the default is 1."""
    if flag is not None:
        if flag < 1:
            raise ConfigError(f"--threads must be >= 1, got {flag}")
        return flag
    value = os.environ.get(THREADS_ENV_VAR)
    if value is None or value.strip() == "":
        return 1
    try:
        threads = int(value)
    except ValueError:
        raise ConfigError(f"{THREADS_ENV_VAR} must be an integer, got {value!r}")
    if threads < 1:
        raise ConfigError(f"{THREADS_ENV_VAR} must be >= 1, got {threads}")
    return threads


def load_config(path: str):
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except (IOError, OSError) as e:
        raise ConfigError(f"Could not read config file '{path}': {e}")
    return parse_config(text)


def _run(args) -> int:
    config = load_config(args.config)
    threads = resolve_threads(args.threads)
    output = run(config, threads)
    out = args.out or config.output
    written = write_output(output, Path(out) if out else None)
    for path in written:
        logger.info("Wrote %s", path)
    if output.overflow:
        print("Error: propagation overflowed; the trace ends at the last finite state.", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    return EXIT_OK


def _validate(args) -> int:
    config = load_config(args.config)
    print(f"{args.config}: valid {config.scenario.value} configuration "
          f"({config.lattice.n_sites} sites, {len(config.modulation.tones)} tone(s))")
    return EXIT_OK


def _examples(args) -> int:
    success, message, _ = create_example_configs(Path(args.directory))
    if not success:
        print(message, file=sys.stderr)
        return EXIT_CONFIG_ERROR
    print(message)
    return EXIT_OK


def dispatch(args) -> int:
    handlers = {"run": _run, "validate": _validate, "examples": _examples}
    try:
        return handlers[args.command](args)
    except (ConfigError, DomainError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR
    except NumericalError as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_NUMERICAL_FAILURE
    except (IOError, OSError) as e:
        print(f"Error: Could not write output: {e}", file=sys.stderr)
        return EXIT_CONFIG_ERROR


def main(argv=None):
    """Main function of the command-line tool."""
    parser = build_parser()
    args = parser.parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(stream=sys.stderr, level=level, format=LOG_FORMAT)
    sys.exit(dispatch(args))


if __name__ == '__main__':
    main()
