"""
Command-line entry point.

    python -m latentgsa run --config configs/model1.yaml [--seed N] [--out DIR]
    python -m latentgsa sweep --config configs/model3_sweep.yaml
    python -m latentgsa population --config configs/pbpk_population.yaml
    python -m latentgsa schema --out DIR
"""
import argparse
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import yaml
from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from latentgsa import __version__
from latentgsa.errors import ConfigError, GSAError
from latentgsa.models.schemas import RunConfig
from latentgsa.services import reporting, runner

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_PARTIAL = 4

DEFAULT_OUTPUT_DIR = "results"
OUT_HELP = f"output directory (default: $LATENTGSA_OUTPUT_DIR or {DEFAULT_OUTPUT_DIR})"


# --------------------------------------------------
# Setup
# --------------------------------------------------
def configure_logging(level: Optional[str] = None) -> None:
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or os.getenv("LATENTGSA_LOG_LEVEL", "INFO")).upper(),
        format="<green>{time:HH:mm:ss}</green> | <level>{level: <8}</level> | {message}",
    )


def load_config(path: Path, seed: Optional[int] = None, out: Optional[str] = None) -> RunConfig:
    """Parse and validate a YAML run configuration; CLI overrides win."""
    try:
        with open(path) as f:
            data = yaml.safe_load(f) or {}
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML in {path}: {e}") from e

    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    if seed is not None:
        data["seed"] = seed
    if out is not None:
        data["output_dir"] = out

    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise ConfigError(f"{path}: {e}") from e


def output_dir(config: RunConfig) -> Path:
    return Path(config.output_dir or os.getenv("LATENTGSA_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR)


# --------------------------------------------------
# Commands
# --------------------------------------------------
def analysis_service(args) -> runner.AnalysisService:
    config = load_config(args.config, args.seed, args.out)
    return runner.AnalysisService(config, output_dir(config))


def cmd_run(args) -> int:
    return analysis_service(args).run().exit_code


def cmd_sweep(args) -> int:
    return analysis_service(args).sweep().exit_code


def cmd_population(args) -> int:
    service = analysis_service(args)
    try:
        service.population()
    except ConfigError:
        raise
    except GSAError as e:
        logger.error(f"Population simulation failed: {type(e).__name__}: {e}")
        return EXIT_NUMERICAL
    return EXIT_OK


def cmd_schema(args) -> int:
    out = Path(args.out or os.getenv("LATENTGSA_OUTPUT_DIR") or DEFAULT_OUTPUT_DIR)
    out.mkdir(parents=True, exist_ok=True)
    logger.info(f"Schema written to {reporting.write_schema(out)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latentgsa",
        description="Variance-based sensitivity analysis with correlated inputs",
        epilog=(
            "environment: LATENTGSA_OUTPUT_DIR sets the default output directory, "
            "LATENTGSA_LOG_LEVEL the default log level (.env is read at start-up)"
        ),
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--log-level",
        default=None,
        help="DEBUG, INFO, WARNING or ERROR (default: $LATENTGSA_LOG_LEVEL or INFO)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, func, help_text in (
        ("run", cmd_run, "run every configured method at the configured rho"),
        ("sweep", cmd_sweep, "run every configured method over rho_sweep"),
        ("population", cmd_population, "simulate a virtual PBPK population"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", type=Path, required=True)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None, help=OUT_HELP)
        p.set_defaults(func=func)

    p = sub.add_parser("schema", help="write the report JSON schema")
    p.add_argument("--out", default=None, help=OUT_HELP)
    p.set_defaults(func=cmd_schema)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
