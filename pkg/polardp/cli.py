"""Command line entry point: `python -m polardp <subcommand> [--config FILE] [overrides]`.

Exit codes: 0 success, 2 invalid configuration or arguments, 3 acceptance check failed.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from .config import ExperimentConfig
from .error import AcceptanceCheckFailed, ConfigurationError, InvalidArgument, MalformedDocument
from .simulation import ExperimentRunner, check_acceptance, write_records, write_summary

logger = logging.getLogger(__name__)

SUBCOMMANDS = {
    "construct": "construct",
    "quantize": "quantize",
    "dp": "dp_end_to_end",
    "nestedness": "nestedness_scan",
    "fb": "fb_curve",
}

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CHECK = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polardp", description="Nested polar codes for the binary dirty-paper channel")
    commands = parser.add_subparsers(dest="command", required=True)
    for name, kind in SUBCOMMANDS.items():
        command = commands.add_parser(name, help=f"run a {kind} experiment")
        command.add_argument("--config", type=str, metavar="FILENAME", help="JSON experiment configuration")
        command.add_argument("--seed", type=int, help="master seed (required unless the config sets one)")
        command.add_argument("--trials", type=int, help="number of Monte-Carlo trials")
        command.add_argument("--threads", type=int, help="worker processes")
        command.add_argument("--out", type=str, metavar="FILENAME",
                             help="summary CSV (construction JSON for construct); stdout when omitted")
        command.add_argument("--records", type=str, metavar="FILENAME", help="per-trial JSON-lines records")
        command.add_argument("--check", action="store_true", help="fail with exit code 3 outside acceptance windows")
        command.add_argument("--progress", action="store_true", help="show progress bars")
        command.add_argument("--log-level", default="INFO", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    return parser


def load_config(args: argparse.Namespace) -> ExperimentConfig:
    kind = SUBCOMMANDS[args.command]
    config = ExperimentConfig.from_file(args.config) if args.config else ExperimentConfig.get_default(kind, None)
    if config.kind != kind:
        raise ConfigurationError(msg=f"{args.config} describes a {config.kind} experiment, not {kind}", field="kind")
    for name in ("seed", "trials", "threads", "out", "records"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, "master_seed" if name == "seed" else name, value)
    return config.validate()


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(asctime)s %(levelname)s %(message)s",
                        datefmt="%Y-%m-%d %H:%M:%S")
    try:
        config = load_config(args)
        runner = ExperimentRunner(config, progress=args.progress)
        rows = runner.run()
        # construct writes its JSON document to --out itself
        if not (config.kind == "construct" and config.out):
            write_summary(config.out or sys.stdout, rows)
        if config.records:
            write_records(config.records, runner.records, runner.config_hash)
        if args.check:
            if not config.acceptance:
                logger.warning("--check given but the configuration has no acceptance windows")
            check_acceptance(rows, config.acceptance)
    except (ConfigurationError, MalformedDocument, InvalidArgument) as err:
        logger.error(str(err))
        return EXIT_CONFIG
    except AcceptanceCheckFailed as err:
        logger.error(str(err))
        return EXIT_CHECK
    except Exception as err:
        logger.error(f"experiment aborted: {err!r}")
        raise
    return EXIT_OK
