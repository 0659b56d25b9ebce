"""
Command-line view for the HeisenBH subelliptic geometry engine.
Subcommands verify, flow and energy over a RunConfig.
"""

import argparse
import logging
import sys
from typing import List, Optional

from config.constants import CHECK_IDS, EXIT_FAILURE, EXIT_OK, EXIT_USAGE
from config.run_config import RunConfig, load_run_config
from models.errors import ChartOverflowError, ConfigError, FieldFormatError, GridError, NonFiniteError, \
    UnknownCheckError
from utils.formatters import FormatterUtils
from utils.helpers import HelperUtils
from verification.oracle_suite import OracleSuite
from viewmodels.flow_viewmodel import FlowViewModel
from viewmodels.report_viewmodel import ReportViewModel

logger = logging.getLogger(__name__)

USAGE_ERRORS = (ConfigError, FieldFormatError, GridError, UnknownCheckError, OSError)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='heisenbh',
                                     description='Subelliptic harmonic and biharmonic maps on the Heisenberg group.')
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', help='run configuration file (key = value lines)')
    common.add_argument('--out', help='output directory (overrides output.dir)')
    common.add_argument('--seed', type=int, help='RNG seed (overrides seed)')
    common.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR (overrides log.level)')
    subparsers = parser.add_subparsers(dest='command', required=True)

    verify = subparsers.add_parser('verify', parents=[common], help='run the identity oracle suite')
    verify.add_argument('--check', action='append', metavar='ID',
                        help=f"check id, repeatable; one of: {', '.join(CHECK_IDS)}")
    verify.set_defaults(handler=cmd_verify)

    flow = subparsers.add_parser('flow', parents=[common], help='run the descent flow')
    flow.set_defaults(handler=cmd_flow)

    energy = subparsers.add_parser('energy', parents=[common], help='print energies of a map as JSON')
    energy.add_argument('--map', help='hfield map file (default: the configured initial map)')
    energy.set_defaults(handler=cmd_energy)
    return parser


def _load(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config).with_overrides(output_dir=args.out, seed=args.seed,
                                                         log_level=args.log_level)
    HelperUtils.setup_logging(config.log_level)
    return config


def cmd_verify(args: argparse.Namespace) -> int:
    config = _load(args)
    suite = OracleSuite(config.suite_settings())
    report = suite.run_all(config.verify_levels, config.seed, args.check)
    viewmodel = ReportViewModel(report)
    viewmodel.write_outputs(config.output_dir)
    sys.stdout.write(viewmodel.get_report_text())
    return viewmodel.get_exit_code()


def cmd_flow(args: argparse.Namespace) -> int:
    config = _load(args)
    viewmodel = FlowViewModel(config)
    _, trace = viewmodel.run()
    viewmodel.write_outputs(config.output_dir)
    if trace.aborted:
        logger.error(f"Flow aborted at step {trace.abort_step}: {trace.abort_reason}")
    return viewmodel.get_exit_code()


def cmd_energy(args: argparse.Namespace) -> int:
    config = _load(args)
    viewmodel = FlowViewModel(config)
    phi = viewmodel.initial_map(args.map)
    sys.stdout.write(FormatterUtils.to_json(viewmodel.energy_summary(phi)))
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments, dispatch, and map errors onto exit codes 0/1/2."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        return args.handler(args)
    except USAGE_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_USAGE
    except (ChartOverflowError, NonFiniteError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_FAILURE
