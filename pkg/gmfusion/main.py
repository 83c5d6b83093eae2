#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""gmfusion main class."""

import argparse
import sys
from logging import DEBUG
from warnings import simplefilter

from gmfusion import __version__, numpy_version, scipy_version
from gmfusion.config import Config
from gmfusion.ensemble import COMBINERS, TIE_POLICIES
from gmfusion.errors import EXIT_USAGE
from gmfusion.logger import LOG_FILENAME, logger

COMMANDS = ('run', 'combine', 'props')


class GmfusionArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the gmfusion usage code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f'{self.prog}: error: {message}\n')
        sys.exit(EXIT_USAGE)


class GmfusionMain:
    """Main class to manage a gmfusion command."""

    # Examples of use
    example_of_use = """
Examples of use:
  Run the cross-validated comparison described in a configuration file:
    $ gmfusion run experiment.conf

  Same experiment with another seed and output directory:
    $ gmfusion run experiment.conf --seed 42 --out /tmp/gmf

  Fuse one score matrix (one row per member) with H_Arith and print the trace:
    $ gmfusion combine scores.csv --combiner h_arith

  Check the aggregation and GM invariants on 10000 random inputs:
    $ gmfusion props --samples 10000
"""

    def __init__(self, argv=None):
        """Manage the command line arguments."""
        # Read the command line arguments
        self.args = self.parse_args(argv)

    def version_msg(self):
        """Return the version message."""
        version = f'gmfusion version:\t{__version__}\n'
        version += f'NumPy version:\t\t{numpy_version}\n'
        version += f'SciPy version:\t\t{scipy_version}\n'
        version += f'Log file:\t\t{LOG_FILENAME}\n'
        return version

    def init_args(self):
        """Init all the command line arguments."""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument('-d', '--debug', action='store_true', default=False, dest='debug', help='enable debug mode')
        common.add_argument('-C', '--config', dest='conf_file', help='path to the configuration file')
        common.add_argument('--seed', type=int, default=None, dest='seed', help='master seed (overrides the config)')
        common.add_argument('--out', default=None, dest='out', help='output directory (overrides the config)')

        parser = GmfusionArgumentParser(
            prog='gmfusion',
            conflict_handler='resolve',
            formatter_class=argparse.RawDescriptionHelpFormatter,
            epilog=self.example_of_use,
        )
        parser.add_argument('-V', '--version', action='version', version=self.version_msg())
        subparsers = parser.add_subparsers(dest='command', metavar='command', parser_class=GmfusionArgumentParser)
        subparsers.required = True

        run = subparsers.add_parser('run', parents=[common], help='run a cross-validated experiment')
        run.add_argument('config_path', nargs='?', default=None, help='experiment configuration file')

        combine = subparsers.add_parser('combine', parents=[common], help='fuse a score matrix file')
        combine.add_argument('scorefile', help='score file: one comma-separated row per member')
        combine.add_argument(
            '--combiner', default='h_arith', choices=COMBINERS, help='combiner name (default: h_arith)'
        )
        combine.add_argument(
            '--tie-policy', default=None, choices=TIE_POLICIES, dest='tie_policy', help='tie policy (default: config)'
        )
        combine.add_argument('--normalize', action='store_true', default=False, help='renormalize the score rows')
        combine.add_argument(
            '--trace', action=argparse.BooleanOptionalAction, default=True, help='print the per-class trace'
        )
        combine.add_argument('--labels', default=None, help='comma-separated class labels (overrides the header)')

        props = subparsers.add_parser('props', parents=[common], help='run the property suite')
        props.add_argument('--samples', type=int, default=10000, help='random inputs per property (default: 10000)')

        return parser

    def init_debug(self, args):
        """Init gmfusion debug mode."""
        if args.debug:
            logger.setLevel(DEBUG)
        else:
            simplefilter("ignore")

    def parse_args(self, argv=None):
        """Parse command line arguments."""
        args = self.init_args().parse_args(argv)

        # Init gmfusion debug mode
        self.init_debug(args)

        # The run command accepts the configuration file as a positional argument
        if args.command == 'run' and args.config_path is not None:
            args.conf_file = args.config_path

        # Load the configuration file, if it exists
        # The run command never falls back to a per-user or system-wide file
        self.config = Config(args.conf_file, search=args.command != 'run')

        if args.command == 'run' and self.config.loaded_config_file is None:
            logger.critical('The run command needs a configuration file')
            sys.stderr.write('gmfusion run: error: a configuration file is required\n')
            sys.exit(EXIT_USAGE)

        # Command line options take precedence over the configuration file
        if args.seed is None:
            args.seed = self.config.get_int_value('experiment', 'seed', 0)
        if getattr(args, 'tie_policy', '') is None:
            args.tie_policy = self.config.get_value('experiment', 'tie_policy', 'lowest-index')
        if getattr(args, 'samples', 1) < 1:
            sys.stderr.write('gmfusion props: error: --samples must be >= 1\n')
            sys.exit(EXIT_USAGE)

        self.args = args
        return args

    def get_config(self):
        """Return configuration file object."""
        return self.config

    def get_args(self):
        """Return the arguments."""
        return self.args
