#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Init the gmfusion software."""

# Import system libs
import platform
import signal
import sys

from packaging.version import Version

# Global name
# Version should start and end with a numerical char
# See https://packaging.python.org/specifications/core-metadata/#version
__version__ = "1.0.0"
__author__ = 'The gmfusion authors'
__license__ = 'LGPLv3'

# Import numpy and scipy
try:
    from numpy import __version__ as numpy_version
    from scipy import __version__ as scipy_version
except ImportError as e:
    print(f'{e}: numpy and scipy are needed. gmfusion cannot start.')
    sys.exit(1)

# Check numpy and scipy versions
numpy_min_version = Version('1.22')
scipy_min_version = Version('1.7')
if Version(numpy_version) < numpy_min_version or Version(scipy_version) < scipy_min_version:
    print(f'numpy {numpy_min_version} and scipy {scipy_min_version} or higher are needed. gmfusion cannot start.')
    sys.exit(1)

# Import gmfusion libs
# Note: the command modes are imported on demand
from gmfusion.errors import EXIT_OK, GmfusionError, exit_code_for  # noqa: E402
from gmfusion.logger import logger  # noqa: E402
from gmfusion.timer import Counter  # noqa: E402

# The running command mode
mode = None


def __signal_handler(signal, frame):
    logger.debug(f"Signal {signal} caught")
    end(130)


def end(code=EXIT_OK):
    """Stop gmfusion."""
    if mode is not None:
        mode.end()

    logger.info(f"gmfusion stopped with exit code {code}")

    # The end...
    sys.exit(code)


def start(config, args):
    """Start the command and return its exit code."""

    # Load mode
    global mode

    start_duration = Counter()

    if args.command == 'run':
        from gmfusion.run import GmfusionRun as GmfusionMode
    elif args.command == 'combine':
        from gmfusion.combine import GmfusionCombine as GmfusionMode
    else:
        from gmfusion.props import GmfusionProps as GmfusionMode

    try:
        # Init the mode
        logger.info(f"Start {GmfusionMode.__name__} mode")
        mode = GmfusionMode(config=config, args=args)
        code = mode.serve()
    except GmfusionError as e:
        logger.critical(f"{e.__class__.__name__}: {e}")
        sys.stderr.write(f'gmfusion {args.command}: {e.__class__.__name__}: {e}\n')
        return exit_code_for(e)
    finally:
        if mode is not None:
            mode.end()
        mode = None

    logger.debug(f"gmfusion {args.command} done in {start_duration.get()} seconds")
    return code


def run_command(argv=None):
    """Parse argv, run the command and return its exit code (never raises GmfusionError)."""
    from gmfusion.main import GmfusionMain

    try:
        # Options from the command line are read first, then the configuration file
        core = GmfusionMain(argv)
    except GmfusionError as e:
        logger.critical(f"{e.__class__.__name__}: {e}")
        sys.stderr.write(f'gmfusion: {e.__class__.__name__}: {e}\n')
        return exit_code_for(e)

    return start(config=core.get_config(), args=core.get_args())


def main():
    """Main entry point for gmfusion.

    Select the command (run, combine or props)
    Run it...
    """
    # SIGHUP not available on Windows
    if sys.platform.startswith('win'):
        signal_list = (signal.SIGTERM, signal.SIGINT)
    else:
        signal_list = (signal.SIGTERM, signal.SIGINT, signal.SIGHUP)
    # Catch the kill signal
    for sig in signal_list:
        signal.signal(sig, __signal_handler)

    # Log gmfusion, numpy and scipy versions
    logger.info(f'Start gmfusion {__version__}')
    python_impl = platform.python_implementation()
    python_ver = platform.python_version()
    logger.info(f'{python_impl} {python_ver} ({sys.executable}), numpy {numpy_version} and scipy {scipy_version}')

    end(run_command())
