#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Manage the gmfusion props command."""

import os

from gmfusion.errors import EXIT_OK, EXIT_PROPERTY, ConfigurationError
from gmfusion.globals import printandflush, safe_makedirs
from gmfusion.logger import logger
from gmfusion.properties import run_property_suite


def format_results(results):
    lines = []
    for r in results:
        status = 'PASS' if r.passed else 'FAIL'
        name = f'{r.name} [control]' if r.control else r.name
        line = f'{status} {name} ({r.checked} checks)'
        if r.witness is not None and (not r.passed or r.control):
            line += f': {r.witness}'
        lines.append(line)
    failed = sum(1 for r in results if not r.passed)
    lines.append(f'{len(results) - failed} passed, {failed} failed')
    return lines


class GmfusionProps:
    """This class runs the property suite."""

    def __init__(self, config=None, args=None):
        self.config = config
        self.args = args

    def serve(self):
        results = run_property_suite(samples=self.args.samples, seed=self.args.seed)
        lines = format_results(results)
        for line in lines:
            printandflush(line)
        if self.args.out:
            path = os.path.join(self.args.out, 'props.txt')
            try:
                safe_makedirs(self.args.out)
                with open(path, 'w', encoding='utf-8') as f:
                    f.write('\n'.join(lines) + '\n')
            except OSError as e:
                raise ConfigurationError(f'Cannot write the property report {path}: {e}')
            logger.info(f'Property report written to {path}')
        failed = [r.name for r in results if not r.passed]
        if failed:
            logger.error(f"Failed properties: {', '.join(failed)}")
            return EXIT_PROPERTY
        return EXIT_OK

    def end(self):
        pass
