#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""
I am your father...

...for all gmfusion report exports.
"""

import os

from gmfusion.errors import ConfigurationError
from gmfusion.globals import safe_makedirs
from gmfusion.logger import logger
from gmfusion.timer import Counter


class GmfExport:
    """Main class for gmfusion export IF.

    Child classes set filename and implement render(report) -> str.
    """

    filename = None

    def __init__(self, config=None, args=None, output_dir='.'):
        """Init the export class."""
        # Export name (gmf_<name>)
        self.export_name = self.__class__.__module__.split('.')[-1].replace('gmf_', '')
        logger.debug(f"Init export module {self.export_name}")

        self.config = config
        self.args = args
        self.output_dir = output_dir

    def _log_result_decorator(fct):
        """Log (DEBUG) the result of the function fct."""

        def wrapper(*args, **kw):
            counter = Counter()
            ret = fct(*args, **kw)
            duration = counter.get()
            class_module = args[0].__class__.__module__
            logger.debug(f"{class_module} {fct.__name__} return {ret} in {duration} seconds")
            return ret

        return wrapper

    def exit(self):
        """Close the export module."""
        logger.debug(f"Finalise export interface {self.export_name}")

    def path(self, filename=None):
        return os.path.join(self.output_dir, filename or self.filename)

    def render(self, report):
        raise NotImplementedError

    def write(self, filename, content):
        """Write content (str) to filename in the output directory and return the path."""
        safe_makedirs(self.output_dir)
        path = self.path(filename)
        try:
            with open(path, 'w', encoding='utf-8', newline='') as f:
                f.write(content)
        except OSError as e:
            raise ConfigurationError(f"Cannot write the {self.export_name} export file {path}: {e}")
        logger.info(f"Report exported to {self.export_name} file: {path}")
        return path

    @_log_result_decorator
    def export(self, report):
        """Write the report, return the list of written paths."""
        return [self.write(self.filename, self.render(report))]
