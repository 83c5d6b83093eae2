#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Manage the gmfusion run command."""

import traceback
from importlib import import_module

from gmfusion.errors import EXIT_DATA, EXIT_OK, ConfigurationError
from gmfusion.evaluation import run_experiment
from gmfusion.globals import printandflush
from gmfusion.logger import logger
from gmfusion.statistics import build_report
from gmfusion.timer import Counter


class GmfusionRun:
    """This class runs an experiment and writes its reports."""

    def __init__(self, config=None, args=None):
        self.config = config
        self.args = args

        # Validated before any work
        self.experiment = config.experiment_config(seed=args.seed, output_dir=args.out)
        self.args.timing = self.experiment.timing

        self.exports = self.load_exports()

    def load_exports(self):
        """Load the exporters listed in the [outputs] section."""
        exports = {}
        for name in self.config.get_list_value('outputs', 'exports', []):
            try:
                module = import_module('gmfusion.exports.gmf_' + name)
            except ImportError as e:
                logger.critical(f"Error while initializing the {name} export ({e})")
                logger.error(traceback.format_exc())
                raise ConfigurationError(f"Unknown export '{name}'")
            exports[name] = module.Export(config=self.config, args=self.args, output_dir=self.experiment.output_dir)
        logger.debug(f"Active exports list: {list(exports)}")
        return exports

    def summary_export(self):
        if 'summary' in self.exports:
            return self.exports['summary']
        return import_module('gmfusion.exports.gmf_summary').Export(config=self.config, args=self.args)

    def serve(self):
        """Run the experiment, export and print the summary. Return the exit code."""
        counter = Counter()
        table = run_experiment(self.experiment)
        report = build_report(table, alpha=self.experiment.alpha, seed=self.experiment.seed)
        for export in self.exports.values():
            export.export(report)
        printandflush(self.summary_export().render(report))
        logger.info(f"Run done in {counter.get():.1f} seconds")

        if not any(table.cells.values()):
            logger.error("Every experiment cell failed")
            return EXIT_DATA
        return EXIT_OK

    def end(self):
        """End of the run command."""
        for export in self.exports.values():
            export.exit()
