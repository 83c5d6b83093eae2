#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""CSV interface class: per-run results and timing."""

import csv
import io

from gmfusion.evaluation import timing_report
from gmfusion.exports.export import GmfExport
from gmfusion.globals import format_float

RESULTS_HEADER = ['dataset', 'size', 'combiner', 'run', 'fold', 'accuracy', 'seconds']
TIMING_HEADER = ['dataset', 'size', 'combiner', 'seconds']


def to_csv(header, rows):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


class Export(GmfExport):
    """This class manages the CSV export module."""

    filename = 'results.csv'
    timing_filename = 'timing.csv'

    def render(self, report):
        rows = [
            [r.dataset, r.size, r.combiner, r.run, r.fold, format_float(r.accuracy, 10), format_float(r.seconds, 6)]
            for r in report.table.records()
        ]
        return to_csv(RESULTS_HEADER, rows)

    def render_timing(self, report):
        """Seconds per (dataset, size, combiner), then the per (size, combiner) totals under dataset '*'."""
        rows = [[d, s, c, format_float(v, 6)] for (d, s, c), v in timing_report(report.table, by_dataset=True).items()]
        rows.extend(['*', s, c, format_float(v, 6)] for (s, c), v in timing_report(report.table).items())
        return to_csv(TIMING_HEADER, rows)

    @GmfExport._log_result_decorator
    def export(self, report):
        paths = [self.write(self.filename, self.render(report))]
        if self.args is None or getattr(self.args, 'timing', True):
            paths.append(self.write(self.timing_filename, self.render_timing(report)))
        return paths
