#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Win/draw/loss grid interface class."""

from gmfusion.exports.export import GmfExport
from gmfusion.globals import format_float


class Export(GmfExport):
    """This class manages the x - y - z grid export module.

    One block per ensemble size: the grid (x wins, y draws, z losses of the
    row method against the column method, counted over the datasets), then
    the Friedman statistic, p-value and decision of every dataset.
    """

    filename = 'stats.txt'

    def render(self, report):
        lines = [f'Win - draw - loss of the row methods (Friedman + Nemenyi, alpha={report.alpha})', '']
        if not report.sizes:
            lines.append('Less than 2 combiners: nothing to compare')
        for size, comparison in report.sizes.items():
            lines.append(f'Ensemble size {size}')
            if comparison.grid is None:
                lines.append('  no dataset with enough runs')
            else:
                lines.extend('  ' + line for line in comparison.grid.format().splitlines())
            for dataset, stat in comparison.reports.items():
                decision = 'significant' if stat.rejected else 'no significant difference'
                lines.append(
                    f'  {dataset}: friedman={format_float(stat.statistic, 4)} '
                    f'p={stat.p_value:.6g} cd={format_float(stat.critical_difference, 4)} {decision}'
                )
            if comparison.overall is not None:
                stat = comparison.overall
                decision = 'significant' if stat.rejected else 'no significant difference'
                lines.append(
                    f'  all datasets: friedman={format_float(stat.statistic, 4)} p={stat.p_value:.6g} {decision}'
                )
            lines.append('')
        return '\n'.join(lines)
