#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Plain-text summary: mean +/- std accuracy and average rank per combiner."""

import math

from gmfusion.evaluation import timing_report
from gmfusion.exports.export import GmfExport
from gmfusion.globals import format_float


def _acc(value):
    return '-' if math.isnan(value) else format_float(value, 4)


class Export(GmfExport):
    """This class manages the summary export module."""

    filename = 'summary.txt'

    def render(self, report):
        table = report.table
        width = max(len(c) for c in table.combiners) + 2
        lines = [
            'gmfusion experiment summary',
            f'seed={report.seed} folds={table.folds} repeats={table.repeats} alpha={report.alpha}',
            '',
        ]

        for dataset in table.datasets:
            lines.append(f'Dataset {dataset} (majority-class baseline {_acc(table.baseline(dataset))})')
            for size in table.sizes:
                ranks = {}
                if len(table.combiners) > 1 and len(next(iter(table.run_accuracies(dataset, size).values()))) > 1:
                    ranks = table.average_ranks(size, dataset)
                lines.append(f'  size {size}')
                for c in table.combiners:
                    acc = f'{_acc(table.mean(dataset, size, c))} +/- {_acc(table.std(dataset, size, c))}'
                    rank = format_float(ranks[c], 2) if c in ranks else '-'
                    runs = len(table.cells[(dataset, size, c)])
                    lines.append(f'    {c:<{width}}{acc:<20} rank {rank:>5}  runs {runs}')
            lines.append('')

        lines.append('Mean accuracy over datasets')
        lines.append('  size  ' + ''.join(f'{c:>{width + 6}}' for c in table.combiners))
        for size in table.sizes:
            row = ''.join(f'{_acc(table.overall_mean(size, c)):>{width + 6}}' for c in table.combiners)
            lines.append(f'  {size:<6}{row}')
        lines.append(
            '  average over sizes'
            + ''.join(
                f' {c}={_acc(sum(table.overall_mean(s, c) for s in table.sizes) / len(table.sizes))}'
                for c in table.combiners
            )
        )
        lines.append('  best combiner per size: ' + ', '.join(f'{s}: {table.best_combiner(s)}' for s in table.sizes))
        if len(table.datasets) > 1 and len(table.combiners) > 1:
            lines.append('  average rank over datasets:')
            for size in table.sizes:
                # Failed cells leave nan means, which can not be ranked
                if any(math.isnan(v) for values in table.mean_accuracies(size).values() for v in values):
                    lines.append(f'    size {size}: -')
                    continue
                ranks = table.average_ranks(size)
                lines.append(f'    size {size}: ' + ', '.join(f'{c}={format_float(r, 2)}' for c, r in ranks.items()))
        lines.append('')

        if self.args is None or getattr(self.args, 'timing', True):
            lines.append('Execution time (seconds, train + test)')
            for (size, combiner), seconds in timing_report(table).items():
                lines.append(f'  size {size:<4} {combiner:<{width}}{format_float(seconds, 3)}')
            lines.append('')

        if table.failures:
            lines.append(f'Failed cells: {len(table.failures)}')
            for failure in table.failures:
                lines.append(
                    f'  {failure.dataset} size={failure.size} run={failure.run} fold={failure.fold}: {failure.message}'
                )
            lines.append('')
        return '\n'.join(lines)
