#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Friedman test, Nemenyi post-hoc comparison and win/draw/loss grids.

Methods are compared over blocks (datasets, or the runs of one dataset):
every block ranks the methods by accuracy, 1 being the best, ties sharing
their average rank.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import chi2, rankdata

from gmfusion.errors import ConfigurationError

# Upper quantiles of the studentized range with infinite degrees of freedom,
# indexed by the number of compared methods (2..20)
STUDENTIZED_RANGE = {
    0.05: (
        2.772, 3.314, 3.633, 3.858, 4.030, 4.170, 4.286, 4.387, 4.474, 4.552,
        4.622, 4.685, 4.743, 4.796, 4.845, 4.891, 4.934, 4.974, 5.012,
    ),
    0.01: (
        3.643, 4.120, 4.403, 4.603, 4.757, 4.882, 4.987, 5.078, 5.157, 5.227,
        5.290, 5.348, 5.400, 5.448, 5.493, 5.535, 5.574, 5.611, 5.645,
    ),
}  # fmt: skip

WIN = 'win'
DRAW = 'draw'
LOSS = 'loss'


def _block_matrix(accuracies):
    """(methods, blocks x methods accuracy matrix) after validation."""
    methods = list(accuracies)
    if len(methods) < 2:
        raise ConfigurationError(f'At least 2 methods are needed, got {len(methods)}')
    columns = [np.asarray(accuracies[m], dtype=float).reshape(-1) for m in methods]
    n_blocks = columns[0].size
    if any(c.size != n_blocks for c in columns):
        raise ConfigurationError('Every method needs one accuracy per block')
    if n_blocks < 2:
        raise ConfigurationError(f'At least 2 datasets (blocks) are needed, got {n_blocks}')
    matrix = np.column_stack(columns)
    if not np.all(np.isfinite(matrix)):
        raise ConfigurationError('Accuracies must be finite')
    return methods, matrix


def rank_blocks(accuracies):
    """Per-block ranks (1 = highest accuracy, average rank on ties)."""
    methods, matrix = _block_matrix(accuracies)
    return methods, rankdata(-matrix, method='average', axis=1)


def average_ranks(accuracies):
    """{method: average rank over the blocks}."""
    methods, ranks = rank_blocks(accuracies)
    return dict(zip(methods, (float(r) for r in ranks.mean(axis=0))))


def friedman_test(accuracies):
    """Friedman chi-square statistic and its p-value (k-1 degrees of freedom).

    :param accuracies: {method: accuracy per block}, every method with the same blocks
    :return: (statistic, p_value)
    """
    methods, ranks = rank_blocks(accuracies)
    n, k = ranks.shape
    mean_ranks = ranks.mean(axis=0)
    statistic = 12.0 * n / (k * (k + 1)) * (np.sum(mean_ranks**2) - k * (k + 1) ** 2 / 4.0)
    statistic = max(0.0, float(statistic))
    return statistic, float(chi2.sf(statistic, k - 1))


def critical_difference(k, n_blocks, alpha=0.01):
    """Nemenyi critical difference of average ranks for k methods over n_blocks."""
    if not 0.0 < alpha < 1.0:
        raise ConfigurationError(f'alpha must be in (0,1), got {alpha}')
    table = STUDENTIZED_RANGE.get(alpha)
    if table is None:
        supported = ', '.join(map(str, STUDENTIZED_RANGE))
        raise ConfigurationError(f'No critical values for alpha={alpha} (supported: {supported})')
    if not 2 <= k <= len(table) + 1:
        raise ConfigurationError(f'Nemenyi critical values cover 2 to {len(table) + 1} methods, got {k}')
    q_alpha = table[k - 2] / math.sqrt(2.0)
    return q_alpha * math.sqrt(k * (k + 1) / (6.0 * n_blocks))


@dataclass
class StatReport:
    """Friedman test and Nemenyi pairwise decisions at level alpha."""

    methods: list
    statistic: float
    p_value: float
    alpha: float
    ranks: dict
    critical_difference: float
    n_blocks: int
    pairwise: dict = field(default_factory=dict)

    @property
    def rejected(self):
        return self.p_value < self.alpha

    def outcome(self, a, b):
        if (a, b) not in self.pairwise:
            raise ConfigurationError(f"Unknown method pair ({a}, {b}) (methods: {', '.join(self.methods)})")
        return self.pairwise[(a, b)]

    def as_dict(self):
        return {
            'methods': self.methods,
            'friedman_statistic': self.statistic,
            'friedman_p': self.p_value,
            'alpha': self.alpha,
            'rejected': self.rejected,
            'average_ranks': self.ranks,
            'critical_difference': self.critical_difference,
            'blocks': self.n_blocks,
            'pairwise': {f'{a} vs {b}': v for (a, b), v in self.pairwise.items()},
        }


def nemenyi_posthoc(accuracies, alpha=0.01):
    """Pairwise Nemenyi decisions, run when the Friedman test rejects at alpha.

    A pair is significant when its average rank gap exceeds the critical
    difference; the better average rank wins. Every pair is a draw when the
    Friedman test does not reject.
    """
    methods, ranks = rank_blocks(accuracies)
    cd = critical_difference(len(methods), ranks.shape[0], alpha)
    statistic, p_value = friedman_test(accuracies)
    mean_ranks = dict(zip(methods, (float(r) for r in ranks.mean(axis=0))))
    report = StatReport(methods, statistic, p_value, alpha, mean_ranks, cd, ranks.shape[0])
    for a in methods:
        for b in methods:
            if a == b:
                continue
            gap = mean_ranks[b] - mean_ranks[a]
            if not report.rejected or abs(gap) <= cd:
                report.pairwise[(a, b)] = DRAW
            else:
                report.pairwise[(a, b)] = WIN if gap > 0 else LOSS
    return report


@dataclass
class WinDrawLossGrid:
    """x - y - z counts of the proposed methods (rows) against the baselines (columns)."""

    proposed: list
    baselines: list
    n_datasets: int
    cells: dict = field(default_factory=dict)

    def cell(self, proposed, baseline):
        return self.cells[(proposed, baseline)]

    def format_cell(self, proposed, baseline):
        if (proposed, baseline) not in self.cells:
            return '-'
        return '{} - {} - {}'.format(*self.cells[(proposed, baseline)])

    def format(self):
        width = max([len(m) for m in self.proposed] + [8])
        cell_width = max([len(b) for b in self.baselines] + [len(f'{self.n_datasets} - 0 - 0')])
        lines = [' ' * width + ''.join(f'  {b:>{cell_width}}' for b in self.baselines)]
        for p in self.proposed:
            lines.append(f'{p:<{width}}' + ''.join(f'  {self.format_cell(p, b):>{cell_width}}' for b in self.baselines))
        return '\n'.join(lines)


def win_draw_loss(reports, proposed, baselines):
    """Count per-dataset significant wins, draws and losses.

    :param reports: {dataset: StatReport}
    :return: WinDrawLossGrid; x + y + z is the dataset count in every cell
    """
    reports = dict(reports)
    proposed, baselines = list(proposed), list(baselines)
    for report in reports.values():
        unknown = [m for m in proposed + baselines if m not in report.methods]
        if unknown:
            raise ConfigurationError(f"Unknown method(s) {', '.join(unknown)} (methods: {', '.join(report.methods)})")
    grid = WinDrawLossGrid(proposed, baselines, len(reports))
    for p in proposed:
        for b in baselines:
            if p == b:
                continue
            outcomes = [report.outcome(p, b) for report in reports.values()]
            grid.cells[(p, b)] = (outcomes.count(WIN), outcomes.count(DRAW), outcomes.count(LOSS))
    return grid


def per_dataset_reports(table, size, alpha=0.01):
    """{dataset: StatReport} over the per-run accuracies of one ensemble size.

    Datasets with fewer than 2 common runs are skipped.
    """
    reports = {}
    for dataset in table.datasets:
        accuracies = table.run_accuracies(dataset, size)
        if len(next(iter(accuracies.values()))) < 2:
            continue
        reports[dataset] = nemenyi_posthoc(accuracies, alpha)
    return reports


@dataclass
class SizeComparison:
    """Statistical comparison of the combiners for one ensemble size."""

    size: int
    reports: dict
    grid: object = None
    overall: object = None


@dataclass
class ExperimentReport:
    """A finished ResultTable and its per-size statistical comparisons."""

    table: object
    alpha: float
    seed: int
    proposed: list
    baselines: list
    sizes: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            'alpha': self.alpha,
            'seed': self.seed,
            'proposed': self.proposed,
            'baselines': self.baselines,
            'sizes': {
                str(size): {
                    'datasets': {name: report.as_dict() for name, report in comparison.reports.items()},
                    'overall': None if comparison.overall is None else comparison.overall.as_dict(),
                    'win_draw_loss': None
                    if comparison.grid is None
                    else {f'{p} vs {b}': list(v) for (p, b), v in comparison.grid.cells.items()},
                }
                for size, comparison in self.sizes.items()
            },
        }


def build_report(table, alpha=0.01, seed=0, proposed=None, baselines=None):
    """Run the per-dataset and across-dataset tests of every ensemble size.

    By default the GM combiners (h_*) are the proposed methods and the
    others the baselines. Nothing is compared with fewer than 2 combiners.
    """
    combiners = list(table.combiners)
    if proposed is None:
        proposed = [c for c in combiners if c.startswith('h_')] or combiners
    if baselines is None:
        baselines = [c for c in combiners if c not in proposed] or combiners
    report = ExperimentReport(table, alpha, seed, list(proposed), list(baselines))
    if len(combiners) < 2:
        return report
    for size in table.sizes:
        reports = per_dataset_reports(table, size, alpha)
        grid = win_draw_loss(reports, proposed, baselines) if reports else None
        overall = None
        if len(table.datasets) >= 2:
            means = table.mean_accuracies(size)
            if all(np.all(np.isfinite(v)) for v in means.values()):
                overall = nemenyi_posthoc(means, alpha)
        report.sizes[size] = SizeComparison(size, reports, grid, overall)
    return report
