#!/usr/bin/env python
#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""gmfusion unitary tests suite: cross-validation harness and statistical tests."""

import os
import unittest
from dataclasses import replace

import numpy as np
from sklearn.model_selection import StratifiedKFold

from gmfusion import __version__
from gmfusion.config import Config
from gmfusion.dataset import Dataset, load_dataset
from gmfusion.errors import ConfigurationError
from gmfusion.evaluation import (
    ExperimentConfig,
    ResultTable,
    RunRecord,
    run_experiment,
    stratified_kfold,
    timing_report,
)
from gmfusion.globals import json_dumps
from gmfusion.statistics import (
    DRAW,
    LOSS,
    WIN,
    average_ranks,
    build_report,
    critical_difference,
    friedman_test,
    nemenyi_posthoc,
    win_draw_loss,
)

# Global variables
# =================

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
CONF_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'conf')


def labelled(counts, name='toy'):
    """Dataset with counts[j] instances of class j and one numeric feature."""
    labels = [f'k{j}' for j, c in enumerate(counts) for _ in range(c)]
    X = np.arange(len(labels), dtype=float).reshape(-1, 1)
    return Dataset.from_arrays(name, X, labels)


def blobs(n_per_class=20, seed=0):
    rng = np.random.default_rng(seed)
    centers = ((0.0, 0.0), (4.0, 4.0), (0.0, 4.0))
    X = np.vstack([rng.normal(c, 0.6, size=(n_per_class, 2)) for c in centers])
    labels = [f'c{j}' for j in range(3) for _ in range(n_per_class)]
    return Dataset.from_arrays('blobs', X, labels)


def dominant_accuracies(n_blocks=10):
    """Method a is best on every block, b and c alternate behind it."""
    a = np.full(n_blocks, 0.9)
    b = np.array([0.8 if i % 2 else 0.7 for i in range(n_blocks)])
    c = np.array([0.7 if i % 2 else 0.8 for i in range(n_blocks)])
    return {'a': a, 'b': b, 'c': c}


def small_config(**kwargs):
    options = {
        'datasets': [],
        'sizes': [3],
        'combiners': ['arith', 'vote', 'h_arith'],
        'folds': 5,
        'repeats': 2,
        'seed': 4,
        'timing': False,
    }
    options.update(kwargs)
    return ExperimentConfig(**options)


# Unitest class
# ==============
print(f'Unitary tests for gmfusion {__version__} evaluation')


class TestGmfusionEval(unittest.TestCase):
    """Test the experiment harness and the statistics."""

    def setUp(self):
        """The function is called *every time* before test_*."""
        print('\n' + '=' * 78)

    def test_000_kfold_partition(self):
        """Check that the folds partition the instances."""
        print('INFO: [TEST_000] Check the fold partition')
        plan = stratified_kfold(labelled([50, 50]), k=10, seed=1)
        self.assertTrue(plan.stratified)
        np.testing.assert_array_equal(plan.fold_sizes(), [10] * 10)
        seen = np.concatenate([test for _, test in plan.folds()])
        np.testing.assert_array_equal(np.sort(seen), np.arange(100))
        for train, test in plan.folds():
            self.assertEqual(len(np.intersect1d(train, test)), 0)
            self.assertEqual(len(train) + len(test), 100)

    def test_001_kfold_stratification(self):
        """Check the per-fold class shares."""
        print('INFO: [TEST_001] Check the stratification')
        d = labelled([60, 40])
        plan = stratified_kfold(d, k=10, seed=2)
        for _, test in plan.folds():
            counts = np.bincount(d.y[test], minlength=2)
            self.assertLessEqual(abs(counts[0] - 6), 1)
            self.assertLessEqual(abs(counts[1] - 4), 1)
        d = labelled([23, 17, 9])
        plan = stratified_kfold(d, k=5, seed=2)
        for _, test in plan.folds():
            counts = np.bincount(d.y[test], minlength=3)
            expected = d.class_counts() / 5.0
            self.assertTrue(np.all(np.abs(counts - expected) <= 1.0))

    def test_002_kfold_determinism(self):
        """Check that the fold plan depends on the seed only."""
        print('INFO: [TEST_002] Check the fold determinism')
        d = labelled([30, 30])
        a = stratified_kfold(d, k=5, seed=7).assignments
        b = stratified_kfold(d, k=5, seed=7).assignments
        c = stratified_kfold(d, k=5, seed=8).assignments
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_003_kfold_edge_cases(self):
        """Check the fallback and the errors of the fold plan."""
        print('INFO: [TEST_003] Check the fold edge cases')
        plan = stratified_kfold(labelled([20, 3]), k=5, seed=0)
        self.assertFalse(plan.stratified)
        self.assertEqual(int(plan.fold_sizes().sum()), 23)
        with self.assertRaises(ConfigurationError):
            stratified_kfold(labelled([3, 3]), k=7)
        with self.assertRaises(ConfigurationError):
            stratified_kfold(labelled([3, 3]), k=1)

    def test_004_experiment_config(self):
        """Check the experiment configuration validation."""
        print('INFO: [TEST_004] Check the experiment configuration')
        for bad in (
            {'sizes': [1]},
            {'sizes': []},
            {'combiners': ['h_mode']},
            {'combiners': ['arith', 'arith']},
            {'folds': 1},
            {'repeats': 0},
            {'alpha': 1.5},
            {'tie_policy': 'coin'},
            {'composition': 'knn:0'},
        ):
            with self.assertRaises(ConfigurationError, msg=str(bad)):
                small_config(**bad)
        with self.assertRaises(ConfigurationError) as ctx:
            small_config(combiners=['h_mode'])
        self.assertIn('h_arith', str(ctx.exception))
        self.assertEqual(small_config().worker_count(), 1)
        self.assertEqual(small_config(parallel=True, workers=2).worker_count(), 2)
        self.assertGreaterEqual(small_config(parallel=True).worker_count(), 1)

    def test_005_kfold_splitter(self):
        """Check that the stratified plan is the StratifiedKFold split of the seed."""
        print('INFO: [TEST_005] Check the fold plan against StratifiedKFold')
        d = labelled([23, 17, 9])
        plan = stratified_kfold(d, k=3, seed=12)
        splitter = StratifiedKFold(n_splits=3, shuffle=True, random_state=12)
        for fold, (train, test) in enumerate(splitter.split(np.zeros((d.n_instances, 1)), d.y)):
            np.testing.assert_array_equal(plan.test_rows(fold), np.sort(test))
            np.testing.assert_array_equal(plan.train_rows(fold), np.sort(train))

    def test_010_run_experiment(self):
        """Check the run counts and the accuracies of a small experiment."""
        print('INFO: [TEST_010] Run a small experiment')
        config = small_config()
        table = run_experiment(config, datasets=[blobs()])
        self.assertEqual(table.failures, [])
        self.assertEqual(table.expected_runs, 10)
        for combiner in config.combiners:
            self.assertTrue(table.is_complete('blobs', 3, combiner))
            accuracies = table.accuracies('blobs', 3, combiner)
            self.assertEqual(accuracies.size, 10)
            self.assertTrue(np.all((accuracies >= 0.0) & (accuracies <= 1.0)))
            self.assertGreater(table.mean('blobs', 3, combiner), 0.85)
            self.assertGreater(table.mean('blobs', 3, combiner), table.baseline('blobs'))
        self.assertEqual(len(table.baselines['blobs']), 10)
        self.assertEqual(len(table.records()), 30)

    def test_011_run_determinism(self):
        """Check that serial and parallel runs give identical tables."""
        print('INFO: [TEST_011] Check the serial and parallel determinism')
        datasets = [blobs(seed=1), labelled([12, 13], name='line')]
        serial = run_experiment(small_config(), datasets=datasets)
        again = run_experiment(small_config(), datasets=datasets)
        parallel = run_experiment(small_config(parallel=True, workers=4), datasets=datasets)
        self.assertEqual(serial.records(), again.records())
        self.assertEqual(serial.records(), parallel.records())
        self.assertEqual(serial.baselines, parallel.baselines)

    def test_012_cell_failures(self):
        """Check that failing cells are recorded and the run goes on."""
        print('INFO: [TEST_012] Check the cell failures')
        learners = Config(search=False).read_string('[knn]\nk=0\n')
        config = small_config(repeats=1, composition='knn:1', learners_config=learners)
        table = run_experiment(config, datasets=[blobs()])
        self.assertEqual(len(table.failures), 5)
        self.assertIn('k', table.failures[0].message)
        self.assertEqual(table.records(), [])
        self.assertTrue(np.isnan(table.mean('blobs', 3, 'arith')))

    def test_013_timing_report(self):
        """Check the timing report rows and their growth with the ensemble size."""
        print('INFO: [TEST_013] Check the timing report')
        combiners = ('arith', 'vote', 'h_arith')
        table = run_experiment(small_config(timing=True, sizes=[2, 20]), datasets=[blobs()])
        report = timing_report(table)
        self.assertEqual(sorted(report), sorted((s, c) for s in (2, 20) for c in combiners))
        self.assertTrue(all(seconds > 0.0 for seconds in report.values()))
        # 20 members are trained and fused where 2 were
        for combiner in combiners:
            self.assertGreaterEqual(report[(20, combiner)], report[(2, combiner)], msg=combiner)
        detail = timing_report(table, by_dataset=True)
        self.assertEqual(len(detail), 6)
        self.assertIn(('blobs', 20, 'h_arith'), detail)

    def test_014_iris(self):
        """Check the combiners on iris against the majority baseline."""
        print('INFO: [TEST_014] Check the combiners on iris')
        iris = load_dataset(os.path.join(DATA_DIR, 'iris.csv'), 'species')
        self.assertEqual((iris.n_instances, iris.n_features, iris.n_classes), (150, 4, 3))
        config = small_config(
            sizes=[5],
            combiners=['min', 'max', 'arith', 'prod', 'vote', 'h_med', 'h_arith', 'h_max', 'h_min'],
            folds=10,
            repeats=1,
            seed=0,
        )
        table = run_experiment(config, datasets=[iris])
        self.assertEqual(table.failures, [])
        baseline = table.baseline('iris')
        self.assertAlmostEqual(baseline, 1.0 / 3.0, delta=0.05)
        for combiner in config.combiners:
            mean = table.mean('iris', 5, combiner)
            print(f'INFO: iris {combiner} {mean:.4f}')
            self.assertGreater(mean, 0.85, msg=combiner)
            self.assertGreater(mean, baseline)

    def test_015_shipped_configuration(self):
        """Check the shipped experiment: baselines beaten, iris above 0.85, runs replayable."""
        print('INFO: [TEST_015] Run the shipped configuration (sizes 5,7,10, 10x10 folds)')
        config = Config(os.path.join(CONF_DIR, 'gmfusion.conf')).experiment_config()
        self.assertEqual([source.name for source in config.datasets], ['iris', 'zoo', 'tic-tac-toe'])
        self.assertEqual((config.sizes, config.folds, config.repeats), ([5, 7, 10], 10, 10))
        datasets = [source.load() for source in config.datasets]
        table = run_experiment(config, datasets=datasets)
        self.assertEqual(table.failures, [])
        for dataset in table.datasets:
            baseline = table.baseline(dataset)
            for size in config.sizes:
                for combiner in config.combiners:
                    self.assertTrue(table.is_complete(dataset, size, combiner))
                    mean = table.mean(dataset, size, combiner)
                    print(f'INFO: {dataset} size={size} {combiner} {mean:.4f} (baseline {baseline:.4f})')
                    self.assertGreater(mean, baseline, msg=f'{dataset} {size} {combiner}')
                    if dataset == 'iris':
                        self.assertGreater(mean, 0.85, msg=f'iris {size} {combiner}')

        # Same seed, same accuracies (the durations aside), serial or not
        again = run_experiment(replace(config, parallel=True, workers=4), datasets=datasets)

        def accuracies(t):
            return [(r.dataset, r.size, r.combiner, r.run, r.fold, r.accuracy) for r in t.records()]

        self.assertEqual(accuracies(table), accuracies(again))
        self.assertEqual(table.baselines, again.baselines)
        self.assertEqual(
            json_dumps(build_report(table, seed=config.seed).as_dict()),
            json_dumps(build_report(again, seed=config.seed).as_dict()),
        )

    def test_020_friedman(self):
        """Check the Friedman test."""
        print('INFO: [TEST_020] Check the Friedman test')
        same = {m: np.full(6, 0.8) for m in ('a', 'b', 'c')}
        statistic, p = friedman_test(same)
        self.assertEqual(statistic, 0.0)
        self.assertAlmostEqual(p, 1.0, delta=1e-12)
        statistic, p = friedman_test(dominant_accuracies())
        self.assertAlmostEqual(statistic, 15.0, delta=1e-9)
        self.assertLess(p, 0.01)
        self.assertAlmostEqual(p, float(np.exp(-7.5)), delta=1e-9)
        with self.assertRaises(ConfigurationError):
            friedman_test({'a': [0.1, 0.2]})
        with self.assertRaises(ConfigurationError):
            friedman_test({'a': [0.1], 'b': [0.2]})
        with self.assertRaises(ConfigurationError):
            friedman_test({'a': [0.1, 0.2], 'b': [0.2]})

    def test_021_friedman_rank_invariance(self):
        """Check that a monotone transform of the accuracies keeps the statistic."""
        print('INFO: [TEST_021] Check the Friedman rank invariance')
        rng = np.random.default_rng(5)
        accuracies = {m: rng.uniform(0.5, 1.0, size=12) for m in ('a', 'b', 'c', 'd')}
        squared = {m: v**2 for m, v in accuracies.items()}
        self.assertAlmostEqual(friedman_test(accuracies)[0], friedman_test(squared)[0], delta=1e-9)
        ranks = average_ranks({'a': [0.9, 0.5], 'b': [0.8, 0.5]})
        self.assertEqual(ranks, {'a': 1.25, 'b': 1.75})

    def test_022_critical_difference(self):
        """Check the Nemenyi critical difference."""
        print('INFO: [TEST_022] Check the critical difference')
        self.assertAlmostEqual(critical_difference(3, 10, 0.01), 1.3028, delta=1e-3)
        self.assertAlmostEqual(critical_difference(2, 25, 0.05), 2.772 / np.sqrt(2.0) * np.sqrt(6.0 / 150.0))
        for alpha in (0.0, 1.0, 0.1):
            with self.assertRaises(ConfigurationError):
                critical_difference(3, 10, alpha)
        with self.assertRaises(ConfigurationError):
            critical_difference(21, 10, 0.01)

    def test_023_nemenyi(self):
        """Check the Nemenyi decisions."""
        print('INFO: [TEST_023] Check the Nemenyi post-hoc decisions')
        report = nemenyi_posthoc(dominant_accuracies(), alpha=0.01)
        self.assertTrue(report.rejected)
        self.assertEqual(report.ranks, {'a': 1.0, 'b': 2.5, 'c': 2.5})
        self.assertEqual(report.outcome('a', 'b'), WIN)
        self.assertEqual(report.outcome('a', 'c'), WIN)
        self.assertEqual(report.outcome('b', 'a'), LOSS)
        self.assertEqual(report.outcome('b', 'c'), DRAW)
        # Antisymmetry
        flip = {WIN: LOSS, LOSS: WIN, DRAW: DRAW}
        for (a, b), outcome in report.pairwise.items():
            self.assertEqual(report.outcome(b, a), flip[outcome])
        with self.assertRaises(ConfigurationError):
            report.outcome('a', 'z')
        # A strict 1/2/3 ordering: the rank gaps of 1 stay under the critical difference
        strict = nemenyi_posthoc({'a': np.full(10, 0.9), 'b': np.full(10, 0.8), 'c': np.full(10, 0.7)})
        self.assertEqual(strict.outcome('a', 'b'), DRAW)
        self.assertEqual(strict.outcome('a', 'c'), WIN)
        # Two methods on 25 datasets
        wide = nemenyi_posthoc({'a': np.full(25, 0.9), 'b': np.full(25, 0.6)})
        self.assertEqual(wide.outcome('a', 'b'), WIN)
        # Identical methods are draws
        same = nemenyi_posthoc({'a': np.full(5, 0.7), 'b': np.full(5, 0.7)})
        self.assertFalse(same.rejected)
        self.assertEqual(same.outcome('a', 'b'), DRAW)

    def test_024_nemenyi_relabeling(self):
        """Check that renaming the methods keeps the decisions."""
        print('INFO: [TEST_024] Check the Nemenyi relabeling invariance')
        accuracies = dominant_accuracies()
        renamed = {'z': accuracies['a'], 'y': accuracies['c'], 'x': accuracies['b']}
        a = nemenyi_posthoc(accuracies)
        b = nemenyi_posthoc(renamed)
        names = {'a': 'z', 'b': 'x', 'c': 'y'}
        for (m1, m2), outcome in a.pairwise.items():
            self.assertEqual(b.outcome(names[m1], names[m2]), outcome)

    def test_025_win_draw_loss(self):
        """Check the win/draw/loss grid."""
        print('INFO: [TEST_025] Check the win/draw/loss grid')
        reports = {f'd{i}': nemenyi_posthoc(dominant_accuracies()) for i in range(3)}
        reports['d3'] = nemenyi_posthoc({m: np.full(10, 0.5) for m in ('a', 'b', 'c')})
        grid = win_draw_loss(reports, ['a'], ['b', 'c'])
        self.assertEqual(grid.cell('a', 'b'), (3, 1, 0))
        self.assertEqual(grid.format_cell('a', 'c'), '3 - 1 - 0')
        for cell in grid.cells.values():
            self.assertEqual(sum(cell), 4)
        self.assertIn('3 - 1 - 0', grid.format())
        draws = {f'd{i}': nemenyi_posthoc({m: np.full(10, 0.5) for m in ('a', 'b')}) for i in range(25)}
        self.assertEqual(win_draw_loss(draws, ['a'], ['b']).format_cell('a', 'b'), '0 - 25 - 0')
        with self.assertRaises(ConfigurationError):
            win_draw_loss(reports, ['a'], ['vote'])

    def test_026_build_report(self):
        """Check the report of a hand-filled result table."""
        print('INFO: [TEST_026] Check the experiment report')
        table = ResultTable(['d1', 'd2'], [5], ['arith', 'h_arith'], folds=5, repeats=1)
        for dataset, bonus in (('d1', 0.2), ('d2', 0.1)):
            for fold in range(5):
                table.add(RunRecord(dataset, 5, 'arith', 0, fold, 0.6 + 0.01 * fold, 0.0))
                table.add(RunRecord(dataset, 5, 'h_arith', 0, fold, 0.6 + 0.01 * fold + bonus, 0.0))
        with self.assertRaises(ValueError):
            table.add(RunRecord('d1', 5, 'arith', 0, 0, 1.5, 0.0))
        report = build_report(table, alpha=0.05, seed=3)
        self.assertEqual(report.proposed, ['h_arith'])
        self.assertEqual(report.baselines, ['arith'])
        comparison = report.sizes[5]
        self.assertEqual(sorted(comparison.reports), ['d1', 'd2'])
        self.assertEqual(comparison.reports['d1'].outcome('h_arith', 'arith'), WIN)
        self.assertEqual(comparison.grid.cell('h_arith', 'arith'), (2, 0, 0))
        self.assertIsNotNone(comparison.overall)
        self.assertEqual(table.best_combiner(5), 'h_arith')
        self.assertEqual(table.average_ranks(5), {'arith': 2.0, 'h_arith': 1.0})
        stats = report.as_dict()
        self.assertEqual(stats['seed'], 3)
        self.assertEqual(stats['sizes']['5']['win_draw_loss'], {'h_arith vs arith': [2, 0, 0]})
        # A single combiner is never compared
        single = ResultTable(['d1'], [5], ['arith'], folds=5, repeats=1)
        self.assertEqual(build_report(single).sizes, {})


if __name__ == '__main__':
    unittest.main()
