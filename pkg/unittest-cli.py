#!/usr/bin/env python
#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""gmfusion unitary tests suite: configuration, files and command line."""

import contextlib
import io
import json
import os
import shutil
import tempfile
import unittest

from gmfusion import __version__, run_command
from gmfusion.combine import read_score_file
from gmfusion.config import Config
from gmfusion.dataset import CATEGORICAL, NUMERIC, load_dataset
from gmfusion.errors import EXIT_DATA, EXIT_OK, EXIT_USAGE, ConfigurationError, DataError, MalformedScoresError

# Global variables
# =================

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
IRIS = os.path.join(DATA_DIR, 'iris.csv')

# Worked example: three members, two classes
EXAMPLE_GM = '# yes, no\n0.9,0.1\n0.3,0.7\n0.5,0.5\n'
EXAMPLE_MIN = '0.45,0.55\n0.3,0.7\n0.5,0.5\n'

RUN_CONFIG = """
[experiment]
sizes=3
combiners=arith,vote,h_arith
folds=3
repeats=1
seed=11
timing=false
composition=knn:1,tree:1,naive_bayes:1

[dataset:iris]
path={iris}
label=species
"""

# Init the test
# ==============
print(f'Unitary tests for gmfusion {__version__} command line')


class TestGmfusionCli(unittest.TestCase):
    """Test the configuration, the file readers and the commands."""

    def setUp(self):
        """The function is called *every time* before test_*."""
        print('\n' + '=' * 78)
        self.tmp = tempfile.mkdtemp(prefix='gmfusion-test-')

    def tearDown(self):
        shutil.rmtree(self.tmp, ignore_errors=True)

    def write(self, name, content):
        path = os.path.join(self.tmp, name)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(content)
        return path

    def command(self, *argv):
        """Run a command and return (exit code, stdout, stderr)."""
        out, err = io.StringIO(), io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            code = run_command(list(argv))
        return code, out.getvalue(), err.getvalue()

    def test_000_config_defaults(self):
        """Check the experiment configuration built from a string."""
        print('INFO: [TEST_000] Check the configuration defaults')
        config = Config(search=False).read_string(f'[dataset:iris]\npath={IRIS}\nlabel=species\n')
        experiment = config.experiment_config()
        self.assertEqual(experiment.sizes, [5, 7, 10])
        self.assertEqual(experiment.folds, 10)
        self.assertEqual(experiment.repeats, 10)
        self.assertEqual(experiment.alpha, 0.01)
        self.assertEqual(experiment.tie_policy, 'lowest-index')
        self.assertEqual(len(experiment.combiners), 8)
        self.assertEqual(experiment.datasets[0].name, 'iris')
        self.assertEqual(experiment.datasets[0].path, IRIS)
        experiment = config.experiment_config(seed=3, output_dir=self.tmp)
        self.assertEqual(experiment.seed, 3)
        self.assertEqual(experiment.output_dir, self.tmp)

    def test_001_config_errors(self):
        """Check the configuration errors."""
        print('INFO: [TEST_001] Check the configuration errors')
        dataset = f'[dataset:iris]\npath={IRIS}\nlabel=species\n'
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('[experiment]\nfolds=10\n').experiment_config()
        with self.assertRaises(ConfigurationError) as ctx:
            Config(search=False).read_string('[experiment]\nfold=10\n' + dataset).experiment_config()
        self.assertIn('fold', str(ctx.exception))
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('[experiment]\nsizes=5,x\n' + dataset).experiment_config()
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('[experiment]\ncombiners=arith,h_mode\n' + dataset).experiment_config()
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('[experiment]\nfolds=ten\n' + dataset).experiment_config()
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('[dataset:iris]\npath=iris.csv\n').experiment_config()
        with self.assertRaises(ConfigurationError) as ctx:
            Config(search=False).read_string(dataset + '[knn]\nneighbours=1\n').experiment_config()
        self.assertIn('neighbours', str(ctx.exception))
        with self.assertRaises(ConfigurationError) as ctx:
            Config(search=False).read_string(dataset + '[dataset-zoo]\npath=zoo.csv\n').experiment_config()
        self.assertIn('dataset-zoo', str(ctx.exception))
        # Every learner family section is known
        learners = '[knn]\nk=3\n[tree]\nmin_leaf=1\n[naive_bayes]\n[logreg]\nl2=0\n[perceptron]\nepochs=5\n'
        self.assertEqual(len(Config(search=False).read_string(dataset + learners).experiment_config().datasets), 1)
        with self.assertRaises(ConfigurationError):
            Config(search=False).read_string('not an ini file')
        with self.assertRaises(ConfigurationError):
            Config(os.path.join(self.tmp, 'missing.conf'))

    def test_002_config_relative_path(self):
        """Check that dataset paths are relative to the configuration file."""
        print('INFO: [TEST_002] Check the relative dataset paths')
        path = self.write('exp.conf', '[dataset:toy]\npath=sub/toy.csv\nlabel=y\nignore=id, name\n')
        config = Config(path)
        self.assertEqual(config.loaded_config_file, path)
        source = config.dataset_sources()[0]
        self.assertEqual(source.name, 'toy')
        self.assertEqual(source.path, os.path.join(self.tmp, 'sub', 'toy.csv'))
        self.assertEqual(source.ignore, ('id', 'name'))

    def test_010_load_iris(self):
        """Check the bundled iris dataset."""
        print('INFO: [TEST_010] Check the iris dataset')
        iris = load_dataset(IRIS, 'species')
        self.assertEqual(iris.name, 'iris')
        self.assertEqual(iris.n_instances, 150)
        self.assertEqual(iris.n_features, 4)
        self.assertEqual(iris.classes, ['Iris-setosa', 'Iris-versicolor', 'Iris-virginica'])
        self.assertEqual(list(iris.class_counts()), [50, 50, 50])
        self.assertTrue(all(spec.kind == NUMERIC for spec in iris.schema))

    def test_011_load_categorical(self):
        """Check the categorical tic-tac-toe dataset and the ignored zoo identifiers."""
        print('INFO: [TEST_011] Check the tic-tac-toe and zoo datasets')
        ttt = load_dataset(os.path.join(DATA_DIR, 'tic-tac-toe.csv'), 'class')
        self.assertEqual((ttt.n_instances, ttt.n_features), (958, 9))
        self.assertEqual(ttt.classes, ['negative', 'positive'])
        self.assertEqual(list(ttt.class_counts()), [332, 626])
        self.assertTrue(all(spec.kind == CATEGORICAL for spec in ttt.schema))
        zoo = load_dataset(os.path.join(DATA_DIR, 'zoo.csv'), 'type', ignore=('animal',))
        self.assertEqual((zoo.n_instances, zoo.n_features), (101, 16))
        self.assertEqual(list(zoo.class_counts()), [41, 20, 5, 13, 4, 8, 10])
        self.assertNotIn('animal', [spec.name for spec in zoo.schema])
        self.assertTrue(all(spec.kind == NUMERIC for spec in zoo.schema))
        with self.assertRaises(DataError):
            load_dataset(os.path.join(DATA_DIR, 'zoo.csv'), 'type', ignore=('name',))
        with self.assertRaises(DataError):
            load_dataset(os.path.join(DATA_DIR, 'zoo.csv'), 'type', ignore=('type',))

    def test_012_load_missing_values(self):
        """Check the missing markers and the empty columns."""
        print('INFO: [TEST_012] Check the missing values')
        path = self.write('toy.csv', 'a,b,c,y\n1,?,red,u\n,?,blue,v\n3,,?,u\n')
        d = load_dataset(path, 'y')
        self.assertEqual([spec.name for spec in d.schema], ['a', 'c'])
        self.assertEqual([spec.kind for spec in d.schema], [NUMERIC, CATEGORICAL])
        self.assertEqual(d.X[0, 0], 1.0)
        self.assertTrue(d.X[1, 0] != d.X[1, 0])
        self.assertIsNone(d.X[2, 1])

    def test_013_load_errors(self):
        """Check the dataset errors."""
        print('INFO: [TEST_013] Check the dataset errors')
        with self.assertRaises(DataError) as ctx:
            load_dataset(IRIS, 'class')
        self.assertIn('sepal_length', str(ctx.exception))
        with self.assertRaises(DataError) as ctx:
            load_dataset(self.write('ragged.csv', 'a,y\n1,u\n2\n'), 'y')
        self.assertIn('row 3', str(ctx.exception))
        with self.assertRaises(DataError):
            load_dataset(self.write('single.csv', 'a,y\n1,u\n2,u\n'), 'y')
        with self.assertRaises(DataError):
            load_dataset(self.write('nolabel.csv', 'a,y\n1,u\n2,?\n'), 'y')
        with self.assertRaises(DataError):
            load_dataset(self.write('empty.csv', '\n'), 'y')
        with self.assertRaises(DataError):
            load_dataset(os.path.join(self.tmp, 'missing.csv'), 'y')

    def test_020_score_file(self):
        """Check the score file reader."""
        print('INFO: [TEST_020] Check the score file reader')
        score_file = read_score_file(self.write('gm.txt', EXAMPLE_GM))
        self.assertEqual(score_file.labels, ['yes', 'no'])
        self.assertEqual(score_file.scores.shape, (3, 2))
        score_file = read_score_file(self.write('min.txt', '\n' + EXAMPLE_MIN + '# trailing comment\n\n'))
        self.assertIsNone(score_file.labels)
        self.assertEqual(score_file.scores.shape, (3, 2))
        self.assertAlmostEqual(score_file.scores[0, 0], 0.45)

    def test_021_score_file_errors(self):
        """Check the malformed score files."""
        print('INFO: [TEST_021] Check the malformed score files')
        with self.assertRaises(MalformedScoresError) as ctx:
            read_score_file(self.write('bad.txt', '0.5,0.5\n0.5,abc\n'))
        self.assertIn(':2:', str(ctx.exception))
        with self.assertRaises(MalformedScoresError) as ctx:
            read_score_file(self.write('ragged.txt', '0.5,0.5\n\n0.2,0.3,0.5\n'))
        self.assertIn(':3:', str(ctx.exception))
        with self.assertRaises(MalformedScoresError):
            read_score_file(self.write('labels.txt', '# a, b, c\n0.5,0.5\n'))
        with self.assertRaises(MalformedScoresError):
            read_score_file(self.write('empty.txt', '# a, b\n'))
        with self.assertRaises(MalformedScoresError):
            read_score_file(self.write('range.txt', '0.5,1.5\n0.5,0.5\n'))
        with self.assertRaises(DataError):
            read_score_file(os.path.join(self.tmp, 'missing.txt'))

    def test_030_combine_command(self):
        """Check the combine command on the worked examples."""
        print('INFO: [TEST_030] Check the combine command')
        code, out, _ = self.command('combine', self.write('gm.txt', EXAMPLE_GM))
        self.assertEqual(code, EXIT_OK)
        self.assertIn('weights=(0.250000, 0.300000, 0.450000)', out)
        self.assertIn('Value = (0.540000, 0.460000)', out)
        self.assertIn('Decision: class 1 (yes)', out)
        code, out, _ = self.command('combine', '--combiner', 'min', self.write('min.txt', EXAMPLE_MIN))
        self.assertEqual(code, EXIT_OK)
        self.assertIn('Value = (0.300000, 0.500000)', out)
        self.assertIn('Decision: class 2', out)
        code, out, _ = self.command('combine', '--no-trace', '--labels', 'a,b', self.write('gm2.txt', EXAMPLE_GM))
        self.assertEqual(code, EXIT_OK)
        self.assertNotIn('weights=', out)
        self.assertIn('Decision: class 1 (a)', out)

    def test_031_combine_identical_members(self):
        """Check that identical members get uniform weights."""
        print('INFO: [TEST_031] Check identical members')
        code, out, _ = self.command('combine', '--out', self.tmp, self.write('same.txt', '0.6,0.4\n0.6,0.4\n0.6,0.4\n'))
        self.assertEqual(code, EXIT_OK)
        self.assertIn('weights=(0.333333, 0.333333, 0.333333)', out)
        self.assertIn('Value = (0.600000, 0.400000)', out)
        with open(os.path.join(self.tmp, 'combine.txt'), encoding='utf-8') as f:
            self.assertIn('Decision: class 1', f.read())

    def test_032_combine_errors(self):
        """Check the combine command exit codes."""
        print('INFO: [TEST_032] Check the combine errors')
        code, _, err = self.command('combine', self.write('bad.txt', '0.5,0.5\nfoo\n'))
        self.assertEqual(code, EXIT_DATA)
        self.assertIn('MalformedScoresError', err)
        code, _, _ = self.command('combine', '--labels', 'a,b,c', self.write('gm.txt', EXAMPLE_GM))
        self.assertEqual(code, EXIT_DATA)
        with contextlib.redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as ctx:
            run_command(['combine', '--combiner', 'h_mode', self.write('gm2.txt', EXAMPLE_GM)])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)
        # The trace directory is an existing file
        blocker = self.write('blocker', '')
        code, _, err = self.command('combine', '--out', blocker, self.write('gm3.txt', EXAMPLE_GM))
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('combine trace', err)

    def test_040_props_command(self):
        """Check the props command."""
        print('INFO: [TEST_040] Check the props command')
        code, out, _ = self.command('props', '--samples', '20', '--seed', '5', '--out', self.tmp)
        self.assertEqual(code, EXIT_OK)
        self.assertIn('0 failed', out)
        self.assertIn('[control]', out)
        with open(os.path.join(self.tmp, 'props.txt'), encoding='utf-8') as f:
            self.assertIn('passed', f.read())
        with contextlib.redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as ctx:
            run_command(['props', '--samples', '0'])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)
        code, _, _ = self.command('props', '--samples', '5', '--out', self.write('blocker', ''))
        self.assertEqual(code, EXIT_USAGE)

    def test_050_run_command(self):
        """Check a small run and its reports."""
        print('INFO: [TEST_050] Check the run command')
        config = self.write('exp.conf', RUN_CONFIG.format(iris=IRIS))
        out_a = os.path.join(self.tmp, 'a')
        out_b = os.path.join(self.tmp, 'b')
        code, out, _ = self.command('run', config, '--out', out_a)
        self.assertEqual(code, EXIT_OK)
        self.assertIn('Dataset iris', out)
        for name in ('results.csv', 'stats.txt', 'stats.json', 'summary.txt'):
            self.assertTrue(os.path.isfile(os.path.join(out_a, name)), name)
        self.assertFalse(os.path.exists(os.path.join(out_a, 'timing.csv')))
        with open(os.path.join(out_a, 'results.csv'), encoding='utf-8') as f:
            lines = f.read().splitlines()
        self.assertEqual(lines[0], 'dataset,size,combiner,run,fold,accuracy,seconds')
        self.assertEqual(len(lines), 1 + 3 * 3)
        with open(os.path.join(out_a, 'stats.json'), encoding='utf-8') as f:
            stats = json.load(f)
        self.assertEqual(stats['seed'], 11)
        self.assertEqual(stats['proposed'], ['h_arith'])
        self.assertIn('iris', stats['sizes']['3']['datasets'])

        # Same seed, same results
        code, _, _ = self.command('run', config, '--out', out_b)
        self.assertEqual(code, EXIT_OK)
        with open(os.path.join(out_a, 'results.csv'), 'rb') as a, open(os.path.join(out_b, 'results.csv'), 'rb') as b:
            self.assertEqual(a.read(), b.read())

    def test_051_run_errors(self):
        """Check the run command exit codes."""
        print('INFO: [TEST_051] Check the run errors')
        config = self.write('mode.conf', RUN_CONFIG.format(iris=IRIS).replace('h_arith', 'h_mode'))
        code, _, err = self.command('run', config, '--out', self.tmp)
        self.assertEqual(code, EXIT_USAGE)
        self.assertIn('h_mode', err)
        config = self.write('key.conf', RUN_CONFIG.format(iris=IRIS).replace('seed=11', 'sed=11'))
        code, _, _ = self.command('run', config, '--out', self.tmp)
        self.assertEqual(code, EXIT_USAGE)
        for name, extra in (
            ('learner.conf', '\n[knn]\nneighbours=1\n'),
            ('section.conf', '\n[dataset-zoo]\nlabel=type\n'),
        ):
            config = self.write(name, RUN_CONFIG.format(iris=IRIS) + extra)
            code, _, _ = self.command('run', config, '--out', self.tmp)
            self.assertEqual(code, EXIT_USAGE, msg=name)
        config = self.write('data.conf', RUN_CONFIG.format(iris=os.path.join(self.tmp, 'missing.csv')))
        code, _, _ = self.command('run', config, '--out', self.tmp)
        self.assertEqual(code, EXIT_DATA)
        with contextlib.redirect_stderr(io.StringIO()), self.assertRaises(SystemExit) as ctx:
            run_command(['run'])
        self.assertEqual(ctx.exception.code, EXIT_USAGE)

    def test_052_run_every_cell_failed(self):
        """Check that a run where every cell fails exits with the data code."""
        print('INFO: [TEST_052] Check a run without any result')
        text = RUN_CONFIG.format(iris=IRIS).replace('knn:1,tree:1,naive_bayes:1', 'knn:1') + '\n[knn]\nk=0\n'
        code, out, _ = self.command('run', self.write('fail.conf', text), '--out', self.tmp)
        self.assertEqual(code, EXIT_DATA)
        self.assertIn('Failed cells: 3', out)


if __name__ == '__main__':
    unittest.main()
