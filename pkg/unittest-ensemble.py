#!/usr/bin/env python
#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""gmfusion unitary tests suite: base classifiers, fusion engines and ensembles."""

import unittest

import numpy as np

from gmfusion import __version__
from gmfusion.config import Config
from gmfusion.dataset import CATEGORICAL, NUMERIC, Dataset, FeatureSpec
from gmfusion.ensemble import (
    COMBINERS,
    as_score_matrix,
    base_predict_proba,
    classify,
    classify_fusion,
    classify_gm,
    composition_families,
    fuse_batch,
    majority_vote,
    parse_composition,
    predict,
    tie_break,
    train_ensemble,
)
from gmfusion.errors import (
    ConfigurationError,
    FeatureError,
    MalformedScoresError,
    StateError,
)
from gmfusion.globals import derive_rng
from gmfusion.learners import FAMILIES, available_families, family_name, load_learner
from gmfusion.learners.learner.model import POSTERIOR_FLOOR, smooth_posteriors
from gmfusion.preprocessing import Preprocessor

# Global variables
# =================

# Worked examples: one row per member, one column per class
EXAMPLE_MIN = [[0.45, 0.55], [0.3, 0.7], [0.5, 0.5]]
EXAMPLE_GM = [[0.9, 0.1], [0.3, 0.7], [0.5, 0.5]]


def blobs(n_per_class=30, centers=((0.0, 0.0), (4.0, 4.0), (0.0, 4.0)), scale=0.5, seed=0):
    """Well separated Gaussian blobs as a numeric Dataset."""
    rng = np.random.default_rng(seed)
    X = np.vstack([rng.normal(c, scale, size=(n_per_class, len(c))) for c in centers])
    labels = [f'c{j}' for j in range(len(centers)) for _ in range(n_per_class)]
    return Dataset.from_arrays('blobs', X, labels)


# Shared training set
train_set = blobs()

# Unitest class
# ==============
print(f'Unitary tests for gmfusion {__version__} ensembles')


class TestGmfusionEnsemble(unittest.TestCase):
    """Test the learners and the ensemble fusion."""

    def setUp(self):
        """The function is called *every time* before test_*."""
        print('\n' + '=' * 78)

    def test_000_families(self):
        """Check the learner discovery."""
        print('INFO: [TEST_000] Check the learner families')
        self.assertEqual(available_families(), sorted(FAMILIES))
        self.assertEqual(family_name('decision-tree'), 'tree')
        self.assertEqual(family_name('gaussian-naive-bayes'), 'naive_bayes')
        self.assertEqual(family_name('logistic-regression'), 'logreg')
        with self.assertRaises(ConfigurationError):
            family_name('svm')

    def test_001_learners_posteriors(self):
        """Check that every family returns posterior rows."""
        print('INFO: [TEST_001] Check the posterior rows of every family')
        features = Preprocessor(train_set.schema).fit_transform(train_set.X)
        for family in FAMILIES:
            learner = load_learner(family).fit(features, train_set.y, train_set.n_classes, rng=derive_rng(0, 'test'))
            self.assertTrue(learner.is_fitted())
            proba = learner.predict_proba(features)
            self.assertEqual(proba.shape, (train_set.n_instances, 3))
            np.testing.assert_allclose(proba.sum(axis=1), 1.0, atol=1e-12)
            self.assertTrue(np.all(proba > 0.0))
            accuracy = float(np.mean(proba.argmax(axis=1) == train_set.y))
            print(f'INFO: {family} training accuracy {accuracy:.3f}')
            self.assertGreater(accuracy, 0.9)

    def test_002_learner_state(self):
        """Check the learner errors."""
        print('INFO: [TEST_002] Check the learner errors')
        learner = load_learner('knn')
        with self.assertRaises(StateError):
            learner.predict_proba(np.zeros((1, 2)))
        learner.fit(np.zeros((4, 2)), [0, 1, 0, 1], 2)
        with self.assertRaises(FeatureError):
            learner.predict_proba(np.zeros((1, 3)))
        with self.assertRaises(FeatureError):
            load_learner('tree').fit(np.zeros((4, 2)), [0, 1, 0], 2)
        with self.assertRaises(ConfigurationError):
            load_learner('knn', depth=3)

    def test_003_hyperparameters(self):
        """Check the hyperparameters from the configuration and the overrides."""
        print('INFO: [TEST_003] Check the hyperparameters')
        self.assertEqual(load_learner('knn').get('k'), 5)
        self.assertEqual(load_learner('tree').get('max_depth'), 12)
        self.assertEqual(load_learner('tree').get('min_leaf'), 2)
        self.assertEqual(load_learner('naive_bayes').get('var_floor'), 1e-9)
        for family in ('logreg', 'perceptron'):
            learner = load_learner(family)
            self.assertEqual(learner.get('epochs'), 200)
            self.assertEqual(learner.get('learning_rate'), 0.1)
            self.assertEqual(learner.get('l2'), 1e-4)
        config = Config(search=False).read_string('[knn]\nk=3\n[tree]\nmax_depth=4\n')
        self.assertEqual(load_learner('knn', config).get('k'), 3)
        self.assertEqual(load_learner('tree', config).get('max_depth'), 4)
        self.assertEqual(load_learner('knn', config, k=1).get('k'), 1)
        bad = Config(search=False).read_string('[knn]\nk=three\n')
        with self.assertRaises(ConfigurationError):
            load_learner('knn', bad)

    def test_004_knn_memorized_point(self):
        """Check that 1-NN on a stored point is one-hot."""
        print('INFO: [TEST_004] Check 1-NN on a memorized point')
        X = np.array([[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]])
        learner = load_learner('knn', k=1).fit(X, [0, 1, 1], 2)
        row = base_predict_proba(learner, [1.0, 1.0])
        self.assertEqual(int(np.argmax(row)), 1)
        self.assertGreater(row[1], 1.0 - 1e-5)
        # k larger than the training set uses every instance
        row = base_predict_proba(load_learner('knn', k=10).fit(X, [0, 1, 1], 2), [0.0, 0.0])
        np.testing.assert_allclose(row, [1 / 3, 2 / 3], atol=1e-5)

    def test_005_tree_single_leaf(self):
        """Check that a tree without any split predicts the Laplace prior."""
        print('INFO: [TEST_005] Check a single leaf tree')
        learner = load_learner('tree').fit(np.zeros((4, 1)), [0, 1, 0, 1], 2)
        self.assertEqual(learner.depth(), 0)
        np.testing.assert_allclose(base_predict_proba(learner, [0.0]), [0.5, 0.5], atol=1e-12)
        # A separable feature gives one split
        X = np.array([[0.0], [0.1], [0.2], [1.0], [1.1], [1.2]])
        learner = load_learner('tree').fit(X, [0, 0, 0, 1, 1, 1], 2)
        self.assertEqual(learner.depth(), 1)
        # Laplace smoothing: (3 + 1) / (3 + 2)
        self.assertAlmostEqual(base_predict_proba(learner, [0.05])[0], 0.8, delta=1e-5)

    def test_006_naive_bayes_symmetry(self):
        """Check Gaussian naive Bayes on two symmetric classes."""
        print('INFO: [TEST_006] Check Gaussian naive Bayes')
        X = np.array([[-2.0], [0.0], [0.0], [2.0]])
        learner = load_learner('naive_bayes').fit(X, [0, 0, 1, 1], 2)
        np.testing.assert_allclose(base_predict_proba(learner, [0.0]), [0.5, 0.5], atol=1e-9)
        self.assertGreater(base_predict_proba(learner, [-1.5])[0], 0.9)
        # A class missing from the sample only gets the posterior floor
        learner = load_learner('naive_bayes').fit(X, [0, 0, 0, 0], 2)
        self.assertLess(base_predict_proba(learner, [0.0])[1], 2 * POSTERIOR_FLOOR)

    def test_007_posterior_floor(self):
        """Check the posterior smoothing."""
        print('INFO: [TEST_007] Check the posterior floor')
        row = smooth_posteriors([[1.0, 0.0]])[0]
        self.assertGreater(row[1], 0.0)
        self.assertAlmostEqual(float(row.sum()), 1.0, delta=1e-15)

    def test_008_preprocessing(self):
        """Check the imputation, standardization and one-hot encoding."""
        print('INFO: [TEST_008] Check the preprocessing')
        schema = [FeatureSpec('size', NUMERIC), FeatureSpec('color', CATEGORICAL)]
        X = np.array([[1.0, 'red'], [3.0, 'blue'], [np.nan, 'red'], [2.0, None]], dtype=object)
        pre = Preprocessor(schema)
        with self.assertRaises(StateError):
            pre.transform(X)
        features = pre.fit_transform(X)
        # size (mean 2 after imputation) + blue, red
        self.assertEqual(features.shape, (4, 3))
        self.assertAlmostEqual(float(features[:, 0].mean()), 0.0, delta=1e-12)
        self.assertEqual(features[2, 0], 0.0)
        np.testing.assert_array_equal(features[:, 1:], [[0, 1], [1, 0], [0, 1], [0, 1]])
        unseen = pre.transform(np.array([[2.0, 'green']], dtype=object))
        np.testing.assert_array_equal(unseen[0, 1:], [0, 0])
        with self.assertRaises(FeatureError):
            pre.transform(np.array([[2.0]], dtype=object))

    def test_010_static_fusion(self):
        """Check the static fusion on the worked example."""
        print('INFO: [TEST_010] Check the static fusion')
        prediction = classify_fusion(EXAMPLE_MIN, 'min')
        np.testing.assert_allclose(prediction.fused_scores, [0.3, 0.5])
        self.assertEqual(prediction.class_index, 1)
        self.assertIsNone(prediction.member_weights)
        prediction = classify_fusion(EXAMPLE_MIN, 'arith')
        np.testing.assert_allclose(prediction.fused_scores, [0.41667, 0.58333], atol=1e-5)
        self.assertEqual(prediction.class_index, 1)
        # Any scalar function of a class column
        prediction = classify_fusion(EXAMPLE_MIN, lambda column: float(np.max(column)))
        np.testing.assert_allclose(prediction.fused_scores, [0.5, 0.7])
        with self.assertRaises(ConfigurationError):
            classify_fusion(EXAMPLE_MIN, 'h_arith')

    def test_011_gm_fusion(self):
        """Check the GM fusion on the worked example."""
        print('INFO: [TEST_011] Check the GM fusion')
        prediction = classify_gm(EXAMPLE_GM, 'h_arith')
        np.testing.assert_allclose(prediction.fused_scores, [0.54, 0.46], atol=1e-9)
        np.testing.assert_allclose(prediction.referential, [0.566667, 0.433333], atol=1e-6)
        np.testing.assert_allclose(prediction.member_weights[:, 0], [0.25, 0.30, 0.45], atol=1e-9)
        np.testing.assert_allclose(prediction.member_weights[:, 1], [0.25, 0.30, 0.45], atol=1e-9)
        self.assertEqual(prediction.class_index, 0)
        prediction = classify_gm(EXAMPLE_GM, 'h_max')
        self.assertAlmostEqual(float(prediction.fused_scores[0]), 0.66, delta=1e-9)
        # Identical rows: the fused value is the common row
        prediction = classify_gm([[0.2, 0.8], [0.2, 0.8], [0.2, 0.8]], 'h_med')
        np.testing.assert_allclose(prediction.fused_scores, [0.2, 0.8])
        np.testing.assert_allclose(prediction.member_weights, np.full((3, 2), 1 / 3))
        self.assertEqual(prediction.class_index, 1)

    def test_012_majority_vote(self):
        """Check the majority vote."""
        print('INFO: [TEST_012] Check the majority vote')
        prediction = majority_vote([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
        np.testing.assert_allclose(prediction.fused_scores, [1 / 3, 2 / 3])
        self.assertEqual(prediction.class_index, 1)
        for policy in ('lowest-index', 'seeded-random'):
            prediction = majority_vote(EXAMPLE_MIN, policy, derive_rng(0, 'ties'))
            self.assertEqual(prediction.class_index, 1)
        self.assertEqual(majority_vote([[0.0, 0.0, 1.0]] * 4).class_index, 2)

    def test_013_tie_break(self):
        """Check the tie policies."""
        print('INFO: [TEST_013] Check the tie policies')
        self.assertEqual(tie_break((0.5, 0.5)), 0)
        self.assertEqual(tie_break((0.3, 0.5)), 1)
        self.assertEqual(tie_break((0.3, 0.5), 'seeded-random', derive_rng(1, 'ties')), 1)
        first = tie_break((0.4, 0.4, 0.2), 'seeded-random', derive_rng(3, 'ties'))
        again = tie_break((0.4, 0.4, 0.2), 'seeded-random', derive_rng(3, 'ties'))
        self.assertIn(first, (0, 1))
        self.assertEqual(first, again)
        with self.assertRaises(ConfigurationError):
            tie_break((0.5, 0.5), 'coin')
        # Ties within 1e-12 are ties
        self.assertEqual(tie_break((0.5 - 1e-13, 0.5)), 0)
        # One generator per batch: tied rows do not all replay the same draw
        tied = np.full((64, 2, 2), 0.5)
        for combiner in ('arith', 'vote'):
            decisions = fuse_batch(tied, combiner, 'seeded-random').classes
            self.assertEqual(set(decisions.tolist()), {0, 1}, msg=combiner)
            np.testing.assert_array_equal(decisions, fuse_batch(tied, combiner, 'seeded-random').classes)

    def test_014_unanimity(self):
        """Check that every combiner follows unanimous one-hot members."""
        print('INFO: [TEST_014] Check the unanimity of every combiner')
        scores = [[0.0, 1.0, 0.0]] * 3
        for combiner in COMBINERS:
            prediction = classify(scores, combiner)
            self.assertEqual(prediction.class_index, 1, msg=combiner)
            self.assertEqual(prediction.class_index, int(np.argmax(prediction.fused_scores)))
            self.assertEqual(prediction.fused_scores.shape, (3,))

    def test_015_malformed_scores(self):
        """Check the score matrix validation."""
        print('INFO: [TEST_015] Check the score matrix validation')
        with self.assertRaises(MalformedScoresError) as ctx:
            as_score_matrix([[0.5, 0.5], [0.6, 0.3]])
        self.assertIn('row 2', str(ctx.exception))
        with self.assertRaises(MalformedScoresError):
            as_score_matrix([[0.5, 0.5]])
        with self.assertRaises(MalformedScoresError):
            as_score_matrix([[1.0], [1.0]])
        with self.assertRaises(MalformedScoresError):
            as_score_matrix([[1.5, -0.5], [0.5, 0.5]])
        with self.assertRaises(MalformedScoresError):
            classify_gm([[0.9, 0.3], [0.5, 0.5]])
        normalized = as_score_matrix([[0.9, 0.3], [0.5, 0.5]], normalize=True)
        np.testing.assert_allclose(normalized[0], [0.75, 0.25])
        with self.assertRaises(MalformedScoresError):
            as_score_matrix([[0.0, 0.0], [0.5, 0.5]], normalize=True)

    def test_016_gm_column_homogeneity(self):
        """Check that scaling one class column scales its fused value."""
        print('INFO: [TEST_016] Check the per-column homogeneity of the GM fusion')
        rng = np.random.default_rng(11)
        scores = rng.dirichlet(np.ones(3), size=5)
        for combiner in ('h_med', 'h_arith', 'h_max', 'h_min'):
            base = fuse_batch(scores[None], combiner).values[0]
            for lam in (0.25, 0.5, 1.0):
                scaled = scores.copy()
                scaled[:, 1] *= lam
                values = fuse_batch(scaled[None], combiner).values[0]
                self.assertAlmostEqual(float(values[1]), lam * float(base[1]), delta=1e-9)
                self.assertAlmostEqual(float(values[0]), float(base[0]), delta=1e-12)

    def test_017_arith_matches_uniform_gm(self):
        """Check that arith and the GM fusion agree on identical rows."""
        print('INFO: [TEST_017] Check arith against uniform GM weights')
        scores = [[0.1, 0.6, 0.3]] * 4
        a = classify_fusion(scores, 'arith')
        for combiner in ('h_med', 'h_arith', 'h_max', 'h_min'):
            b = classify_gm(scores, combiner)
            np.testing.assert_allclose(a.fused_scores, b.fused_scores, atol=1e-12)
            self.assertEqual(a.class_index, b.class_index)

    def test_020_composition(self):
        """Check the ensemble compositions."""
        print('INFO: [TEST_020] Check the ensemble compositions')
        self.assertEqual(
            composition_families(7), ['knn', 'knn', 'tree', 'tree', 'naive_bayes', 'logreg', 'perceptron']
        )
        self.assertEqual(composition_families(5), ['knn', 'tree', 'naive_bayes', 'logreg', 'perceptron'])
        families = composition_families(10)
        self.assertEqual(len(families), 10)
        self.assertEqual(families.count('knn'), 3)
        self.assertEqual(families.count('perceptron'), 1)
        self.assertEqual(composition_families(2, 'knn:1,tree:1'), ['knn', 'tree'])
        self.assertEqual(parse_composition('decision-tree:2, knn'), {'tree': 2, 'knn': 1})
        with self.assertRaises(ConfigurationError):
            composition_families(1)
        with self.assertRaises(ConfigurationError):
            parse_composition('knn:0')
        with self.assertRaises(ConfigurationError):
            parse_composition('mlp:1')

    def test_021_train_ensemble(self):
        """Check the ensemble training and prediction."""
        print('INFO: [TEST_021] Check the ensemble training')
        ensemble = train_ensemble(train_set, 7, seed=3)
        self.assertEqual(ensemble.size, 7)
        self.assertEqual(ensemble.families[:2], ('knn', 'knn'))
        self.assertEqual(ensemble.classes, ('c0', 'c1', 'c2'))
        scores = ensemble.member_scores(train_set.X)
        self.assertEqual(scores.shape, (train_set.n_instances, 7, 3))
        np.testing.assert_allclose(scores.sum(axis=2), 1.0, atol=1e-9)
        for combiner in COMBINERS:
            fused = fuse_batch(scores, combiner)
            accuracy = float(np.mean(fused.classes == train_set.y))
            self.assertGreater(accuracy, 0.9, msg=combiner)
        prediction = predict(ensemble, train_set.X[0])
        self.assertEqual(prediction.class_index, train_set.y[0])
        self.assertIsNotNone(prediction.member_weights)
        self.assertEqual(prediction.member_weights.shape, (7, 3))
        # Prediction is pure
        again = predict(ensemble, train_set.X[0])
        np.testing.assert_array_equal(prediction.fused_scores, again.fused_scores)
        with self.assertRaises(FeatureError):
            predict(ensemble, [0.0, 0.0, 0.0])
        vote = predict(ensemble.with_combiner('vote'), train_set.X[0])
        self.assertIsNone(vote.member_weights)
        with self.assertRaises(ConfigurationError):
            ensemble.with_combiner('h_mode')

    def test_022_training_determinism(self):
        """Check that the same seed gives the same ensemble, whatever the workers."""
        print('INFO: [TEST_022] Check the training determinism')
        a = train_ensemble(train_set, 5, seed=9).member_scores(train_set.X)
        b = train_ensemble(train_set, 5, seed=9, workers=3).member_scores(train_set.X)
        c = train_ensemble(train_set, 5, seed=10).member_scores(train_set.X)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))

    def test_023_train_errors(self):
        """Check the training arguments."""
        print('INFO: [TEST_023] Check the training errors')
        with self.assertRaises(ConfigurationError):
            train_ensemble(train_set, 1)
        with self.assertRaises(ConfigurationError):
            train_ensemble(train_set, 5, combiner='h_mode')
        with self.assertRaises(ConfigurationError):
            train_ensemble(train_set, 5, tie_policy='coin')


if __name__ == '__main__':
    unittest.main()
