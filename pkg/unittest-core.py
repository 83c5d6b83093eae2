#!/usr/bin/env python
#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""gmfusion unitary tests suite: aggregations, GM functions and the property suite."""

import unittest

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from gmfusion import __version__
from gmfusion.aggregation import (
    AGGREGATIONS,
    agg_arith,
    agg_max,
    agg_min,
    agg_prod,
    check_directional_monotonicity,
    decreasing,
    median,
    owa,
    owa_weights_median,
)
from gmfusion.errors import ArityError, ConfigurationError, DomainError, RangeError
from gmfusion.globals import derive_int_seed, derive_rng
from gmfusion.mixture import (
    COMBINER_NAMES,
    WeightFunctionFamily,
    constant_family,
    gm_apply,
    h_function_apply,
    h_theta_apply,
    h_theta_batch,
    make_combiner,
    max_family,
    min_family,
    owa_family,
    ratio_family,
    selector_family,
    weights_calc,
    weights_detail,
)
from gmfusion.properties import PropertySuite, row_weights, run_property_suite

# Global variables
# =================

unit_vectors = st.lists(st.floats(min_value=0.0, max_value=1.0, allow_nan=False), min_size=2, max_size=10)

# Unitest class
# ==============
print(f'Unitary tests for gmfusion {__version__}')


class TestGmfusionCore(unittest.TestCase):
    """Test the aggregation and GM functions."""

    def setUp(self):
        """The function is called *every time* before test_*."""
        print('\n' + '=' * 78)

    def test_000_version(self):
        """Check the version string."""
        print('INFO: [TEST_000] Check the version string')
        self.assertTrue(__version__[0].isdigit())
        self.assertTrue(__version__[-1].isdigit())

    def test_001_basic_aggregations(self):
        """Check min, max, arith and prod."""
        print('INFO: [TEST_001] Check min, max, arith and prod')
        self.assertEqual(agg_min((0.45, 0.3, 0.5)), 0.3)
        self.assertEqual(agg_max((0.3, 0.5)), 0.5)
        self.assertAlmostEqual(agg_arith((0.9, 0.3, 0.5)), 0.566667, delta=1e-6)
        self.assertAlmostEqual(agg_arith((0.1, 0.7, 0.5)), 0.433333, delta=1e-6)
        self.assertAlmostEqual(agg_prod((0.5, 0.5)), 0.25, delta=1e-15)
        self.assertEqual(sorted(AGGREGATIONS), ['arith', 'max', 'min', 'prod'])
        for f in AGGREGATIONS.values():
            self.assertEqual(f((0.0, 0.0, 0.0)), 0.0)
            self.assertEqual(f((1.0, 1.0, 1.0)), 1.0)

    def test_002_domain_errors(self):
        """Check that out of range inputs are rejected."""
        print('INFO: [TEST_002] Check the domain errors')
        with self.assertRaises(DomainError):
            agg_min((0.2, 1.2))
        with self.assertRaises(DomainError):
            agg_max((0.2, float('nan')))
        with self.assertRaises(ArityError):
            agg_arith(())
        with self.assertRaises(DomainError):
            owa((0.5, 0.6), (0.1, 0.2))
        with self.assertRaises(ArityError):
            owa((0.5, 0.5), (0.1, 0.2, 0.3))
        # Domain errors are ValueErrors for generic callers
        self.assertTrue(issubclass(DomainError, ValueError))
        self.assertTrue(issubclass(RangeError, ArithmeticError))

    def test_003_owa(self):
        """Check the OWA operator on the worked example."""
        print('INFO: [TEST_003] Check the OWA operator')
        self.assertAlmostEqual(owa((0.2, 0.45, 0.35), (0.7, 0.0, 0.3)), 0.275, delta=1e-12)
        np.testing.assert_array_equal(decreasing((0.1, 0.7, 0.3)), [0.7, 0.3, 0.1])
        # w = (1, 0, ..., 0) is the maximum, w = (0, ..., 0, 1) the minimum
        self.assertEqual(owa((1.0, 0.0, 0.0), (0.2, 0.9, 0.4)), 0.9)
        self.assertEqual(owa((0.0, 0.0, 1.0), (0.2, 0.9, 0.4)), 0.2)

    def test_004_median(self):
        """Check the median convention and its OWA weights."""
        print('INFO: [TEST_004] Check the median')
        self.assertAlmostEqual(median((0.7, 0.0, 0.3, 0.4)), 0.35, delta=1e-15)
        self.assertEqual(median((0.9, 0.3, 0.5)), 0.5)
        self.assertEqual(median((0.4,)), 0.4)
        np.testing.assert_array_equal(owa_weights_median(3), [0.0, 1.0, 0.0])
        np.testing.assert_array_equal(owa_weights_median(4), [0.0, 0.5, 0.5, 0.0])
        rng = np.random.default_rng(3)
        for n in range(1, 11):
            x = rng.random(n)
            self.assertAlmostEqual(median(x), float(np.median(x)), delta=1e-15)
            self.assertAlmostEqual(median(x), owa(owa_weights_median(n), x), delta=1e-12)

    def test_005_weight_function_families(self):
        """Check gm_apply with the simple weight-function families."""
        print('INFO: [TEST_005] Check the weight-function families')
        x = (0.9, 0.3, 0.5)
        self.assertAlmostEqual(gm_apply(constant_family(3), x), 0.566667, delta=1e-6)
        self.assertEqual(gm_apply(max_family(3), x), 0.9)
        self.assertEqual(gm_apply(min_family(3), x), 0.3)
        self.assertAlmostEqual(gm_apply(owa_family((0.2, 0.45, 0.35)), (0.7, 0.0, 0.3)), 0.275, delta=1e-12)
        with self.assertRaises(ArityError):
            gm_apply(constant_family(2), x)
        unnormalized = WeightFunctionFamily(3, lambda v: np.full(3, 0.5), name='broken')
        with self.assertRaises(DomainError):
            gm_apply(unnormalized, x)

    def test_006_ratio_family(self):
        """Check the values of the ratio GM function."""
        print('INFO: [TEST_006] Check the ratio GM function')
        fwf = ratio_family(3)
        self.assertAlmostEqual(gm_apply(fwf, (0.5, 0.2, 0.1)), 0.375, delta=1e-12)
        self.assertAlmostEqual(gm_apply(fwf, (0.5, 0.22, 0.2)), 0.367826, delta=5e-4)
        self.assertEqual(gm_apply(fwf, (0.0, 0.0, 0.0)), 0.0)
        self.assertAlmostEqual(gm_apply(fwf, (1.0, 1.0, 1.0)), 1.0, delta=1e-12)

    def test_007_monotonicity_witness(self):
        """Check that the monotonicity checker flags the ratio GM on its witness pair."""
        print('INFO: [TEST_007] Check the monotonicity witness of the ratio GM')
        fwf = ratio_family(3)
        result = check_directional_monotonicity(
            lambda x: gm_apply(fwf, x), (0.0, 0.02, 0.1), samples=0, step_grid=[1.0], points=[(0.5, 0.2, 0.1)]
        )
        self.assertFalse(result.passed)
        self.assertFalse(bool(result))
        x, y, fx, fy = result.witness
        np.testing.assert_allclose(x, [0.5, 0.2, 0.1])
        np.testing.assert_allclose(y, [0.5, 0.22, 0.2])
        self.assertAlmostEqual(fx, 0.375, delta=1e-12)
        self.assertAlmostEqual(fy, 0.367826, delta=5e-4)
        # The same pair does not trouble the arithmetic mean
        result = check_directional_monotonicity(
            agg_arith, (0.0, 0.02, 0.1), samples=0, step_grid=[1.0], points=[(0.5, 0.2, 0.1)]
        )
        self.assertTrue(result.passed)
        self.assertEqual(result.checked, 1)

    def test_008_monotonicity_checker(self):
        """Check the directional monotonicity checker on known functions."""
        print('INFO: [TEST_008] Check the directional monotonicity checker')
        for f in (agg_min, agg_max, agg_arith, agg_prod, median):
            self.assertTrue(check_directional_monotonicity(f, np.ones(4), samples=200, seed=1).passed)
        # 1 - x_1 decreases along (1, 0)
        result = check_directional_monotonicity(lambda x: 1.0 - x[0], (1.0, 0.0), samples=50, seed=1)
        self.assertFalse(result.passed)
        with self.assertRaises(DomainError):
            check_directional_monotonicity(agg_min, (0.0, 0.0))
        with self.assertRaises(ArityError):
            check_directional_monotonicity(agg_min, (1.0, 1.0), samples=0, points=[(0.1, 0.2, 0.3)])

    def test_010_weights_calc(self):
        """Check WeightsCalc on the worked example."""
        print('INFO: [TEST_010] Check WeightsCalc')
        h_arith = make_combiner('h_arith')
        detail = weights_detail((0.9, 0.3, 0.5), h_arith.selector)
        self.assertAlmostEqual(detail.alpha, 0.566667, delta=1e-6)
        self.assertAlmostEqual(detail.distance_sum, 2.0 / 3.0, delta=1e-12)
        np.testing.assert_allclose(detail.weights, [0.25, 0.30, 0.45], atol=1e-9)
        np.testing.assert_allclose(weights_calc((0.1, 0.7, 0.5), h_arith.selector), [0.25, 0.30, 0.45], atol=1e-9)
        # d = 0: uniform weights
        for name in COMBINER_NAMES:
            np.testing.assert_allclose(weights_calc((0.4, 0.4, 0.4), make_combiner(name).selector), [1 / 3] * 3)
        with self.assertRaises(ArityError):
            weights_calc((0.4,), h_arith.selector)

    def test_011_h_theta(self):
        """Check the closed form of the four H_Theta combiners."""
        print('INFO: [TEST_011] Check H_Med, H_Arith, H_Max and H_Min')
        x = (0.9, 0.3, 0.5)
        self.assertAlmostEqual(h_theta_apply(make_combiner('h_arith'), x), 0.54, delta=1e-9)
        self.assertAlmostEqual(h_theta_apply(make_combiner('h_arith'), (0.1, 0.7, 0.5)), 0.46, delta=1e-9)
        self.assertAlmostEqual(h_theta_apply(make_combiner('h_med'), x), 0.5, delta=1e-9)
        self.assertAlmostEqual(h_theta_apply(make_combiner('h_max'), x), 0.66, delta=1e-9)
        np.testing.assert_allclose(weights_calc(x, make_combiner('h_med').selector), [1 / 6, 1 / 3, 1 / 2])
        np.testing.assert_allclose(weights_calc(x, make_combiner('h_max').selector), [0.5, 0.2, 0.3])
        h_min = make_combiner('h_min')
        self.assertEqual(h_min.label, 'H_Min')
        value = h_theta_apply(h_min, x)
        self.assertTrue(0.3 <= value <= 0.9)
        self.assertEqual(h_theta_apply(make_combiner('median'), (0.2, 0.2, 0.2)), 0.2)
        with self.assertRaises(ArityError):
            h_theta_apply(h_min, (0.3,))

    def test_012_make_combiner(self):
        """Check the combiner names."""
        print('INFO: [TEST_012] Check the combiner names')
        self.assertEqual(sorted(COMBINER_NAMES), ['h_arith', 'h_max', 'h_med', 'h_min'])
        self.assertEqual(make_combiner('h_med'), make_combiner('median'))
        self.assertEqual(make_combiner('arithmetic-mean').name, 'h_arith')
        with self.assertRaises(ConfigurationError) as ctx:
            make_combiner('h_mode')
        self.assertIn('h_arith', str(ctx.exception))

    def test_013_h_function(self):
        """Check the original H function and its 1/n factor."""
        print('INFO: [TEST_013] Check the original H function')
        self.assertAlmostEqual(h_function_apply((0.9, 0.3, 0.5)), 1.0 / 3.0, delta=1e-12)
        self.assertAlmostEqual(
            h_function_apply((0.9, 0.3, 0.5)), 2.0 / 3.0 * h_theta_apply(make_combiner('h_med'), (0.9, 0.3, 0.5))
        )
        self.assertEqual(h_function_apply((0.6, 0.6, 0.6)), 0.6)
        self.assertTrue(0.0 <= h_function_apply((0.0, 1.0)) <= 1.0)
        with self.assertRaises(ArityError):
            h_function_apply((0.5,))

    def test_014_selector_family(self):
        """Check that H_Theta is a GM function of its own weight family."""
        print('INFO: [TEST_014] Check the H_Theta weight families')
        rng = np.random.default_rng(7)
        for name in COMBINER_NAMES:
            c = make_combiner(name)
            for n in (2, 5, 9):
                x = rng.random(n)
                self.assertAlmostEqual(gm_apply(selector_family(c.selector, n), x), h_theta_apply(c, x), delta=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(unit_vectors)
    def test_015_averaging_and_oracle(self, values):
        """Check the averaging bound and the weighted sum on generated inputs."""
        x = np.array(values)
        for name in COMBINER_NAMES:
            c = make_combiner(name)
            value = h_theta_apply(c, x)
            self.assertGreaterEqual(value, x.min() - 1e-12)
            self.assertLessEqual(value, x.max() + 1e-12)
            w = weights_calc(x, c.selector)
            self.assertAlmostEqual(float(w.sum()), 1.0, delta=1e-12)
            self.assertAlmostEqual(float(np.dot(w, x)), value, delta=1e-12)

    @settings(max_examples=300, deadline=None)
    @given(unit_vectors)
    def test_016_symmetry(self, values):
        """Check the permutation symmetry of H_Theta and OWA on generated inputs."""
        x = np.array(values)
        for name in COMBINER_NAMES:
            c = make_combiner(name)
            self.assertAlmostEqual(h_theta_apply(c, x), h_theta_apply(c, x[::-1]), delta=1e-9)
        w = np.full(x.size, 1.0 / x.size)
        self.assertAlmostEqual(owa(w, x), owa(w, x[::-1]), delta=1e-12)

    def test_020_seed_derivation(self):
        """Check the seed derivation helpers."""
        print('INFO: [TEST_020] Check the seed derivation')
        a = derive_rng(5, 'member', 1).random(4)
        b = derive_rng(5, 'member', 1).random(4)
        c = derive_rng(5, 'member', 2).random(4)
        d = derive_rng(5, 'folds', 1).random(4)
        np.testing.assert_array_equal(a, b)
        self.assertFalse(np.array_equal(a, c))
        self.assertFalse(np.array_equal(a, d))
        self.assertEqual(derive_int_seed(0, 'ensemble', 0, 1, 2, 5), derive_int_seed(0, 'ensemble', 0, 1, 2, 5))
        self.assertNotEqual(derive_int_seed(0, 'ensemble', 0, 1, 2, 5), derive_int_seed(0, 'ensemble', 0, 1, 2, 7))

    def test_030_property_suite(self):
        """Check that every property holds on a small sample."""
        print('INFO: [TEST_030] Run the property suite')
        results = run_property_suite(samples=180, seed=0)
        failed = [(r.name, r.witness) for r in results if not r.passed]
        self.assertEqual(failed, [])
        names = [r.name for r in results]
        for label in ('H_Med', 'H_Arith', 'H_Max', 'H_Min'):
            self.assertIn(f'{label} weight normalization', names)
            self.assertIn(f'{label} (1,...,1)-increasing', names)
        control = [r for r in results if r.control]
        self.assertEqual(len(control), 1)
        self.assertTrue(control[0].passed)
        self.assertIn('0.375', control[0].witness)
        print(f'INFO: {len(results)} properties checked')

    def test_031_property_suite_gm_scale(self):
        """Check the weight normalization and the closed form on 10^4 inputs per combiner."""
        print('INFO: [TEST_031] Check the GM weights on 10000 inputs')
        suite = PropertySuite(samples=10000, seed=1)
        for c in suite.combiners:
            for result in (suite.weight_normalization(c), suite.oracle_equivalence(c), suite.averaging_bound(c)):
                self.assertTrue(result.passed, msg=f'{result.name}: {result.witness}')
                self.assertEqual(result.checked, 10000)

    def test_032_broken_weights(self):
        """Check that unnormalized weights are caught with a witness."""
        print('INFO: [TEST_032] Check the property suite on broken weights')

        def broken(o, selector):
            return row_weights(o, selector) * 1.1

        suite = PropertySuite(samples=50, seed=0, weights_fn=broken, combiners=['h_arith'])
        result = suite.weight_normalization(suite.combiners[0])
        self.assertFalse(result.passed)
        self.assertEqual(result.checked, 1)
        self.assertIn('weights sum to', result.witness)
        # Same seed, same witness
        again = PropertySuite(samples=50, seed=0, weights_fn=broken, combiners=['h_arith'])
        self.assertEqual(again.weight_normalization(again.combiners[0]).witness, result.witness)
        results = run_property_suite(samples=20, seed=0, weights_fn=broken, combiners=['h_arith'])
        self.assertIn('H_Arith weight normalization', [r.name for r in results if not r.passed])

    def test_033_property_suite_arguments(self):
        """Check the property suite arguments."""
        print('INFO: [TEST_033] Check the property suite arguments')
        with self.assertRaises(ValueError):
            PropertySuite(samples=0)
        with self.assertRaises(ConfigurationError):
            PropertySuite(samples=10, combiners=['h_mode'])

    def test_034_batch_forms(self):
        """Check that the row-wise forms used by the property suite match the scalar ones."""
        print('INFO: [TEST_034] Check the row-wise closed form and monotonicity check')
        rng = np.random.default_rng(9)
        for n in (2, 3, 7):
            x = rng.random((40, n))
            x[0] = 0.3
            for name in COMBINER_NAMES:
                c = make_combiner(name)
                expected = [h_theta_apply(c, row) for row in x]
                np.testing.assert_allclose(h_theta_batch(c, x), expected, atol=1e-12)
                np.testing.assert_allclose(row_weights(x, c.selector), [weights_calc(row, c.selector) for row in x])
        with self.assertRaises(ArityError):
            h_theta_batch(make_combiner('h_med'), np.zeros((3, 1)))
        # Same pairs, same count and same witness in both modes
        c = make_combiner('h_med')
        scalar = check_directional_monotonicity(lambda v: h_theta_apply(c, v), np.ones(5), samples=300, seed=4)
        rows = check_directional_monotonicity(
            lambda v: h_theta_batch(c, v), np.ones(5), samples=300, seed=4, vectorized=True
        )
        self.assertEqual((scalar.passed, scalar.checked), (rows.passed, rows.checked))
        fwf = ratio_family(3)
        witness_point = {'samples': 0, 'step_grid': [1.0], 'points': [(0.5, 0.2, 0.1)]}
        scalar = check_directional_monotonicity(lambda v: gm_apply(fwf, v), (0.0, 0.02, 0.1), **witness_point)
        rows = check_directional_monotonicity(
            lambda v: np.array([gm_apply(fwf, row) for row in v]), (0.0, 0.02, 0.1), vectorized=True, **witness_point
        )
        self.assertFalse(rows.passed)
        self.assertEqual(scalar.checked, rows.checked)
        self.assertAlmostEqual(rows.witness[2], 0.375, delta=1e-9)
        np.testing.assert_allclose(rows.witness[1], scalar.witness[1])



if __name__ == '__main__':
    unittest.main()
