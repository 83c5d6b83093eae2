#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Sampled checks of the aggregation and GM invariants.

Every check draws its inputs from its own generator derived from the suite
seed, so a failing witness is reproduced by rerunning with the same seed.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from gmfusion.aggregation import (
    AGGREGATIONS,
    check_directional_monotonicity,
    median,
    owa,
    owa_weights_median,
)
from gmfusion.globals import EPS_ARITH, EPS_COMPOSE, derive_int_seed, derive_rng
from gmfusion.logger import logger
from gmfusion.mixture import COMBINER_NAMES, gm_apply, gm_weights, h_theta_batch, make_combiner, ratio_family
from gmfusion.timer import Counter

ARITIES = range(2, 11)


@dataclass(frozen=True)
class PropertyResult:
    """Outcome of one property. control results are expected to detect a violation."""

    name: str
    passed: bool
    checked: int
    witness: Optional[str] = None
    control: bool = False


def _fmt(v):
    return '(' + ', '.join(f'{float(e):.6g}' for e in np.atleast_1d(v)) + ')'


def row_weights(x, selector):
    """WeightsCalc of every row of a (k, n) score array."""
    return gm_weights(x, selector, axis=1)[0]


class PropertySuite:
    """The property suite.

    :param samples: random inputs per property
    :param weights_fn: the WeightsCalc under test, ((k, n) scores, selector) -> (k, n) weights
    """

    def __init__(self, samples=10000, seed=0, weights_fn: Optional[Callable] = None, combiners=None):
        if samples < 1:
            raise ValueError(f'samples must be >= 1, got {samples}')
        self.samples = samples
        self.seed = seed
        self.weights_fn = weights_fn or row_weights
        self.combiners = [make_combiner(name) for name in (combiners or COMBINER_NAMES)]

    def _rng(self, name):
        return derive_rng(self.seed, f'props-{name}')

    def _vectors(self, rng, low_open=False):
        """samples random unit vectors with n cycling over 2..10."""
        for i in range(self.samples):
            n = ARITIES[i % len(ARITIES)]
            x = rng.random(n)
            yield 1.0 - x if low_open else x

    def _check(self, name, predicate, vectors):
        """Run predicate(x) -> (ok, detail) over vectors; stop at the first failure."""
        checked = 0
        for x in vectors:
            checked += 1
            ok, detail = predicate(x)
            if not ok:
                return PropertyResult(name, False, checked, f'x={_fmt(x)} {detail}')
        return PropertyResult(name, True, checked)

    #################
    # Aggregations
    #################

    def boundary(self):
        functions = dict(AGGREGATIONS)
        functions['median'] = median
        checked = 0
        for n in range(1, 11):
            functions_n = dict(functions)
            functions_n['owa'] = lambda x, n=n: owa(np.full(n, 1.0 / n), x)
            for label, f in functions_n.items():
                for target in (0.0, 1.0):
                    checked += 1
                    value = f(np.full(n, target))
                    if abs(value - target) > EPS_ARITH:
                        return PropertyResult('boundary', False, checked, f'{label} on {n} x {target} = {value!r}')
        return PropertyResult('boundary', True, checked)

    def owa_averaging(self):
        rng = self._rng('owa-averaging')

        def predicate(x):
            value = owa(rng.dirichlet(np.ones(x.size)), x)
            return x.min() - EPS_ARITH <= value <= x.max() + EPS_ARITH, f'owa={value!r}'

        return self._check('owa averaging', predicate, self._vectors(rng))

    def owa_symmetry(self):
        rng = self._rng('owa-symmetry')

        def predicate(x):
            w = rng.dirichlet(np.ones(x.size))
            a, b = owa(w, x), owa(w, rng.permutation(x))
            return abs(a - b) <= EPS_ARITH, f'{a!r} != {b!r}'

        return self._check('owa symmetry', predicate, self._vectors(rng))

    def owa_shift_invariance(self):
        rng = self._rng('owa-shift')

        def predicate(x):
            w = rng.dirichlet(np.ones(x.size))
            lam = rng.uniform(-x.min(), 1.0 - x.max())
            a, b = owa(w, np.clip(x + lam, 0.0, 1.0)), owa(w, x) + lam
            return abs(a - b) <= EPS_ARITH, f'lambda={lam!r} {a!r} != {b!r}'

        return self._check('owa shift invariance', predicate, self._vectors(rng))

    def idempotency(self):
        rng = self._rng('idempotency')

        def predicate(x):
            value, n = float(x[0]), x.size
            constant = np.full(n, value)
            results = {label: f(constant) for label, f in AGGREGATIONS.items() if label != 'prod'}
            results['owa'] = owa(rng.dirichlet(np.ones(n)), constant)
            bad = {k: v for k, v in results.items() if abs(v - value) > EPS_ARITH}
            return not bad, f'{bad}'

        return self._check('idempotency', predicate, self._vectors(rng))

    def median_as_owa(self):
        rng = self._rng('median-owa')

        def predicate(x):
            a, b = median(x), owa(owa_weights_median(x.size), x)
            return abs(a - b) <= EPS_ARITH, f'median={a!r} owa={b!r}'

        return self._check('median equals owa', predicate, self._vectors(rng))

    #################
    # GM combiners
    #################

    def _batches(self, rng, low_open=False):
        """samples random unit vectors grouped by arity: (sample indices, (k, n) array) pairs.

        Sample i has n = ARITIES[i % 9], as in _vectors().
        """
        index = np.arange(self.samples)
        arity = np.asarray(ARITIES)[index % len(ARITIES)]
        for n in ARITIES:
            rows = index[arity == n]
            if rows.size:
                x = rng.random((rows.size, n))
                yield rows, (1.0 - x if low_open else x)

    def _check_rows(self, name, predicate, batches):
        """Run predicate(x) -> (ok per row, detail(row)) over the batches.

        The witness is the failing sample with the lowest index, checked
        counts the samples up to it.
        """
        first = None
        for rows, x in batches:
            ok, detail = predicate(x)
            bad = np.flatnonzero(~np.asarray(ok, dtype=bool))
            if bad.size and (first is None or rows[bad[0]] < first[0]):
                first = (int(rows[bad[0]]), f'x={_fmt(x[bad[0]])} {detail(bad[0])}')
        if first is None:
            return PropertyResult(name, True, self.samples)
        return PropertyResult(name, False, first[0] + 1, first[1])

    def weight_normalization(self, c):
        rng = self._rng(f'weights-{c.name}')

        def predicate(x):
            total = np.sum(self.weights_fn(x, c.selector), axis=1)
            return np.abs(total - 1.0) <= EPS_ARITH, lambda i: f'weights sum to {float(total[i])!r}'

        return self._check_rows(f'{c.label} weight normalization', predicate, self._batches(rng))

    def weight_distance_order(self, c):
        rng = self._rng(f'distance-{c.name}')

        def predicate(x):
            w = self.weights_fn(x, c.selector)
            dist = np.abs(x - c.selector.reduce(x, axis=1))
            closer = dist[:, :, None] < dist[:, None, :] - EPS_ARITH
            bad = closer & ~(w[:, :, None] > w[:, None, :])
            return ~bad.any(axis=(1, 2)), lambda i: f'weights={_fmt(w[i])} distances={_fmt(dist[i])}'

        return self._check_rows(f'{c.label} weights decrease with distance', predicate, self._batches(rng))

    def averaging_bound(self, c):
        rng = self._rng(f'averaging-{c.name}')

        def predicate(x):
            value = h_theta_batch(c, x)
            ok = (x.min(axis=1) - EPS_ARITH <= value) & (value <= x.max(axis=1) + EPS_ARITH)
            return ok, lambda i: f'value={float(value[i])!r}'

        return self._check_rows(f'{c.label} averaging', predicate, self._batches(rng))

    def gm_idempotency(self, c):
        rng = self._rng(f'idempotency-{c.name}')

        def predicate(x):
            value = h_theta_batch(c, np.repeat(x[:, :1], x.shape[1], axis=1))
            return np.abs(value - x[:, 0]) <= EPS_COMPOSE, lambda i: f'value={float(value[i])!r}'

        return self._check_rows(f'{c.label} idempotency', predicate, self._batches(rng))

    def homogeneity(self, c):
        rng = self._rng(f'homogeneity-{c.name}')

        def predicate(x):
            lam = rng.random(x.shape[0])
            a, b = h_theta_batch(c, lam[:, None] * x), lam * h_theta_batch(c, x)
            return np.abs(a - b) <= EPS_COMPOSE, lambda i: f'lambda={float(lam[i])!r} {a[i]!r} != {b[i]!r}'

        return self._check_rows(f'{c.label} homogeneity', predicate, self._batches(rng))

    def shift_invariance(self, c):
        rng = self._rng(f'shift-{c.name}')

        def predicate(x):
            lam = rng.uniform(-x.min(axis=1), 1.0 - x.max(axis=1))
            a = h_theta_batch(c, np.clip(x + lam[:, None], 0.0, 1.0))
            b = h_theta_batch(c, x) + lam
            return np.abs(a - b) <= EPS_COMPOSE, lambda i: f'lambda={float(lam[i])!r} {a[i]!r} != {b[i]!r}'

        return self._check_rows(f'{c.label} shift invariance', predicate, self._batches(rng))

    def symmetry(self, c):
        rng = self._rng(f'symmetry-{c.name}')

        def predicate(x):
            a, b = h_theta_batch(c, x), h_theta_batch(c, rng.permuted(x, axis=1))
            return np.abs(a - b) <= EPS_COMPOSE, lambda i: f'{a[i]!r} != {b[i]!r}'

        return self._check_rows(f'{c.label} symmetry', predicate, self._batches(rng))

    def directional_monotonicity(self, c):
        checked = 0
        per_arity = max(1, self.samples // len(ARITIES))
        for n in ARITIES:
            result = check_directional_monotonicity(
                lambda x: h_theta_batch(c, x),
                np.ones(n),
                samples=per_arity,
                seed=derive_int_seed(self.seed, 'props-monotonicity', n),
                vectorized=True,
            )
            checked += result.checked
            if not result.passed:
                x, y, fx, fy = result.witness
                witness = f'x={_fmt(x)} -> {fx!r}, x+kr={_fmt(y)} -> {fy!r}'
                return PropertyResult(f'{c.label} (1,...,1)-increasing', False, checked, witness)
        return PropertyResult(f'{c.label} (1,...,1)-increasing', True, checked)

    def oracle_equivalence(self, c):
        rng = self._rng(f'oracle-{c.name}')

        def predicate(x):
            a = h_theta_batch(c, x)
            b = np.sum(self.weights_fn(x, c.selector) * x, axis=1)
            return np.abs(a - b) <= EPS_ARITH, lambda i: f'closed form {a[i]!r} != two-step {b[i]!r}'

        return self._check_rows(f'{c.label} closed form equals weighted sum', predicate, self._batches(rng))

    def no_divisors(self, c):
        rng = self._rng(f'divisors-{c.name}')

        def predicate(x):
            low, high = h_theta_batch(c, x), h_theta_batch(c, 1.0 - x)
            return (low > 0.0) & (high < 1.0), lambda i: f'H(x)={low[i]!r} H(1-x)={high[i]!r}'

        # x in (0,1], so 1 - x in [0,1)
        return self._check_rows(f'{c.label} no zero or one divisors', predicate, self._batches(rng, low_open=True))

    def ratio_control(self):
        """The ratio GM must be caught violating monotonicity on its known witness."""
        fwf = ratio_family(3)
        result = check_directional_monotonicity(
            lambda x: gm_apply(fwf, x),
            (0.0, 0.02, 0.1),
            samples=0,
            step_grid=[1.0],
            points=[(0.5, 0.2, 0.1)],
        )
        witness = None
        if result.witness is not None:
            x, y, fx, fy = result.witness
            witness = f'x={_fmt(x)} -> {fx:.6f}, y={_fmt(y)} -> {fy:.6f}'
        return PropertyResult('ratio GM is not monotone (control)', not result.passed, result.checked, witness, True)

    def run(self):
        counter = Counter()
        results = [
            self.boundary(),
            self.owa_averaging(),
            self.owa_symmetry(),
            self.owa_shift_invariance(),
            self.idempotency(),
            self.median_as_owa(),
        ]
        for c in self.combiners:
            results.extend(
                [
                    self.weight_normalization(c),
                    self.weight_distance_order(c),
                    self.averaging_bound(c),
                    self.gm_idempotency(c),
                    self.homogeneity(c),
                    self.shift_invariance(c),
                    self.symmetry(c),
                    self.directional_monotonicity(c),
                    self.oracle_equivalence(c),
                    self.no_divisors(c),
                ]
            )
        results.append(self.ratio_control())
        failed = [r.name for r in results if not r.passed]
        logger.info(f'Property suite: {len(results)} properties, {len(failed)} failed, {counter.get():.1f}s')
        return results


def run_property_suite(samples=10000, seed=0, weights_fn: Optional[Callable] = None, combiners=None):
    """Run every property and return the list of PropertyResult."""
    return PropertySuite(samples, seed, weights_fn, combiners).run()
