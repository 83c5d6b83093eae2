#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Generalized mixture (GM) functions.

A GM function is a weighted average whose weights are computed from the
input itself by a family of weight-functions (FWF). The H_Theta family
weights every input by its distance to a referential point Theta(x):

    w_i = (1 - |x_i - Theta(x)| / sum_j |x_j - Theta(x)|) / (n - 1)

so inputs far from the consensus get low weights. H_Med, H_Arith, H_Max and
H_Min use the median, the arithmetic mean, the maximum and the minimum as
Theta.
"""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from gmfusion.aggregation import as_unit_vector, check_unit, median
from gmfusion.errors import ArityError, ConfigurationError, DomainError
from gmfusion.globals import EPS_COMPOSE, EPS_ZERO_DISTANCE

SELECTOR_KINDS = ('median', 'arithmetic-mean', 'maximum', 'minimum')

# Combiner name -> referential selector kind
COMBINER_NAMES = {
    'h_med': 'median',
    'h_arith': 'arithmetic-mean',
    'h_max': 'maximum',
    'h_min': 'minimum',
}

COMBINER_LABELS = {
    'median': 'H_Med',
    'arithmetic-mean': 'H_Arith',
    'maximum': 'H_Max',
    'minimum': 'H_Min',
}

_REDUCERS = {
    'median': np.median,
    'arithmetic-mean': np.mean,
    'maximum': np.max,
    'minimum': np.min,
}


@dataclass(frozen=True)
class ReferentialSelector:
    """The Theta function choosing the per-class referential point."""

    kind: str

    def __post_init__(self):
        if self.kind not in SELECTOR_KINDS:
            raise ConfigurationError(
                f"Unknown referential selector '{self.kind}' (supported: {', '.join(SELECTOR_KINDS)})"
            )

    def evaluate(self, x):
        """Theta(x) for a single unit vector."""
        if self.kind == 'median':
            return median(x)
        return float(_REDUCERS[self.kind](as_unit_vector(x)))

    def reduce(self, o, axis=0):
        """Theta along an axis of a score array (keeps the reduced axis)."""
        return _REDUCERS[self.kind](o, axis=axis, keepdims=True)


@dataclass(frozen=True)
class GmCombiner:
    """An H_Theta combiner: a referential selector plus its display name."""

    selector: ReferentialSelector
    label: str
    name: str = field(default='')

    def apply(self, x):
        return h_theta_apply(self, x)

    def weights(self, o):
        return weights_calc(o, self.selector)


class WeightFunctionFamily:
    """A family of n weight-functions, f(x) returns the n weights for input x.

    The weights must sum to 1 for every input; gm_apply() enforces it.
    """

    def __init__(self, n: int, f: Callable[[np.ndarray], np.ndarray], name: str = 'fwf'):
        if n < 1:
            raise ArityError('a weight-function family needs n >= 1')
        self.n = n
        self.f = f
        self.name = name

    def __repr__(self):
        return f'WeightFunctionFamily({self.name}, n={self.n})'

    def __call__(self, x):
        return np.asarray(self.f(x), dtype=float)


@dataclass(frozen=True)
class WeightCalculation:
    """Intermediate values of one WeightsCalc run (printed by the combine trace)."""

    alpha: float
    distance_sum: float
    weights: np.ndarray


def gm_apply(fwf: WeightFunctionFamily, x):
    """GM_Gamma(x) = sum_i f_i(x) * x_i."""
    v = as_unit_vector(x)
    if v.size != fwf.n:
        raise ArityError(f'{fwf.name} expects {fwf.n} inputs, got {v.size}')
    w = fwf(v)
    if w.shape != v.shape:
        raise ArityError(f'{fwf.name} returned {w.size} weights for {v.size} inputs')
    if abs(float(w.sum()) - 1.0) > EPS_COMPOSE:
        raise DomainError(f'{fwf.name} weights sum to {float(w.sum())}, 1 expected')
    return check_unit(np.dot(w, v))


def gm_weights(o, selector: ReferentialSelector, axis=0):
    """Vectorized WeightsCalc along one axis of a score array.

    Used by weights_calc() for a single column and by the ensemble fusion for
    whole batches of score matrices.

    :return: (weights, alpha, d) where alpha and d keep the reduced axis
    """
    o = np.asarray(o, dtype=float)
    n = o.shape[axis]
    alpha = selector.reduce(o, axis=axis)
    dist = np.abs(o - alpha)
    d = dist.sum(axis=axis, keepdims=True)
    # d == 0 means every input equals alpha: uniform weights
    flat = d <= EPS_ZERO_DISTANCE
    safe_d = np.where(flat, 1.0, d)
    w = np.where(flat, 1.0 / n, (1.0 - dist / safe_d) / (n - 1))
    return w, alpha, d


def weights_detail(o, selector: ReferentialSelector):
    """WeightsCalc with its intermediate values for a single score column."""
    v = as_unit_vector(o, name='scores')
    if v.size < 2:
        raise ArityError(f'WeightsCalc needs at least 2 scores, got {v.size}')
    w, alpha, d = gm_weights(v, selector, axis=0)
    return WeightCalculation(alpha=float(alpha[0]), distance_sum=float(d[0]), weights=w)


def weights_calc(o, selector: ReferentialSelector):
    """Dynamic weights of N member scores for one class."""
    return weights_detail(o, selector).weights


def h_theta_batch(c: GmCombiner, x):
    """h_theta_apply() on every row of a (k, n) array, n >= 2."""
    rows = np.asarray(x, dtype=float)
    if rows.ndim != 2 or rows.shape[1] < 2:
        raise ArityError(f'{c.label} needs rows of at least 2 inputs, got shape {rows.shape}')
    n = rows.shape[1]
    dist = np.abs(rows - c.selector.reduce(rows, axis=1))
    d = dist.sum(axis=1, keepdims=True)
    flat = d <= EPS_ZERO_DISTANCE
    values = np.sum(rows - rows * dist / np.where(flat, 1.0, d), axis=1) / (n - 1)
    return np.where(flat[:, 0], rows[:, 0], values)


def h_theta_apply(c: GmCombiner, x):
    """Closed form of H_Theta.

    x_1 when every coordinate is equal, else
    (1/(n-1)) * sum_i (x_i - x_i |x_i - Theta(x)| / sum_j |x_j - Theta(x)|).
    """
    v = as_unit_vector(x)
    if v.size < 2:
        raise ArityError(f'{c.label} needs at least 2 inputs, got {v.size}')
    return check_unit(float(h_theta_batch(c, v[None, :])[0]))


def h_function_apply(x):
    """The original median-based H function, kept with its printed 1/n factor.

    x when every coordinate is equal, else
    (1/n) * sum_i (x_i - x_i |x_i - Med(x)| / sum_j |x_j - Med(x)|).

    The inner weights sum to (n-1)/n, so outside the all-equal branch the
    result is (n-1)/n * H_Med(x): 1/3 on (0.9, 0.3, 0.5) where H_Med gives 0.5.
    """
    v = as_unit_vector(x)
    n = v.size
    if n < 2:
        raise ArityError(f'H needs at least 2 inputs, got {n}')
    dist = np.abs(v - median(v))
    d = dist.sum()
    if d <= EPS_ZERO_DISTANCE:
        return check_unit(v[0])
    return check_unit(np.sum(v - v * dist / d) / n)


def make_combiner(kind: str) -> GmCombiner:
    """Build a GM combiner from a selector kind or a combiner name (h_med, ...)."""
    selector_kind = COMBINER_NAMES.get(kind, kind)
    if selector_kind not in SELECTOR_KINDS:
        raise ConfigurationError(
            f"Unknown GM combiner '{kind}' (supported: {', '.join(list(COMBINER_NAMES) + list(SELECTOR_KINDS))})"
        )
    name = {v: k for k, v in COMBINER_NAMES.items()}[selector_kind]
    return GmCombiner(ReferentialSelector(selector_kind), COMBINER_LABELS[selector_kind], name)


#####################
# Weight-function families
#####################


def constant_family(n):
    """1/n for every input: the arithmetic mean."""
    return WeightFunctionFamily(n, lambda x: np.full(len(x), 1.0 / len(x)), name='constant')


def max_family(n):
    """All the mass on the largest input."""

    def f(x):
        w = np.zeros(len(x))
        w[int(np.argmax(x))] = 1.0
        return w

    return WeightFunctionFamily(n, f, name='max')


def min_family(n):
    """All the mass on the smallest input."""

    def f(x):
        w = np.zeros(len(x))
        w[int(np.argmin(x))] = 1.0
        return w

    return WeightFunctionFamily(n, f, name='min')


def ratio_family(n):
    """f_i(x) = x_i / sum_j x_j (1/n on the zero vector).

    The associated GM function is sum x_i^2 / sum x_i: it satisfies the
    boundary condition but is not monotone, (0.5, 0.2, 0.1) -> 0.375 while
    (0.5, 0.22, 0.2) -> 0.3678.
    """

    def f(x):
        x = np.asarray(x, dtype=float)
        total = x.sum()
        if total <= 0.0:
            return np.full(x.size, 1.0 / x.size)
        return x / total

    return WeightFunctionFamily(n, f, name='ratio')


def owa_family(w):
    """Any OWA as a GM function: weights follow the rank of each input."""
    weights = np.asarray(w, dtype=float)

    def f(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.size)
        out[np.argsort(-x, kind='stable')] = weights
        return out

    return WeightFunctionFamily(weights.size, f, name='owa')


def selector_family(selector: ReferentialSelector, n):
    """The H_Theta weights as an explicit weight-function family."""
    return WeightFunctionFamily(n, lambda x: weights_calc(x, selector), name=COMBINER_LABELS[selector.kind])


