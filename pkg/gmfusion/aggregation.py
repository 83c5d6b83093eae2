#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Classical aggregation functions, OWA, order statistics and the directional monotonicity checker.

All inputs are unit vectors: 1-D sequences of reals in [0,1]. Every function
is pure and returns a float in [0,1].
"""

from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from gmfusion.errors import ArityError, DomainError, RangeError
from gmfusion.globals import EPS_ARITH, EPS_COMPOSE


def as_unit_vector(x, name='x'):
    """Return x as a float64 numpy vector with every element in [0,1].

    Elements outside [0,1] by at most EPS_COMPOSE are clamped, anything
    further is a DomainError. Empty vectors are an ArityError.
    """
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        v = v.reshape(-1)
    if v.size == 0:
        raise ArityError(f'{name} is empty, at least one element is needed')
    if not np.all(np.isfinite(v)):
        raise DomainError(f'{name} contains non finite values: {v.tolist()}')
    if np.any(v < -EPS_COMPOSE) or np.any(v > 1.0 + EPS_COMPOSE):
        raise DomainError(f'{name} has values outside [0,1]: {v.tolist()}')
    return np.clip(v, 0.0, 1.0)


def as_weight_vector(w, n=None):
    """Return w as a validated weight vector (elements in [0,1], sum 1 within 1e-9)."""
    v = as_unit_vector(w, name='weights')
    if n is not None and v.size != n:
        raise ArityError(f'weight vector has {v.size} elements, {n} expected')
    total = float(v.sum())
    if abs(total - 1.0) > EPS_COMPOSE:
        raise DomainError(f'weights sum to {total}, 1 expected')
    return v


def as_direction(r):
    """Return r as a direction vector (finite reals, not all zero)."""
    v = np.asarray(r, dtype=float).reshape(-1)
    if v.size == 0:
        raise ArityError('direction vector is empty')
    if not np.all(np.isfinite(v)) or not np.any(v != 0.0):
        raise DomainError(f'direction vector must have a nonzero component: {v.tolist()}')
    return v


def check_unit(value):
    """Clamp a computed score to [0,1].

    A result outside the interval by more than EPS_COMPOSE reveals a formula
    bug and raises RangeError instead of being clipped.
    """
    value = float(value)
    if value < -EPS_COMPOSE or value > 1.0 + EPS_COMPOSE:
        raise RangeError(f'aggregated value {value!r} outside [0,1]')
    return min(1.0, max(0.0, value))


def agg_min(x):
    return check_unit(np.min(as_unit_vector(x)))


def agg_max(x):
    return check_unit(np.max(as_unit_vector(x)))


def agg_arith(x):
    v = as_unit_vector(x)
    return check_unit(v.sum() / v.size)


def agg_prod(x):
    return check_unit(np.prod(as_unit_vector(x)))


def decreasing(x):
    """Decreasing rearrangement x_(1) >= ... >= x_(n) (stable on ties)."""
    v = as_unit_vector(x)
    return v[np.argsort(-v, kind='stable')]


def owa(w, x):
    """Ordered weighted average: sum of w_i * x_(i) over the decreasing rearrangement of x."""
    v = as_unit_vector(x)
    weights = as_weight_vector(w)
    if weights.size != v.size:
        raise ArityError(f'OWA weights have {weights.size} elements, input has {v.size}')
    return check_unit(np.dot(weights, decreasing(v)))


def median(x):
    """Median with the k-th lowest coordinate convention.

    n = 2k-1 returns the k-th lowest value, n = 2k the mean of the k-th and
    (k+1)-th lowest values.
    """
    v = np.sort(as_unit_vector(x), kind='stable')
    n = v.size
    k = (n + 1) // 2
    if n % 2:
        return check_unit(v[k - 1])
    return check_unit((v[k - 1] + v[k]) / 2.0)


def owa_weights_median(n):
    """OWA weight vector putting the mass on the middle order statistic(s)."""
    if n < 1:
        raise ArityError('median weights need n >= 1')
    w = np.zeros(n)
    if n % 2:
        w[n // 2] = 1.0
    else:
        w[n // 2 - 1] = 0.5
        w[n // 2] = 0.5
    return w


# Static combiners addressable by name (vote is handled by the ensemble module)
AGGREGATIONS = {
    'min': agg_min,
    'max': agg_max,
    'arith': agg_arith,
    'prod': agg_prod,
}


@dataclass(frozen=True)
class MonotonicityResult:
    """Outcome of a directional monotonicity check.

    witness is None on success, else (x, x + k*r, f(x), f(x + k*r)).
    """

    passed: bool
    checked: int
    witness: Optional[Tuple[np.ndarray, np.ndarray, float, float]] = None

    def __bool__(self):
        return self.passed


def check_directional_monotonicity(
    f: Callable[[np.ndarray], float],
    r,
    samples: int = 10000,
    step_grid: Sequence[float] = (0.0, 0.01, 0.05, 0.1, 0.25, 0.5),
    seed: int = 0,
    points=None,
    tolerance: float = EPS_ARITH,
    vectorized: bool = False,
) -> MonotonicityResult:
    """Check that f(x) <= f(x + k*r) for sampled x and every admissible step k.

    :param f: scalar function over unit vectors
    :param r: direction vector, its length fixes the arity
    :param samples: number of uniform random points drawn in [0,1]^n
    :param step_grid: steps k >= 0; steps leaving [0,1]^n are skipped
    :param seed: seed of the sampling generator
    :param points: explicit points checked before the random ones
    :param vectorized: f maps a (k, n) array to its k values
    :return: MonotonicityResult with the first violating pair, if any
    """
    direction = as_direction(r)
    n = direction.size
    steps = [float(k) for k in step_grid if k >= 0]
    rng = np.random.default_rng(seed)

    candidates = [as_unit_vector(p) for p in (points or [])]
    if samples >= 1:
        candidates.extend(rng.random((samples, n)))
    for x in candidates:
        if x.size != n:
            raise ArityError(f'point {x.tolist()} does not match direction arity {n}')
    if vectorized:
        return _check_monotonicity_rows(f, direction, steps, candidates, tolerance)

    checked = 0
    for x in candidates:
        fx = f(x)
        for k in steps:
            y = x + k * direction
            if np.any(y < 0.0) or np.any(y > 1.0):
                continue
            fy = f(y)
            checked += 1
            if fx > fy + tolerance:
                return MonotonicityResult(False, checked, (x.copy(), y, float(fx), float(fy)))
    return MonotonicityResult(True, checked)


def _check_monotonicity_rows(f, direction, steps, candidates, tolerance):
    """Batch form of the check: same pairs, same first witness, same count."""
    if not candidates or not steps:
        return MonotonicityResult(True, 0)
    x = np.vstack(candidates)
    fx = np.asarray(f(x), dtype=float)
    valid = np.zeros((x.shape[0], len(steps)), dtype=bool)
    fy = np.full(valid.shape, np.inf)
    for s, k in enumerate(steps):
        y = x + k * direction
        inside = np.all((y >= 0.0) & (y <= 1.0), axis=1)
        valid[:, s] = inside
        if inside.any():
            fy[inside, s] = f(y[inside])
    # candidate-major order, steps inner
    bad = (valid & (fx[:, None] > fy + tolerance)).ravel()
    if not bad.any():
        return MonotonicityResult(True, int(valid.sum()))
    first = int(np.argmax(bad))
    i, s = divmod(first, len(steps))
    checked = int(valid.ravel()[: first + 1].sum())
    return MonotonicityResult(False, checked, (x[i].copy(), x[i] + steps[s] * direction, float(fx[i]), float(fy[i, s])))
