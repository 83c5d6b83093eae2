#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Heterogeneous bagging ensembles and their fusion engines.

An ensemble of N members answers an instance with an N x L score matrix
(one posterior row per member). A combiner folds every class column into a
single value and the decision is the class with the highest value.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Callable, Optional, Union

import numpy as np

from gmfusion.aggregation import AGGREGATIONS
from gmfusion.dataset import Dataset
from gmfusion.errors import (
    ConfigurationError,
    EnsembleTrainingError,
    FeatureError,
    MalformedScoresError,
    RangeError,
)
from gmfusion.globals import EPS_ARITH, EPS_COMPOSE, derive_rng
from gmfusion.learners import family_name, load_learner
from gmfusion.logger import logger
from gmfusion.mixture import COMBINER_NAMES, GmCombiner, gm_weights, make_combiner
from gmfusion.preprocessing import Preprocessor

TIE_POLICIES = ('lowest-index', 'seeded-random')

STATIC_COMBINERS = ('min', 'max', 'arith', 'prod', 'vote')
COMBINERS = STATIC_COMBINERS + tuple(COMBINER_NAMES)

DEFAULT_COMPOSITION = {'knn': 2, 'tree': 2, 'naive_bayes': 1, 'logreg': 1, 'perceptron': 1}

# A bootstrap sample missing a training class is drawn again at most this many times
MAX_BOOTSTRAP_RETRIES = 25

ROW_SUM_TOLERANCE = 1e-6

# Batch versions of the static aggregations, reducing the member axis
_STATIC_BATCH = {
    'min': lambda s: s.min(axis=1),
    'max': lambda s: s.max(axis=1),
    'arith': lambda s: s.sum(axis=1) / s.shape[1],
    'prod': lambda s: s.prod(axis=1),
}


@dataclass(frozen=True)
class Prediction:
    """Decision of an ensemble for one instance.

    For GM combiners member_weights holds the N x L dynamic weights, and
    referential / distance_sums the per-class alpha and d values.
    """

    class_index: int
    fused_scores: np.ndarray
    member_weights: Optional[np.ndarray] = None
    referential: Optional[np.ndarray] = None
    distance_sums: Optional[np.ndarray] = None


@dataclass(frozen=True)
class FusionBatch:
    """Fusion of m score matrices at once."""

    classes: np.ndarray
    values: np.ndarray
    weights: Optional[np.ndarray] = None
    referential: Optional[np.ndarray] = None
    distance_sums: Optional[np.ndarray] = None

    def prediction(self, row=0):
        def pick(a):
            return None if a is None else a[row]

        return Prediction(
            class_index=int(self.classes[row]),
            fused_scores=self.values[row],
            member_weights=pick(self.weights),
            referential=pick(self.referential),
            distance_sums=pick(self.distance_sums),
        )


def check_combiner(name):
    """Return name if it is a known combiner name."""
    if name not in COMBINERS:
        raise ConfigurationError(f"Unknown combiner '{name}' (supported: {', '.join(COMBINERS)})")
    return name


def check_tie_policy(policy):
    if policy not in TIE_POLICIES:
        raise ConfigurationError(f"Unknown tie policy '{policy}' (supported: {', '.join(TIE_POLICIES)})")
    return policy


def as_score_matrix(scores, normalize=False):
    """Validate an N x L score matrix.

    Every row must be a posterior: entries in [0,1] and a sum of 1 within
    1e-6, with N >= 2 and L >= 2. normalize=True rescales the rows instead of
    rejecting a bad sum.
    """
    s = np.asarray(scores, dtype=float)
    if s.ndim != 2:
        raise MalformedScoresError(f'score matrix must be 2-D, got shape {s.shape}')
    n, n_classes = s.shape
    if n < 2 or n_classes < 2:
        raise MalformedScoresError(f'score matrix needs N >= 2 members and L >= 2 classes, got {n} x {n_classes}')
    if not np.all(np.isfinite(s)) or np.any(s < -EPS_COMPOSE) or np.any(s > 1.0 + EPS_COMPOSE):
        raise MalformedScoresError('scores must be finite values in [0,1]')
    s = np.clip(s, 0.0, 1.0)
    sums = s.sum(axis=1)
    if normalize:
        if np.any(sums <= 0.0):
            raise MalformedScoresError(f'row {int(np.argmin(sums)) + 1} sums to 0 and can not be normalized')
        return s / sums[:, None]
    bad = np.flatnonzero(np.abs(sums - 1.0) > ROW_SUM_TOLERANCE)
    if bad.size:
        raise MalformedScoresError(f'row {int(bad[0]) + 1} sums to {sums[bad[0]]!r}, 1 expected within 1e-6')
    return s


def tie_break(value, policy='lowest-index', rng=None):
    """Index of the maximum of value; ties within 1e-12 are resolved by the policy."""
    v = np.asarray(value, dtype=float).reshape(-1)
    if v.size == 0:
        raise MalformedScoresError('can not pick the maximum of an empty vector')
    candidates = np.flatnonzero(v >= v.max() - EPS_ARITH)
    if candidates.size == 1 or check_tie_policy(policy) == 'lowest-index':
        return int(candidates[0])
    if rng is None:
        rng = np.random.default_rng(0)
    return int(rng.choice(candidates))


def _decide(values, policy, rng):
    """Row-wise tie_break() of an (m, L) value array."""
    if check_tie_policy(policy) == 'lowest-index':
        return np.argmax(values >= values.max(axis=1, keepdims=True) - EPS_ARITH, axis=1)
    return np.array([tie_break(row, policy, rng) for row in values], dtype=int)


def _check_values(values):
    if np.any(values < -EPS_COMPOSE) or np.any(values > 1.0 + EPS_COMPOSE):
        raise RangeError(f'fused values outside [0,1]: {values.min()!r} .. {values.max()!r}')
    return np.clip(values, 0.0, 1.0)


def fuse_batch(scores, combiner: Union[str, GmCombiner, Callable], tie_policy='lowest-index', rng=None):
    """Fuse an (m, N, L) stack of score matrices.

    :param combiner: a combiner name, a GmCombiner or a scalar function applied to every class column
    :param rng: generator of the seeded-random ties, shared by every row of the batch
    """
    s = np.asarray(scores, dtype=float)
    if rng is None and check_tie_policy(tie_policy) == 'seeded-random':
        rng = np.random.default_rng(0)
    if isinstance(combiner, str) and combiner in COMBINER_NAMES:
        combiner = make_combiner(combiner)

    if isinstance(combiner, GmCombiner):
        w, alpha, d = gm_weights(s, combiner.selector, axis=1)
        values = _check_values(np.sum(s * w, axis=1))
        return FusionBatch(_decide(values, tie_policy, rng), values, w, alpha[:, 0, :], d[:, 0, :])

    if combiner == 'vote':
        return _vote_batch(s, tie_policy, rng)

    if isinstance(combiner, str):
        if combiner not in _STATIC_BATCH:
            check_combiner(combiner)
        values = _STATIC_BATCH[combiner](s)
    elif callable(combiner):
        values = np.apply_along_axis(combiner, 1, s)
    else:
        raise ConfigurationError(f'Unsupported combiner {combiner!r}')
    values = _check_values(values)
    return FusionBatch(_decide(values, tie_policy, rng), values)


def _vote_batch(s, tie_policy, rng):
    m, n, n_classes = s.shape
    if check_tie_policy(tie_policy) == 'lowest-index':
        votes = np.argmax(s >= s.max(axis=2, keepdims=True) - EPS_ARITH, axis=2)
    else:
        votes = np.array([[tie_break(row, tie_policy, rng) for row in matrix] for matrix in s], dtype=int)
    fractions = np.zeros((m, n_classes))
    for j in range(n_classes):
        fractions[:, j] = np.count_nonzero(votes == j, axis=1) / n
    return FusionBatch(_decide(fractions, tie_policy, rng), fractions)


def classify_fusion(scores, combiner='arith', tie_policy='lowest-index', rng=None, normalize=False):
    """Static fusion: Value_j = F(O_1^j, ..., O_N^j), then the argmax."""
    if not (callable(combiner) or combiner in AGGREGATIONS):
        raise ConfigurationError(f'{combiner!r} is not a static scalar combiner')
    s = as_score_matrix(scores, normalize=normalize)
    return fuse_batch(s[None], combiner, tie_policy, rng).prediction()


def classify_gm(
    scores, combiner: Union[str, GmCombiner] = 'h_arith', tie_policy='lowest-index', rng=None, normalize=False
):
    """GM fusion: Value_j = sum_i O_i^j * w_i with w = WeightsCalc(column j)."""
    if isinstance(combiner, str):
        combiner = make_combiner(combiner)
    s = as_score_matrix(scores, normalize=normalize)
    return fuse_batch(s[None], combiner, tie_policy, rng).prediction()


def majority_vote(scores, tie_policy='lowest-index', rng=None, normalize=False):
    """One vote per member for its argmax class; fused scores are the vote fractions."""
    s = as_score_matrix(scores, normalize=normalize)
    return fuse_batch(s[None], 'vote', tie_policy, rng).prediction()


def classify(scores, combiner, tie_policy='lowest-index', rng=None, normalize=False):
    """Dispatch to the fusion engine of the combiner name."""
    if combiner == 'vote':
        return majority_vote(scores, tie_policy, rng, normalize)
    if isinstance(combiner, GmCombiner) or combiner in COMBINER_NAMES:
        return classify_gm(scores, combiner, tie_policy, rng, normalize)
    return classify_fusion(scores, combiner, tie_policy, rng, normalize)


#####################
# Ensemble construction
#####################


def parse_composition(value):
    """Parse 'family:weight,...' (or a mapping) into an ordered {family: weight} dict."""
    if isinstance(value, dict):
        items = list(value.items())
    else:
        items = []
        for chunk in str(value).split(','):
            chunk = chunk.strip()
            if not chunk:
                continue
            family, _, weight = chunk.partition(':')
            items.append((family.strip(), weight.strip() or '1'))
    composition = {}
    for family, weight in items:
        try:
            weight = int(weight)
        except ValueError:
            raise ConfigurationError(f"Bad composition weight '{weight}' for {family}")
        if weight < 1:
            raise ConfigurationError(f'Composition weight of {family} must be >= 1')
        composition[family_name(family)] = weight
    if not composition:
        raise ConfigurationError('Empty ensemble composition')
    return composition


def composition_families(size, composition=None):
    """Member families for an ensemble of the given size.

    The families are dealt by weighted round-robin (pass p takes every family
    whose weight exceeds p), repeated until size members are dealt, then
    grouped in composition order.
    """
    if size < 2:
        raise ConfigurationError(f'An ensemble needs at least 2 members, got {size}')
    composition = parse_composition(composition or DEFAULT_COMPOSITION)
    cycle = [f for p in range(max(composition.values())) for f, weight in composition.items() if weight > p]
    order = {f: i for i, f in enumerate(composition)}
    return sorted((cycle[i % len(cycle)] for i in range(size)), key=order.get)


@dataclass(frozen=True)
class Ensemble:
    """A trained ensemble. Immutable, its prediction is pure."""

    members: tuple
    families: tuple
    classes: tuple
    preprocessor: Preprocessor
    combiner: str = 'h_arith'
    tie_policy: str = 'lowest-index'
    seed: int = 0

    @property
    def size(self):
        return len(self.members)

    @property
    def schema(self):
        return self.preprocessor.schema

    def with_combiner(self, combiner):
        """Same members, other combiner."""
        return replace(self, combiner=check_combiner(combiner))

    def member_scores(self, X):
        """(m, N, L) posterior stack for m raw instances."""
        features = self.preprocessor.transform(X)
        return np.stack([member.predict_proba(features) for member in self.members], axis=1)


def _bootstrap(y, present, rng, member):
    n = y.shape[0]
    for attempt in range(MAX_BOOTSTRAP_RETRIES + 1):
        rows = rng.integers(0, n, size=n)
        if np.isin(present, y[rows]).all():
            if attempt:
                logger.debug(f'Member {member}: bootstrap sample accepted after {attempt} retries')
            return rows
    raise EnsembleTrainingError(
        f'Member {member}: every bootstrap sample missed a class after {MAX_BOOTSTRAP_RETRIES} retries'
    )


def train_ensemble(
    train: Dataset,
    size,
    composition=None,
    seed=0,
    config=None,
    combiner='h_arith',
    tie_policy='lowest-index',
    workers=1,
) -> Ensemble:
    """Train size members, each on its own bootstrap sample of train.

    Member i draws its sample from a generator seeded by (seed, i) only, so the
    result does not depend on workers.
    """
    families = composition_families(size, composition)
    check_combiner(combiner)
    check_tie_policy(tie_policy)
    preprocessor = Preprocessor(train.schema).fit(train.X)
    features = preprocessor.transform(train.X)
    present = np.unique(train.y)

    def train_member(i):
        rng = derive_rng(seed, 'member', i)
        rows = _bootstrap(train.y, present, rng, i)
        learner = load_learner(families[i], config)
        try:
            return learner.fit(features[rows], train.y[rows], train.n_classes, rng=rng)
        except (ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
            raise EnsembleTrainingError(f'Member {i} ({families[i]}) can not be trained: {e}')

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            members = list(executor.map(train_member, range(size)))
    else:
        members = [train_member(i) for i in range(size)]
    logger.debug(f'Ensemble of {size} members trained on {train.name} ({train.n_instances} instances)')
    return Ensemble(tuple(members), tuple(families), tuple(train.classes), preprocessor, combiner, tie_policy, seed)


def predict(ensemble: Ensemble, instance, rng=None):
    """Fuse the member posteriors of one raw instance with the ensemble combiner."""
    row = np.asarray(instance, dtype=object).reshape(-1)
    if row.size != len(ensemble.schema):
        raise FeatureError(f'instance has {row.size} features, the ensemble was trained on {len(ensemble.schema)}')
    if rng is None:
        rng = derive_rng(ensemble.seed, 'ties')
    scores = ensemble.member_scores(row[None, :])
    return fuse_batch(scores, ensemble.combiner, ensemble.tie_policy, rng).prediction()


def base_predict_proba(classifier, instance):
    """Posterior row of one fitted member for a preprocessed feature vector."""
    return classifier.predict_proba(np.asarray(instance, dtype=float).reshape(1, -1))[0]
