#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""CART decision tree learner (Gini impurity, axis-aligned thresholds)."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from gmfusion.learners.learner.model import GmfLearnerModel

hyperparameters_description = {
    'max_depth': {
        'description': 'Maximum depth of the tree (the root has depth 0)',
        'type': 'int',
        'default': 12,
    },
    'min_leaf': {
        'description': 'Minimum number of training instances per leaf',
        'type': 'int',
        'default': 2,
    },
}


@dataclass
class Node:
    counts: np.ndarray
    feature: int = -1
    threshold: float = 0.0
    left: Optional['Node'] = None
    right: Optional['Node'] = None

    @property
    def is_leaf(self):
        return self.left is None


def gini(counts):
    """Gini impurity of class count vectors (last axis)."""
    total = counts.sum(axis=-1, keepdims=True)
    safe = np.where(total > 0, total, 1.0)
    return 1.0 - np.sum((counts / safe) ** 2, axis=-1)


def best_split(X, Y, min_leaf):
    """Return (feature, threshold, impurity) of the best split or None.

    Y is the one-hot class matrix of the node instances. The impurity is the
    size-weighted Gini of the two children.
    """
    n = X.shape[0]
    total = Y.sum(axis=0)
    n_left = np.arange(1, n)
    n_right = n - n_left
    best = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind='stable')
        xs = X[order, feature]
        left = np.cumsum(Y[order], axis=0)[:-1]
        right = total - left
        valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
        if not np.any(valid):
            continue
        impurity = (n_left * gini(left) + n_right * gini(right)) / n
        impurity = np.where(valid, impurity, np.inf)
        i = int(np.argmin(impurity))
        if best is None or impurity[i] < best[2]:
            best = (feature, (xs[i] + xs[i + 1]) / 2.0, float(impurity[i]))
    return best


class LearnerModel(GmfLearnerModel):
    """Greedy CART tree; leaves predict Laplace-smoothed class frequencies."""

    hyperparameters_description = hyperparameters_description

    def _fit(self, X, y, rng):
        Y = np.eye(self.n_classes)[y]
        self.root = self._grow(X, Y, depth=0)

    def _grow(self, X, Y, depth):
        counts = Y.sum(axis=0)
        node = Node(counts=counts)
        n = X.shape[0]
        if depth >= self.get('max_depth') or n < 2 * self.get('min_leaf') or np.count_nonzero(counts) <= 1:
            return node
        split = best_split(X, Y, self.get('min_leaf'))
        if split is None or split[2] >= float(gini(counts)):
            return node
        node.feature, node.threshold = split[0], split[1]
        mask = X[:, node.feature] <= node.threshold
        node.left = self._grow(X[mask], Y[mask], depth + 1)
        node.right = self._grow(X[~mask], Y[~mask], depth + 1)
        return node

    def _predict_proba(self, X):
        proba = np.zeros((X.shape[0], self.n_classes))
        self._route(self.root, X, np.arange(X.shape[0]), proba)
        return proba

    def _route(self, node, X, rows, proba):
        if node.is_leaf:
            proba[rows] = (node.counts + 1.0) / (node.counts.sum() + self.n_classes)
            return
        mask = X[rows, node.feature] <= node.threshold
        self._route(node.left, X, rows[mask], proba)
        self._route(node.right, X, rows[~mask], proba)

    def depth(self, node=None):
        node = self.root if node is None else node
        if node.is_leaf:
            return 0
        return 1 + max(self.depth(node.left), self.depth(node.right))
