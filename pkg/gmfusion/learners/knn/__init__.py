#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""k-nearest neighbours learner."""

import numpy as np

from gmfusion.errors import ConfigurationError
from gmfusion.learners.learner.model import GmfLearnerModel

# Fields description
# description: human readable description
# type: int or float
# default: value used when the configuration has no [knn] section
hyperparameters_description = {
    'k': {
        'description': 'Number of neighbours voting for an instance',
        'type': 'int',
        'default': 5,
    },
}


class LearnerModel(GmfLearnerModel):
    """Posterior of class j = fraction of the k nearest training instances of class j.

    Distances are Euclidean over the preprocessed (standardized) features.
    Equal distances are resolved by training order.
    """

    hyperparameters_description = hyperparameters_description

    def _fit(self, X, y, rng):
        if self.get('k') < 1:
            raise ConfigurationError('knn.k must be >= 1')
        self._X = X
        self._y = y
        self._sq_norms = np.einsum('ij,ij->i', X, X)

    def _predict_proba(self, X):
        k = min(self.get('k'), self._X.shape[0])
        sq = np.einsum('ij,ij->i', X, X)[:, None] + self._sq_norms[None, :] - 2.0 * X @ self._X.T
        np.maximum(sq, 0.0, out=sq)
        nearest = np.argsort(sq, axis=1, kind='stable')[:, :k]
        votes = self._y[nearest]
        proba = np.zeros((X.shape[0], self.n_classes))
        for j in range(self.n_classes):
            proba[:, j] = np.count_nonzero(votes == j, axis=1)
        return proba / k
