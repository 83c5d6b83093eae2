#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Gaussian naive Bayes learner."""

import numpy as np

from gmfusion.learners.learner.model import GmfLearnerModel, softmax

hyperparameters_description = {
    'var_floor': {
        'description': 'Lower bound of every per-class feature variance',
        'type': 'float',
        'default': 1e-9,
    },
}


class LearnerModel(GmfLearnerModel):
    """One Gaussian per (class, feature), class priors from the training frequencies.

    Classes absent from the training sample get a zero posterior (before the
    posterior floor of the base model).
    """

    hyperparameters_description = hyperparameters_description

    def _fit(self, X, y, rng):
        L, p = self.n_classes, X.shape[1]
        self._present = np.zeros(L, dtype=bool)
        self._mean = np.zeros((L, p))
        self._var = np.ones((L, p))
        self._log_prior = np.full(L, -np.inf)
        for j in range(L):
            rows = X[y == j]
            if rows.shape[0] == 0:
                continue
            self._present[j] = True
            self._mean[j] = rows.mean(axis=0)
            self._var[j] = np.maximum(rows.var(axis=0), self.get('var_floor'))
            self._log_prior[j] = np.log(rows.shape[0] / X.shape[0])

    def _predict_proba(self, X):
        # (n, L, p) log densities summed over the features
        diff = X[:, None, :] - self._mean[None, :, :]
        log_lik = -0.5 * np.sum(np.log(2.0 * np.pi * self._var)[None, :, :] + diff**2 / self._var[None, :, :], axis=2)
        joint = np.where(self._present[None, :], log_lik + self._log_prior[None, :], -np.inf)
        return softmax(joint)
