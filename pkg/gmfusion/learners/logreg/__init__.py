#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Multinomial logistic regression learner."""

import numpy as np

from gmfusion.learners.learner.model import GmfLearnerModel, softmax

hyperparameters_description = {
    'epochs': {
        'description': 'Number of full-batch gradient steps',
        'type': 'int',
        'default': 200,
    },
    'learning_rate': {
        'description': 'Gradient step size',
        'type': 'float',
        'default': 0.1,
    },
    'l2': {
        'description': 'L2 penalty on the weights (the bias is not penalized)',
        'type': 'float',
        'default': 1e-4,
    },
}


class LearnerModel(GmfLearnerModel):
    """Softmax regression trained by full-batch gradient descent from zero weights."""

    hyperparameters_description = hyperparameters_description

    def _fit(self, X, y, rng):
        n, p = X.shape
        Y = np.eye(self.n_classes)[y]
        self._W = np.zeros((p, self.n_classes))
        self._b = np.zeros(self.n_classes)
        lr, l2 = self.get('learning_rate'), self.get('l2')
        for _ in range(self.get('epochs')):
            delta = softmax(X @ self._W + self._b) - Y
            self._W -= lr * (X.T @ delta / n + l2 * self._W)
            self._b -= lr * delta.mean(axis=0)

    def _predict_proba(self, X):
        return softmax(X @ self._W + self._b)
