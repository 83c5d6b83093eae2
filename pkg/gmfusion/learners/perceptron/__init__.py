#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Averaged multiclass perceptron learner."""

import numpy as np

from gmfusion.learners.learner.model import GmfLearnerModel, softmax

hyperparameters_description = {
    'epochs': {
        'description': 'Number of passes over the training sample',
        'type': 'int',
        'default': 200,
    },
    'learning_rate': {
        'description': 'Update step size',
        'type': 'float',
        'default': 0.1,
    },
    'l2': {
        'description': 'Weight decay applied after every pass',
        'type': 'float',
        'default': 1e-4,
    },
}


class LearnerModel(GmfLearnerModel):
    """Multiclass perceptron with batch updates, weights averaged over the passes.

    Every misclassified instance moves its true class scores up and the
    predicted class scores down. Posteriors are the softmax of the averaged
    scores.
    """

    hyperparameters_description = hyperparameters_description

    def _fit(self, X, y, rng):
        p = X.shape[1]
        L = self.n_classes
        eye = np.eye(L)
        Y = eye[y]
        W = np.zeros((p, L))
        bias = np.zeros(L)
        W_sum = np.zeros((p, L))
        b_sum = np.zeros(L)
        lr, l2 = self.get('learning_rate'), self.get('l2')
        epochs = max(1, self.get('epochs'))
        for _ in range(epochs):
            predicted = np.argmax(X @ W + bias, axis=1)
            wrong = predicted != y
            if np.any(wrong):
                delta = Y[wrong] - eye[predicted[wrong]]
                W += lr * X[wrong].T @ delta
                bias += lr * delta.sum(axis=0)
            W *= 1.0 - lr * l2
            W_sum += W
            b_sum += bias
        self._W = W_sum / epochs
        self._b = b_sum / epochs

    def _predict_proba(self, X):
        return softmax(X @ self._W + self._b)
