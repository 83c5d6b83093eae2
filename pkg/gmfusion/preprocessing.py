#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Feature preprocessing fitted on a training fold.

Numeric features: mean imputation then standardization.
Categorical features: mode imputation then one-hot over the training values
(unseen values encode as all zeros).
"""

import numpy as np

from gmfusion.dataset import CATEGORICAL
from gmfusion.errors import FeatureError, StateError


class Preprocessor:
    def __init__(self, schema):
        self.schema = list(schema)
        self._columns = None

    def is_fitted(self):
        return self._columns is not None

    def fit(self, X):
        X = self._check(X)
        self._columns = []
        for col, spec in enumerate(self.schema):
            values = X[:, col]
            if spec.kind == CATEGORICAL:
                present = [v for v in values if v is not None]
                categories = sorted(set(present))
                mode = max(categories, key=present.count) if categories else None
                self._columns.append((CATEGORICAL, categories, mode))
            else:
                v = values.astype(float)
                mean = float(np.nanmean(v)) if np.any(~np.isnan(v)) else 0.0
                filled = np.where(np.isnan(v), mean, v)
                std = float(filled.std())
                self._columns.append(('numeric', mean, std if std > 0.0 else 1.0))
        return self

    def transform(self, X):
        if self._columns is None:
            raise StateError('Preprocessor is not fitted')
        X = self._check(X)
        blocks = []
        for col, (kind, a, b) in enumerate(self._columns):
            values = X[:, col]
            if kind == CATEGORICAL:
                filled = [b if v is None else v for v in values]
                block = np.zeros((X.shape[0], len(a)))
                position = {c: i for i, c in enumerate(a)}
                for row, v in enumerate(filled):
                    if v in position:
                        block[row, position[v]] = 1.0
                blocks.append(block)
            else:
                v = values.astype(float)
                v = np.where(np.isnan(v), a, v)
                blocks.append(((v - a) / b)[:, None])
        if not blocks:
            return np.zeros((X.shape[0], 0))
        return np.hstack(blocks)

    def fit_transform(self, X):
        return self.fit(X).transform(X)

    def _check(self, X):
        X = np.asarray(X, dtype=object)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != len(self.schema):
            raise FeatureError(f'instance has {X.shape[1]} features, the schema has {len(self.schema)}')
        return X
