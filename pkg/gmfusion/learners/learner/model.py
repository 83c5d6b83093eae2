#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""
I am your father...

...of all gmfusion base classifiers.
"""

import numpy as np

from gmfusion.errors import ConfigurationError, FeatureError, StateError
from gmfusion.globals import NoOptionError, NoSectionError
from gmfusion.logger import logger

# Every posterior row is smoothed away from exact 0/1 by this amount
POSTERIOR_FLOOR = 1e-6

hyperparameter_types = {
    'int': int,
    'float': float,
}


def smooth_posteriors(proba, floor=POSTERIOR_FLOOR):
    """Lift every entry by floor and renormalize the rows."""
    proba = np.asarray(proba, dtype=float) + floor
    return proba / proba.sum(axis=1, keepdims=True)


def softmax(scores):
    """Row-wise softmax, stable for -inf entries as long as one entry per row is finite."""
    scores = np.asarray(scores, dtype=float)
    shifted = scores - np.max(scores, axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


class GmfLearnerModel:
    """Main class for gmfusion learner model.

    All gmfusion base classifiers should inherit from this class and
    implement:
    - the _fit method: learn the family-specific state from (X, y)
    - the _predict_proba method: return one unnormalized posterior row per instance
    and set hyperparameters_description, a dict of
    name -> {'description', 'type', 'default'}.

    X is a float matrix of preprocessed features, y an int vector of class
    indices in [0, n_classes).
    """

    hyperparameters_description = {}

    def __init__(self, config=None, **overrides):
        """Init the learner model.

        :config: configuration parameters (the section named after the learner is read)
        :overrides: hyperparameter values taking precedence over the configuration
        """
        # Build the learner name from the module (gmfusion.learners.<name>)
        _mod = self.__class__.__module__.replace('gmfusion.learners.', '')
        self.learner_name = _mod.split('.')[0]

        self.hyperparameters = {k: v['default'] for k, v in self.hyperparameters_description.items()}
        if config is not None:
            self.load_hyperparameters(config=config)
        for key, value in overrides.items():
            if key not in self.hyperparameters_description:
                raise ConfigurationError(f"Unknown {self.learner_name} hyperparameter '{key}'")
            self.hyperparameters[key] = self._cast(key, value)

        self.n_classes = None
        self.n_features = None
        self._fitted = False

    def __repr__(self):
        return f'{self.learner_name}({self.hyperparameters})'

    def _cast(self, key, value):
        return hyperparameter_types[self.hyperparameters_description[key]['type']](value)

    def load_hyperparameters(self, config):
        """Load the learner section of the configuration file, if it exists."""
        if not config.has_section(self.learner_name):
            return False
        for key in self.hyperparameters_description:
            try:
                value = config.parser.get(self.learner_name, key)
            except (NoOptionError, NoSectionError):
                continue
            try:
                self.hyperparameters[key] = self._cast(key, value)
            except ValueError as e:
                raise ConfigurationError(f"Bad value for {self.learner_name}.{key}: {value} ({e})")
            logger.debug(f'Load {self.learner_name}.{key}={self.hyperparameters[key]} from the configuration')
        return True

    def get(self, key):
        return self.hyperparameters[key]

    def is_fitted(self):
        return self._fitted

    def fit(self, X, y, n_classes, rng=None):
        """Train the learner and return self.

        rng is only used by families with a randomized training.
        """
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=int)
        if X.ndim != 2 or X.shape[0] != y.shape[0] or X.shape[0] == 0:
            raise FeatureError(f'{self.learner_name}: bad training shapes X={X.shape} y={y.shape}')
        self.n_classes = int(n_classes)
        self.n_features = X.shape[1]
        self._fit(X, y, rng)
        self._fitted = True
        return self

    def predict_proba(self, X):
        """Return the posterior rows (one per instance, each summing to 1)."""
        if not self._fitted:
            raise StateError(f'{self.learner_name} learner is not fitted')
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if X.shape[1] != self.n_features:
            raise FeatureError(f'{self.learner_name} expects {self.n_features} features, got {X.shape[1]}')
        return smooth_posteriors(self._predict_proba(X))

    def _fit(self, X, y, rng):
        raise NotImplementedError

    def _predict_proba(self, X):
        raise NotImplementedError
