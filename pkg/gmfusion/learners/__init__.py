#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Base classifier families, one sub-package per family."""

import os
from importlib import import_module

from gmfusion.errors import ConfigurationError
from gmfusion.globals import learners_path
from gmfusion.logger import logger

# Default family order (members of an ensemble are grouped in this order)
FAMILIES = ('knn', 'tree', 'naive_bayes', 'logreg', 'perceptron')

# Long family names accepted in configurations
FAMILY_ALIASES = {
    'decision-tree': 'tree',
    'gaussian-naive-bayes': 'naive_bayes',
    'logistic-regression': 'logreg',
}


def available_families():
    """Return the learner sub-packages found in the learners folder."""
    return sorted(
        item
        for item in os.listdir(learners_path)
        if os.path.isdir(os.path.join(learners_path, item)) and not item.startswith('__') and item != 'learner'
    )


def family_name(name):
    name = FAMILY_ALIASES.get(name, name)
    if name not in available_families():
        raise ConfigurationError(f"Unknown learner family '{name}' (available: {', '.join(available_families())})")
    return name


def load_learner(family, config=None, **overrides):
    """Import the family sub-package and return a new, unfitted LearnerModel."""
    family = family_name(family)
    try:
        module = import_module('gmfusion.learners.' + family)
    except ImportError as e:
        logger.critical(f"Error while importing the {family} learner ({e})")
        raise ConfigurationError(f"Learner {family} can not be loaded: {e}")
    return module.LearnerModel(config=config, **overrides)
