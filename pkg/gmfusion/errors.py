#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Exceptions raised by gmfusion and their command exit codes."""

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_PROPERTY = 3


class GmfusionError(Exception):
    """Father class of all gmfusion errors."""

    exit_code = EXIT_USAGE


class ArityError(GmfusionError, ValueError):
    """Input length does not match what the function accepts."""


class DomainError(GmfusionError, ValueError):
    """Value outside [0,1], or an invalid weight / direction vector."""


class RangeError(GmfusionError, ArithmeticError):
    """A computed score left [0,1] by more than the composition tolerance."""


class ConfigurationError(GmfusionError):
    """Invalid configuration key, value or name."""


class StateError(GmfusionError):
    """Operation called on an object in the wrong state (unfitted learner)."""


class EnsembleTrainingError(GmfusionError):
    """Ensemble members could not be trained."""

    exit_code = EXIT_DATA


class MalformedScoresError(GmfusionError, ValueError):
    """Score matrix violates the posterior row invariants."""

    exit_code = EXIT_DATA


class FeatureError(GmfusionError, ValueError):
    """Instance does not match the training schema."""

    exit_code = EXIT_DATA


class DataError(GmfusionError, ValueError):
    """Dataset file can not be ingested."""

    exit_code = EXIT_DATA


def exit_code_for(error):
    """Return the command exit code for the given exception."""
    return getattr(error, 'exit_code', EXIT_USAGE)
