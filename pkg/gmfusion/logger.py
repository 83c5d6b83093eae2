#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Custom logger class.

Every module logs through the 'gmfusion' logger. Records go to a rotating
file; only CRITICAL ones reach the console, so the command outputs stay
clean on stdout.
"""

import getpass
import json
import logging
import logging.config
import os
import tempfile

from gmfusion.globals import safe_makedirs

LOGGER_NAME = 'gmfusion'


def log_directory():
    """First writable directory among $XDG_CACHE_HOME and ~/.local/share, else None."""
    candidates = []
    if os.environ.get('XDG_CACHE_HOME'):
        candidates.append(os.environ['XDG_CACHE_HOME'])
    if 'HOME' in os.environ:
        candidates.append(os.path.join(os.environ['HOME'], '.local', 'share'))
    for path in candidates:
        if os.path.isdir(path) and os.access(path, os.W_OK):
            return os.path.join(path, 'gmfusion')
    return None


def log_filename():
    path = log_directory()
    if path is None:
        return os.path.join(tempfile.gettempdir(), f'gmfusion-{getpass.getuser()}.log')
    safe_makedirs(path)
    return os.path.join(path, 'gmfusion.log')


LOG_FILENAME = log_filename()


def logging_config(filename=LOG_FILENAME):
    """dictConfig dictionary: DEBUG to the rotating file, CRITICAL to stderr."""
    return {
        "version": 1,
        "disable_existing_loggers": False,
        "formatters": {
            "standard": {"format": "%(asctime)s -- %(levelname)s -- %(message)s"},
            "debug": {"format": "%(asctime)s -- %(levelname)s -- %(message)s (%(module)s.%(funcName)s)"},
            "console": {"format": "%(message)s"},
        },
        "handlers": {
            "file": {
                "level": "DEBUG",
                "class": "logging.handlers.RotatingFileHandler",
                "maxBytes": 1000000,
                "backupCount": 3,
                "formatter": "standard",
                "filename": filename,
            },
            "console": {"level": "CRITICAL", "class": "logging.StreamHandler", "formatter": "console"},
        },
        "loggers": {
            LOGGER_NAME: {"handlers": ["file", "console"], "level": "INFO", "propagate": False},
        },
    }


def gmfusion_logger(env_key='LOG_CFG'):
    """Configure and return the gmfusion logger.

    env_key names the environment variable that may point to a JSON file
    replacing the default dictConfig dictionary.
    """
    config = logging_config()
    user_file = os.getenv(env_key)
    if user_file and os.path.exists(user_file):
        with open(user_file, encoding='utf-8') as f:
            config = json.load(f)

    logging.config.dictConfig(config)
    return logging.getLogger(LOGGER_NAME)


logger = gmfusion_logger()
