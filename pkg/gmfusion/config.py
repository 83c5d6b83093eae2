#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Manage the configuration file."""

import builtins
import os

from gmfusion.errors import ConfigurationError
from gmfusion.evaluation import DatasetSource, ExperimentConfig
from gmfusion.globals import (
    BSD,
    LINUX,
    MACOS,
    SUNOS,
    WINDOWS,
    ConfigParser,
    ConfigParserError,
    NoOptionError,
    NoSectionError,
)
from gmfusion.learners import available_families, load_learner
from gmfusion.logger import logger

DATASET_PREFIX = 'dataset:'

# Known keys and their default values
EXPERIMENT_DEFAULTS = {
    'sizes': '5,7,10',
    'combiners': 'max,arith,prod,vote,h_med,h_arith,h_max,h_min',
    'folds': '10',
    'repeats': '10',
    'seed': '0',
    'tie_policy': 'lowest-index',
    'output_dir': './gmfusion-output',
    'parallel': 'false',
    'workers': '0',
    'alpha': '0.01',
    'timing': 'true',
    'composition': 'knn:2,tree:2,naive_bayes:1,logreg:1,perceptron:1',
}
DATASET_KEYS = ('path', 'label', 'delimiter', 'ignore')
OUTPUTS_DEFAULTS = {
    'exports': 'csv,summary,grid,json',
}


def user_config_dir():
    r"""Return a list of per-user config dir (full path).

    - Linux, *BSD, SunOS: ~/.config/gmfusion
    - macOS: ~/Library/Application Support/gmfusion
    - Windows: %APPDATA%\gmfusion
    """
    paths = []
    if WINDOWS:
        paths.append(os.environ.get('APPDATA'))
    elif MACOS:
        paths.append(os.environ.get('XDG_CONFIG_HOME') or os.path.expanduser('~/.config'))
        paths.append(os.path.expanduser('~/Library/Application Support'))
    else:
        paths.append(os.environ.get('XDG_CONFIG_HOME') or os.path.expanduser('~/.config'))

    return [os.path.join(path, 'gmfusion') if path is not None else '' for path in paths]


def system_config_dir():
    r"""Return a list of system-wide config dir (full path).

    - Linux, SunOS: /etc/gmfusion
    - *BSD, macOS: /usr/local/etc/gmfusion
    - Windows: %APPDATA%\gmfusion
    """
    if LINUX or SUNOS:
        path = '/etc'
    elif BSD or MACOS:
        path = '/usr/local/etc'
    else:
        path = os.environ.get('APPDATA')
    if path is None:
        return ['']
    return [os.path.join(path, 'gmfusion')]


class Config:
    """This class is used to access/read config file, if it exists.

    :param config_file: explicit path (-C flag); it must exist when given
    :param search: also look in the per-user and system-wide directories
    """

    def __init__(self, config_file=None, search=True):
        self.config_file = config_file
        self.config_filename = 'gmfusion.conf'
        self._loaded_config_file = None
        self._search = search
        self._config_file_paths = self.config_file_paths()

        self.parser = ConfigParser(interpolation=None)

        self.read()

    def config_file_paths(self):
        """Candidate files, highest priority first: -C path, per-user dirs, system dirs."""
        if self.config_file:
            if not os.path.exists(self.config_file):
                raise ConfigurationError(f"Configuration file '{self.config_file}' does not exist")
            return [self.config_file]
        if not self._search:
            return []
        return [os.path.join(path, self.config_filename) for path in user_config_dir() + system_config_dir()]

    def read(self):
        """Read the first existing candidate file; the defaults fill the rest."""
        config_file = next((path for path in self._config_file_paths if os.path.isfile(path)), None)
        if config_file is not None:
            try:
                with builtins.open(config_file, encoding='utf-8') as f:
                    self.parser.read_file(f)
            except (OSError, UnicodeDecodeError) as err:
                raise ConfigurationError(f"Can not read configuration file '{config_file}': {err}")
            except ConfigParserError as err:
                raise ConfigurationError(f"Can not parse configuration file '{config_file}': {err}")
            logger.info(f"Read configuration file '{config_file}'")
            self._loaded_config_file = config_file
        else:
            logger.debug(f'No configuration file in {self._config_file_paths}')
        self.sections_set_default()

    def read_string(self, text):
        """Load the configuration from a string (used by the tests)."""
        try:
            self.parser.read_string(text)
        except ConfigParserError as err:
            raise ConfigurationError(f"Can not parse configuration: {err}")
        self.sections_set_default()
        return self

    def sections_set_default(self):
        for section, defaults in (('experiment', EXPERIMENT_DEFAULTS), ('outputs', OUTPUTS_DEFAULTS)):
            if not self.parser.has_section(section):
                self.parser.add_section(section)
            for option, value in defaults.items():
                self.set_default(section, option, value)

    @property
    def loaded_config_file(self):
        """Return the loaded configuration file."""
        return self._loaded_config_file

    def has_section(self, section):
        return self.parser.has_section(section)

    def set_default(self, section, option, default):
        """Set option to default unless the file gives it."""
        if not self.parser.has_option(section, option):
            self.parser.set(section, option, default)

    def _typed(self, getter, kind, section, option, default):
        try:
            return getter(section, option)
        except (NoOptionError, NoSectionError):
            return default
        except ValueError as err:
            raise ConfigurationError(f'{section}.{option} must be {kind} ({err})')

    def get_value(self, section, option, default=None):
        """Raw string value of section.option, default when missing."""
        return self._typed(self.parser.get, 'a string', section, option, default)

    def get_list_value(self, section, option, default=None, separator=','):
        """Comma-separated list value, blank items dropped."""
        value = self.get_value(section, option)
        if value is None:
            return default
        return [item.strip() for item in value.split(separator) if item.strip()]

    def get_int_value(self, section, option, default=0):
        return self._typed(self.parser.getint, 'an integer', section, option, int(default))

    def get_float_value(self, section, option, default=0.0):
        return self._typed(self.parser.getfloat, 'a number', section, option, float(default))

    def get_bool_value(self, section, option, default=True):
        return self._typed(self.parser.getboolean, 'a boolean', section, option, bool(default))

    def check_keys(self, section, known):
        unknown = [key for key in self.parser.options(section) if key not in known]
        if unknown:
            raise ConfigurationError(f"Unknown key(s) in [{section}]: {', '.join(unknown)} (known: {', '.join(known)})")

    def check_sections(self):
        """Reject unknown sections and unknown learner hyperparameters."""
        families = available_families()
        for section in self.parser.sections():
            if section in ('experiment', 'outputs') or section.startswith(DATASET_PREFIX):
                continue
            if section not in families:
                raise ConfigurationError(
                    f"Unknown section [{section}] (known: experiment, outputs, {DATASET_PREFIX}<name>, "
                    f"{', '.join(families)})"
                )
            self.check_keys(section, list(load_learner(section).hyperparameters_description))

    def dataset_sources(self):
        """One DatasetSource per [dataset:<name>] section, relative paths resolved against the config file."""
        base = os.path.dirname(os.path.abspath(self._loaded_config_file)) if self._loaded_config_file else os.getcwd()
        sources = []
        for section in self.parser.sections():
            if not section.startswith(DATASET_PREFIX):
                continue
            self.check_keys(section, DATASET_KEYS)
            name = section[len(DATASET_PREFIX) :].strip()
            path = self.get_value(section, 'path')
            label = self.get_value(section, 'label')
            if not name or not path or not label:
                raise ConfigurationError(f'[{section}] needs a name, a path and a label')
            path = os.path.expanduser(path)
            if not os.path.isabs(path):
                path = os.path.join(base, path)
            sources.append(
                DatasetSource(
                    name,
                    path,
                    label,
                    self.get_value(section, 'delimiter', ','),
                    tuple(self.get_list_value(section, 'ignore', [])),
                )
            )
        return sources

    def experiment_config(self, seed=None, output_dir=None):
        """Build the validated ExperimentConfig; seed and output_dir override the file."""
        self.check_keys('experiment', list(EXPERIMENT_DEFAULTS))
        self.check_keys('outputs', list(OUTPUTS_DEFAULTS))
        self.check_sections()
        sources = self.dataset_sources()
        if not sources:
            raise ConfigurationError('No [dataset:<name>] section in the configuration')
        try:
            sizes = [int(s) for s in self.get_list_value('experiment', 'sizes')]
        except ValueError as err:
            raise ConfigurationError(f'experiment.sizes must be a list of integers ({err})')
        section = 'experiment'
        return ExperimentConfig(
            datasets=sources,
            sizes=sizes,
            combiners=self.get_list_value(section, 'combiners'),
            folds=self.get_int_value(section, 'folds', 10),
            repeats=self.get_int_value(section, 'repeats', 10),
            seed=self.get_int_value(section, 'seed', 0) if seed is None else int(seed),
            tie_policy=self.get_value(section, 'tie_policy', 'lowest-index'),
            output_dir=self.get_value(section, 'output_dir') if output_dir is None else output_dir,
            parallel=self.get_bool_value(section, 'parallel', False),
            workers=self.get_int_value(section, 'workers', 0),
            alpha=self.get_float_value(section, 'alpha', 0.01),
            timing=self.get_bool_value(section, 'timing', True),
            composition=self.get_value(section, 'composition'),
            learners_config=self,
        )
