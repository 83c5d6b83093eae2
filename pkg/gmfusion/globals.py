# ruff: noqa: F401
#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Common objects shared by all gmfusion modules."""

import math
import os
import sys
import zlib
from configparser import ConfigParser, NoOptionError, NoSectionError
from configparser import Error as ConfigParserError

import numpy as np

# JSON backend: orjson when installed, then ujson, then the builtin json
try:
    import orjson

    def json_dumps(data) -> bytes:
        """Return data as UTF-8 JSON bytes (numpy scalars and arrays included)."""
        return orjson.dumps(data, option=orjson.OPT_NON_STR_KEYS | orjson.OPT_SERIALIZE_NUMPY)

except ImportError:
    try:
        import ujson as json
    except ImportError:
        import json

    def _to_builtin(value):
        if isinstance(value, np.generic):
            value = value.item()
        if isinstance(value, float) and not math.isfinite(value):
            # orjson writes null for nan and inf
            return None
        if isinstance(value, np.ndarray):
            return _to_builtin(value.tolist())
        if isinstance(value, dict):
            return {str(k): _to_builtin(v) for k, v in value.items()}
        if isinstance(value, (list, tuple)):
            return [_to_builtin(v) for v in value]
        return value

    def json_dumps(data) -> bytes:
        """Return data as UTF-8 JSON bytes (numpy scalars and arrays included)."""
        return json.dumps(_to_builtin(data), ensure_ascii=False).encode('utf-8')


LINUX = sys.platform.startswith('linux')
MACOS = sys.platform.startswith('darwin')
BSD = 'bsd' in sys.platform
SUNOS = sys.platform.startswith('sunos')
WINDOWS = sys.platform.startswith('win')

# One sub-package per base classifier family
learners_path = os.path.join(os.path.realpath(os.path.dirname(__file__)), 'learners')

# Tolerances shared by the numeric modules
EPS_ARITH = 1e-12
EPS_COMPOSE = 1e-9
EPS_ZERO_DISTANCE = 1e-15


def printandflush(string):
    """Print and flush (stdout outputs and command reports)."""
    print(string, flush=True)


def safe_makedirs(path):
    """Create the directory tree, an existing directory is fine."""
    os.makedirs(path, exist_ok=True)


def purpose_tag(tag):
    """Return a stable 32 bits integer for a purpose string (hash() is salted per process)."""
    return zlib.crc32(tag.encode('utf-8'))


def derive_seed(seed, tag, *indices):
    """Derive a child seed sequence from (seed, purpose-tag, indices).

    Every random stream of the package comes from here, so any cell of an
    experiment can be replayed in isolation.
    """
    return np.random.SeedSequence([int(seed), purpose_tag(tag), *[int(i) for i in indices]])


def derive_rng(seed, tag, *indices):
    """Return a numpy Generator seeded by derive_seed()."""
    return np.random.default_rng(derive_seed(seed, tag, *indices))


def derive_int_seed(seed, tag, *indices):
    """Return a 32 bits integer seed derived like derive_seed()."""
    return int(derive_seed(seed, tag, *indices).generate_state(1)[0])


def format_float(value, digits=6):
    """Fixed-point rendering used by every text report (keeps files byte-stable)."""
    return f'{value:.{digits}f}'
