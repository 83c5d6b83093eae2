#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""The timer manager."""

from time import perf_counter


class Counter:
    """The counter class. A simple chronometer."""

    def __init__(self):
        self.start()

    def start(self):
        self.target = perf_counter()

    def reset(self):
        self.start()

    def get(self):
        return perf_counter() - self.target
