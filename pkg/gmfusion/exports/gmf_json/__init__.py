#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""JSON interface class: every statistical report."""

from gmfusion.exports.export import GmfExport
from gmfusion.globals import json_dumps


class Export(GmfExport):
    """This class manages the JSON export module."""

    filename = 'stats.json'

    def render(self, report):
        return json_dumps(report.as_dict()).decode('utf-8') + '\n'
