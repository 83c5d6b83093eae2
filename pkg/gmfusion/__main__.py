#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Allow user to run gmfusion as a module."""

# Execute with:
# $ python -m gmfusion run experiment.conf

import gmfusion

if __name__ == '__main__':
    gmfusion.main()
