#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Stdout interface class: fusion trace of a single score matrix."""

from gmfusion.globals import format_float, printandflush
from gmfusion.mixture import COMBINER_LABELS, COMBINER_NAMES


def vector(values, digits=6):
    return '(' + ', '.join(format_float(float(v), digits) for v in values) + ')'


class GmfStdoutTrace:
    """This class renders the per-class fusion trace of the combine command.

    Classes are numbered from 1, as in the worked examples.
    """

    def __init__(self, config=None, args=None):
        self.config = config
        self.args = args

    def class_name(self, j, labels=None):
        if labels:
            return f'class {j + 1} ({labels[j]})'
        return f'class {j + 1}'

    def lines(self, scores, combiner, prediction, labels=None, trace=True):
        n, n_classes = scores.shape
        if combiner in COMBINER_NAMES:
            title = f'{COMBINER_LABELS[COMBINER_NAMES[combiner]]} ({combiner})'
        else:
            title = combiner
        out = []
        if trace:
            out.append(f'Combiner: {title}, {n} members, {n_classes} classes')
            for j in range(n_classes):
                head = f'  {self.class_name(j, labels)}: scores={vector(scores[:, j])}'
                if prediction.member_weights is not None:
                    head += (
                        f' alpha={format_float(prediction.referential[j])}'
                        f' d={format_float(prediction.distance_sums[j])}'
                        f' weights={vector(prediction.member_weights[:, j])}'
                    )
                out.append(f'{head} value={format_float(prediction.fused_scores[j])}')
        out.append(f'Value = {vector(prediction.fused_scores)}')
        out.append(f'Decision: {self.class_name(prediction.class_index, labels)}')
        return out

    def update(self, scores, combiner, prediction, labels=None, trace=True):
        """Print the trace to stdout."""
        for line in self.lines(scores, combiner, prediction, labels, trace):
            printandflush(line)

    def end(self):
        pass
