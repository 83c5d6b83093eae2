#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Manage the gmfusion combine command."""

import os
from dataclasses import dataclass
from typing import Optional

import numpy as np

from gmfusion.ensemble import as_score_matrix, classify
from gmfusion.errors import EXIT_OK, ConfigurationError, DataError, MalformedScoresError
from gmfusion.globals import derive_rng, safe_makedirs
from gmfusion.logger import logger
from gmfusion.outputs.gmf_stdout_trace import GmfStdoutTrace


@dataclass(frozen=True)
class ScoreFile:
    """An N x L score matrix and its optional class labels."""

    scores: np.ndarray
    labels: Optional[list] = None


def _split(line):
    return [field.strip() for field in line.split(',')]


def read_score_file(path, normalize=False):
    """Read a score file: one comma-separated row per member.

    Blank lines are ignored. The first line starting with '#' may carry the
    class labels; later '#' lines are comments.
    """
    try:
        with open(path, encoding='utf-8') as f:
            content = f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise DataError(f"Can not read score file '{path}': {e}")

    labels = None
    header_seen = False
    rows = []
    for number, line in enumerate(content, start=1):
        line = line.strip()
        if not line:
            continue
        if line.startswith('#'):
            if not header_seen and not rows:
                labels = [label for label in _split(line[1:]) if label] or None
            header_seen = True
            continue
        try:
            row = [float(field) for field in _split(line)]
        except ValueError:
            raise MalformedScoresError(f"{path}:{number}: not a list of numbers: '{line}'")
        if rows and len(row) != len(rows[0]):
            raise MalformedScoresError(f'{path}:{number}: {len(row)} scores, {len(rows[0])} expected')
        rows.append(row)

    if not rows:
        raise MalformedScoresError(f'{path}: no score row')
    scores = as_score_matrix(rows, normalize=normalize)
    if labels is not None and len(labels) != scores.shape[1]:
        raise MalformedScoresError(f'{path}: {len(labels)} labels for {scores.shape[1]} classes')
    return ScoreFile(scores, labels)


class GmfusionCombine:
    """This class fuses one score matrix and prints the trace."""

    def __init__(self, config=None, args=None):
        self.config = config
        self.args = args
        self.trace = GmfStdoutTrace(config=config, args=args)

    def labels(self, score_file):
        if self.args.labels:
            labels = [label.strip() for label in self.args.labels.split(',')]
            if len(labels) != score_file.scores.shape[1]:
                raise MalformedScoresError(f'{len(labels)} labels for {score_file.scores.shape[1]} classes')
            return labels
        return score_file.labels

    def serve(self):
        score_file = read_score_file(self.args.scorefile, normalize=self.args.normalize)
        labels = self.labels(score_file)
        prediction = classify(
            score_file.scores,
            self.args.combiner,
            tie_policy=self.args.tie_policy,
            rng=derive_rng(self.args.seed, 'ties'),
            normalize=self.args.normalize,
        )
        logger.debug(f'{self.args.combiner} on {self.args.scorefile}: class index {prediction.class_index}')
        self.trace.update(score_file.scores, self.args.combiner, prediction, labels, self.args.trace)

        if self.args.out:
            path = os.path.join(self.args.out, 'combine.txt')
            lines = self.trace.lines(score_file.scores, self.args.combiner, prediction, labels, self.args.trace)
            try:
                safe_makedirs(self.args.out)
                with open(path, 'w', encoding='utf-8') as f:
                    f.write('\n'.join(lines) + '\n')
            except OSError as e:
                raise ConfigurationError(f'Cannot write the combine trace {path}: {e}')
            logger.info(f'Combine trace written to {path}')
        return EXIT_OK

    def end(self):
        self.trace.end()
