#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Labelled datasets and their CSV ingestion."""

import csv
import os
from collections import Counter as ClassCounter
from dataclasses import dataclass, field

import numpy as np

from gmfusion.errors import DataError
from gmfusion.logger import logger

MISSING_MARKERS = ('', '?')

NUMERIC = 'numeric'
CATEGORICAL = 'categorical'


@dataclass(frozen=True)
class FeatureSpec:
    name: str
    kind: str


@dataclass
class Dataset:
    """n labelled instances.

    X is an (n, p) object array: floats (nan when missing) for the numeric
    features, strings (None when missing) for the categorical ones. y holds
    class indices into classes.
    """

    name: str
    X: np.ndarray
    y: np.ndarray
    classes: list
    schema: list = field(default_factory=list)

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=int)
        if self.X.ndim != 2 or self.X.shape[0] != self.y.shape[0]:
            raise DataError(f'{self.name}: {self.X.shape[0]} instances for {self.y.shape[0]} labels')
        if self.X.shape[0] == 0:
            raise DataError(f'{self.name}: no instance')
        if len(self.classes) < 2:
            raise DataError(f'{self.name}: at least 2 classes are needed, found {len(self.classes)}')
        if not self.schema:
            self.schema = [FeatureSpec(f'x{i}', NUMERIC) for i in range(self.X.shape[1])]
        if len(self.schema) != self.X.shape[1]:
            raise DataError(f'{self.name}: schema has {len(self.schema)} features, data has {self.X.shape[1]}')

    @classmethod
    def from_arrays(cls, name, X, labels):
        """Build a numeric dataset from a float matrix and a label sequence."""
        classes = sorted({str(v) for v in labels})
        index = {c: i for i, c in enumerate(classes)}
        y = np.array([index[str(v)] for v in labels], dtype=int)
        return cls(name, np.asarray(X, dtype=float).astype(object), y, classes)

    @property
    def n_instances(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def n_classes(self):
        return len(self.classes)

    def class_counts(self):
        return np.bincount(self.y, minlength=self.n_classes)

    def subset(self, rows):
        """Dataset restricted to the given rows (same classes and schema)."""
        return Dataset(self.name, self.X[rows], self.y[rows], self.classes, self.schema)

    def majority_class(self):
        return int(np.argmax(self.class_counts()))


def _parse_float(value):
    try:
        return float(value)
    except ValueError:
        return None


def load_dataset(path, label, name=None, delimiter=',', ignore=()):
    """Read a CSV file with a header line.

    :param label: name of the class column
    :param ignore: names of the columns left out (identifiers)
    :return: a Dataset; a column is numeric when every non-missing value
    parses as a float, categorical otherwise
    """
    name = name or os.path.splitext(os.path.basename(path))[0]
    try:
        with open(path, newline='', encoding='utf-8') as f:
            rows = list(csv.reader(f, delimiter=delimiter))
    except OSError as e:
        raise DataError(f'Can not read dataset {name} from {path} ({e})')

    rows = [r for r in rows if any(cell.strip() for cell in r)]
    if not rows:
        raise DataError(f'Dataset {name} ({path}) is empty')
    header = [h.strip() for h in rows[0]]
    if label not in header:
        raise DataError(f"Dataset {name}: no label column '{label}' (columns: {', '.join(header)})")
    label_col = header.index(label)
    unknown = [column for column in ignore if column not in header or column == label]
    if unknown:
        raise DataError(f"Dataset {name}: can not ignore column(s) {', '.join(unknown)}")

    body = []
    for number, row in enumerate(rows[1:], start=2):
        if len(row) != len(header):
            raise DataError(f'Dataset {name}: row {number} has {len(row)} fields, {len(header)} expected')
        cells = [cell.strip() for cell in row]
        if cells[label_col] in MISSING_MARKERS:
            raise DataError(f'Dataset {name}: row {number} has no label')
        body.append(cells)
    if not body:
        raise DataError(f'Dataset {name}: no instance')

    labels = [r[label_col] for r in body]
    classes = sorted(set(labels))
    if len(classes) < 2:
        raise DataError(f'Dataset {name}: single class {classes}, at least 2 are needed')
    index = {c: i for i, c in enumerate(classes)}
    y = np.array([index[v] for v in labels], dtype=int)

    columns, schema = [], []
    for col, feature in enumerate(header):
        if col == label_col or feature in ignore:
            continue
        values = [r[col] for r in body]
        present = [v for v in values if v not in MISSING_MARKERS]
        if not present:
            logger.warning(f'Dataset {name}: feature {feature} has no value, dropped')
            continue
        if all(_parse_float(v) is not None for v in present):
            schema.append(FeatureSpec(feature, NUMERIC))
            columns.append([np.nan if v in MISSING_MARKERS else float(v) for v in values])
        else:
            schema.append(FeatureSpec(feature, CATEGORICAL))
            columns.append([None if v in MISSING_MARKERS else v for v in values])

    X = np.empty((len(body), len(columns)), dtype=object)
    for col, values in enumerate(columns):
        X[:, col] = values
    counts = ClassCounter(labels)
    logger.info(
        f'Dataset {name}: {len(body)} instances, {len(schema)} features, classes {dict(sorted(counts.items()))}'
    )
    return Dataset(name, X, y, classes, schema)
