#
# This file is part of gmfusion.
#
# SPDX-FileCopyrightText: 2024 The gmfusion authors
#
# SPDX-License-Identifier: LGPL-3.0-only
#

"""Repeated stratified cross-validation of the ensemble combiners."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import psutil
from sklearn.model_selection import KFold, StratifiedKFold

from gmfusion.dataset import Dataset, load_dataset
from gmfusion.ensemble import (
    COMBINERS,
    DEFAULT_COMPOSITION,
    check_combiner,
    check_tie_policy,
    fuse_batch,
    parse_composition,
    train_ensemble,
)
from gmfusion.errors import ConfigurationError, GmfusionError
from gmfusion.globals import derive_int_seed, derive_rng
from gmfusion.logger import logger
from gmfusion.statistics import average_ranks
from gmfusion.timer import Counter


@dataclass(frozen=True)
class DatasetSource:
    name: str
    path: str
    label: str
    delimiter: str = ','
    ignore: tuple = ()

    def load(self):
        return load_dataset(self.path, self.label, name=self.name, delimiter=self.delimiter, ignore=self.ignore)


@dataclass
class ExperimentConfig:
    """Everything a run needs. Validated at construction, before any work."""

    datasets: list
    sizes: list
    combiners: list
    folds: int = 10
    repeats: int = 10
    seed: int = 0
    tie_policy: str = 'lowest-index'
    output_dir: str = './gmfusion-output'
    parallel: bool = False
    workers: int = 0
    alpha: float = 0.01
    timing: bool = True
    composition: dict = field(default_factory=lambda: dict(DEFAULT_COMPOSITION))
    learners_config: Optional[object] = None

    def __post_init__(self):
        if not self.sizes:
            raise ConfigurationError('At least one ensemble size is needed')
        for size in self.sizes:
            if int(size) < 2:
                raise ConfigurationError(f'Ensemble sizes must be >= 2, got {size}')
        self.sizes = [int(s) for s in self.sizes]
        if not self.combiners:
            raise ConfigurationError(f"At least one combiner is needed (supported: {', '.join(COMBINERS)})")
        for combiner in self.combiners:
            check_combiner(combiner)
        if len(set(self.combiners)) != len(self.combiners):
            raise ConfigurationError(f'Duplicate combiner in {self.combiners}')
        if self.folds < 2:
            raise ConfigurationError(f'folds must be >= 2, got {self.folds}')
        if self.repeats < 1:
            raise ConfigurationError(f'repeats must be >= 1, got {self.repeats}')
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError(f'alpha must be in (0,1), got {self.alpha}')
        check_tie_policy(self.tie_policy)
        self.composition = parse_composition(self.composition)

    def worker_count(self):
        """Number of cell workers (1 when the run is serial)."""
        if not self.parallel:
            return 1
        if self.workers > 0:
            return self.workers
        return psutil.cpu_count(logical=False) or psutil.cpu_count() or 1


@dataclass(frozen=True)
class FoldPlan:
    """Assignment of every instance to one of k folds."""

    k: int
    assignments: np.ndarray
    seed: int
    stratified: bool = True

    def test_rows(self, fold):
        return np.flatnonzero(self.assignments == fold)

    def train_rows(self, fold):
        return np.flatnonzero(self.assignments != fold)

    def folds(self):
        for fold in range(self.k):
            yield self.train_rows(fold), self.test_rows(fold)

    def fold_sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def stratified_kfold(d: Dataset, k=10, seed=0):
    """Stratified k-fold plan built on scikit-learn's StratifiedKFold.

    Every fold gets its class share within one instance. Falls back to
    plain shuffled KFold folds when a class has fewer than k instances.
    """
    n = d.n_instances
    if k < 2:
        raise ConfigurationError(f'k must be >= 2, got {k}')
    if k > n:
        raise ConfigurationError(f'{d.name}: {k} folds requested for {n} instances')
    counts = d.class_counts()
    stratified = bool(np.all(counts[counts > 0] >= k))
    if stratified:
        splitter = StratifiedKFold(n_splits=k, shuffle=True, random_state=seed)
    else:
        logger.warning(f'{d.name}: a class has fewer than {k} instances, using shuffled (non stratified) folds')
        splitter = KFold(n_splits=k, shuffle=True, random_state=seed)
    assignments = np.empty(n, dtype=int)
    for fold, (_, test) in enumerate(splitter.split(np.zeros((n, 1)), d.y)):
        assignments[test] = fold
    return FoldPlan(k, assignments, seed, stratified)


@dataclass(frozen=True)
class RunRecord:
    dataset: str
    size: int
    combiner: str
    run: int
    fold: int
    accuracy: float
    seconds: float


@dataclass(frozen=True)
class CellFailure:
    dataset: str
    size: int
    run: int
    fold: int
    message: str


class ResultTable:
    """Per-run accuracies of every (dataset, size, combiner) cell."""

    def __init__(self, datasets, sizes, combiners, folds, repeats):
        self.datasets = list(datasets)
        self.sizes = list(sizes)
        self.combiners = list(combiners)
        self.folds = folds
        self.repeats = repeats
        self.cells = {(d, s, c): [] for d in self.datasets for s in self.sizes for c in self.combiners}
        self.failures = []
        self.baselines = {d: [] for d in self.datasets}

    @property
    def expected_runs(self):
        return self.repeats * self.folds

    def add(self, record: RunRecord):
        if not 0.0 <= record.accuracy <= 1.0:
            raise ValueError(f'accuracy {record.accuracy} outside [0,1]')
        self.cells[(record.dataset, record.size, record.combiner)].append(record)

    def records(self):
        """All records in report order (dataset, size, combiner, run, fold)."""
        out = []
        for key in self.cells:
            out.extend(sorted(self.cells[key], key=lambda r: (r.run, r.fold)))
        return out

    def accuracies(self, dataset, size, combiner):
        records = sorted(self.cells[(dataset, size, combiner)], key=lambda r: (r.run, r.fold))
        return np.array([r.accuracy for r in records])

    def mean(self, dataset, size, combiner):
        acc = self.accuracies(dataset, size, combiner)
        return float(acc.mean()) if acc.size else float('nan')

    def std(self, dataset, size, combiner):
        acc = self.accuracies(dataset, size, combiner)
        return float(acc.std(ddof=1)) if acc.size > 1 else 0.0

    def seconds(self, dataset, size, combiner):
        return float(sum(r.seconds for r in self.cells[(dataset, size, combiner)]))

    def is_complete(self, dataset, size, combiner):
        return len(self.cells[(dataset, size, combiner)]) == self.expected_runs

    def mean_accuracies(self, size):
        """{combiner: [mean accuracy per dataset]} for one ensemble size."""
        return {c: [self.mean(d, size, c) for d in self.datasets] for c in self.combiners}

    def run_accuracies(self, dataset, size):
        """{combiner: per-run accuracies} on one dataset, restricted to the runs every combiner has."""
        by_run = {c: {(r.run, r.fold): r.accuracy for r in self.cells[(dataset, size, c)]} for c in self.combiners}
        common = sorted(set.intersection(*(set(v) for v in by_run.values())))
        return {c: np.array([by_run[c][key] for key in common]) for c in self.combiners}

    def average_ranks(self, size, dataset=None):
        """Average rank of every combiner (1 = best).

        Across datasets (ranking the mean accuracies) when dataset is None,
        else across the runs of that dataset.
        """
        if dataset is None:
            return average_ranks(self.mean_accuracies(size))
        return average_ranks(self.run_accuracies(dataset, size))

    def overall_mean(self, size, combiner):
        return float(np.mean([self.mean(d, size, combiner) for d in self.datasets]))

    def best_combiner(self, size):
        """Highest overall mean accuracy (first listed on ties)."""
        means = [self.overall_mean(size, c) for c in self.combiners]
        return self.combiners[int(np.argmax(means))]

    def baseline(self, dataset):
        """Majority-class accuracy under the same folds."""
        values = self.baselines[dataset]
        return float(np.mean(values)) if values else float('nan')


def timing_report(table: ResultTable, by_dataset=False):
    """Total train+test seconds per (size, combiner), or per (dataset, size, combiner)."""
    if by_dataset:
        return {key: table.seconds(*key) for key in table.cells}
    return {
        (s, c): float(sum(table.seconds(d, s, c) for d in table.datasets)) for s in table.sizes for c in table.combiners
    }


def _majority_accuracy(train: Dataset, test: Dataset):
    majority = train.majority_class()
    return float(np.mean(test.y == majority))


def _run_cell(config: ExperimentConfig, dataset: Dataset, di, repeat, fold, size, train_rows, test_rows):
    """Train one ensemble and score it with every combiner."""
    counter = Counter()
    train, test = dataset.subset(train_rows), dataset.subset(test_rows)
    try:
        ensemble = train_ensemble(
            train,
            size,
            composition=config.composition,
            seed=derive_int_seed(config.seed, 'ensemble', di, repeat, fold, size),
            config=config.learners_config,
            tie_policy=config.tie_policy,
        )
        scores = ensemble.member_scores(test.X)
        shared_seconds = counter.get()
        records = []
        for ci, combiner in enumerate(config.combiners):
            counter.reset()
            rng = derive_rng(config.seed, 'ties', di, repeat, fold, size, ci)
            fused = fuse_batch(scores, combiner, config.tie_policy, rng)
            seconds = shared_seconds + counter.get() if config.timing else 0.0
            accuracy = float(np.mean(fused.classes == test.y))
            records.append(RunRecord(dataset.name, size, combiner, repeat, fold, accuracy, seconds))
    except (GmfusionError, ValueError, ArithmeticError, np.linalg.LinAlgError) as e:
        logger.warning(f'Cell {dataset.name} size={size} run={repeat} fold={fold} failed: {e}')
        return [], CellFailure(dataset.name, size, repeat, fold, str(e))
    logger.debug(f'Cell {dataset.name} size={size} run={repeat} fold={fold} done in {shared_seconds:.3f}s')
    return records, None


def run_experiment(config: ExperimentConfig, datasets=None) -> ResultTable:
    """Run every (dataset, repeat, fold, size) cell and collect the accuracies.

    :param datasets: already loaded datasets (default: load config.datasets)
    """
    if datasets is None:
        datasets = [source.load() for source in config.datasets]
    names = [d.name for d in datasets]
    if len(set(names)) != len(names):
        raise ConfigurationError(f'Duplicate dataset names: {names}')
    table = ResultTable(names, config.sizes, config.combiners, config.folds, config.repeats)

    tasks = []
    for di, dataset in enumerate(datasets):
        for repeat in range(config.repeats):
            plan = stratified_kfold(dataset, config.folds, derive_int_seed(config.seed, 'folds', di, repeat))
            for fold, (train_rows, test_rows) in enumerate(plan.folds()):
                table.baselines[dataset.name].append(
                    _majority_accuracy(dataset.subset(train_rows), dataset.subset(test_rows))
                )
                for size in config.sizes:
                    tasks.append((dataset, di, repeat, fold, size, train_rows, test_rows))

    workers = config.worker_count()
    logger.info(f'Run {len(tasks)} cells on {len(datasets)} datasets with {workers} worker(s)')
    counter = Counter()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(lambda task: _run_cell(config, *task), tasks))
    else:
        results = [_run_cell(config, *task) for task in tasks]

    for records, failure in results:
        for record in records:
            table.add(record)
        if failure is not None:
            table.failures.append(failure)
    logger.info(f'Experiment done in {counter.get():.1f}s ({len(table.failures)} failed cells)')
    return table
