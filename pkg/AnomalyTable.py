#  AnomalyTable.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Novel-class detection on top of tree-backed kNN.  A point is flagged when its
# mean distance to its k neighbours (d1) exceeds the average pairwise distance
# of its predicted class (d2) by more than a factor (1 + tau).

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Protocol, Tuple

import joblib
import numpy as np

import constants as const
from dataSets import VectorDataset, train_test_split
from debug_utils import debug
from HCTree import build_tree, knn_lookup
from hctErrors import AnomalyError


@dataclass(frozen=True)
class AnomalyTable:
    """
    Average pairwise Euclidean distance per training class.

    Classes with a single point have no pair; their entry is NaN and they are
    listed in ``singletons``.
    """
    averages: Dict[int, float]
    sizes: Dict[int, int]
    singletons: FrozenSet[int] = frozenset()

    def entry(self, label):
        if label not in self.averages:
            raise AnomalyError(f"class {label} is missing from the anomaly table (labels and table drifted apart)")
        return self.averages[label]

    def to_dict(self):
        return {str(c): {"average_distance": None if c in self.singletons else self.averages[c],
                         "size": self.sizes[c]} for c in sorted(self.averages)}


def _class_average(points, label, seed, pair_cap):
    m = points.shape[0]
    if m == 1:
        return label, math.nan
    if m * (m - 1) // 2 <= pair_cap:
        first, second = np.triu_indices(m, k=1)
    else:
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(int(label),)))
        first = rng.integers(m, size=pair_cap)
        second = rng.integers(m - 1, size=pair_cap)
        second = second + (second >= first)
    difference = points[first] - points[second]
    return label, float(np.mean(np.sqrt(np.sum(difference * difference, axis=1))))


def build_table(dataset: VectorDataset, seed=const.DEFAULT_SEED, pair_cap=const.PAIR_CAP, threads=1):
    """
    Per-class average pairwise distance over the training points.

    Every pair is used while a class has at most ``pair_cap`` pairs, otherwise
    ``pair_cap`` pairs are sampled with a stream derived from (seed, class).
    Members are taken in id order, so the table does not depend on row order.
    """
    if not dataset.has_labels:
        raise AnomalyError("the anomaly table needs class labels")
    jobs = []
    sizes = {}
    for label in np.unique(dataset.labels):
        rows = np.flatnonzero(dataset.labels == label)
        rows = rows[np.argsort(dataset.ids[rows], kind="stable")]
        sizes[int(label)] = int(rows.size)
        jobs.append((dataset.points[rows], int(label)))
    results = joblib.Parallel(n_jobs=threads, prefer="threads")(
        joblib.delayed(_class_average)(points, label, seed, pair_cap) for points, label in jobs)
    averages = dict(results)
    singletons = frozenset(label for label, value in averages.items() if math.isnan(value))
    return AnomalyTable(averages=averages, sizes=sizes, singletons=singletons)


def is_flagged(d1, d2, tau):
    """d1 > d2 (1 + tau); with no reference distance any positive d1 is flagged unless tau is infinite."""
    if math.isnan(d2) or d2 == 0.0:
        return d1 > 0.0 and math.isfinite(tau)
    return d1 > d2 * (1.0 + tau)


def distance_ratio(d1, d2):
    if math.isnan(d2) or d2 == 0.0:
        return math.inf if d1 > 0.0 else 0.0
    return d1 / d2


@dataclass(frozen=True)
class AnomalyDecision:
    point_id: int
    predicted: int
    d1: float
    d2: float
    flagged: bool
    ratio: float


def score(tree, table, train, x, k=const.DEFAULT_KNN, bucket=const.DEFAULT_BUCKET, tau=0.0, point_id=-1):
    """
    Classify x through the tree and decide whether it looks like an unseen class.

    Args:
        tree: HCTree built over ``train``.
        table: AnomalyTable built over ``train``.
        train: the labelled training VectorDataset.
        x: query point.
        k, bucket: kNN size and query bucket B.
        tau: relative threshold, >= 0.

    Raises:
        AnomalyError: predicted class missing from the table.
    """
    found = knn_lookup(tree, train, x, k, bucket)
    d1 = float(np.mean(found.distances))
    d2 = table.entry(found.predicted)
    return AnomalyDecision(point_id=point_id, predicted=found.predicted, d1=d1, d2=d2,
                           flagged=is_flagged(d1, d2, tau), ratio=distance_ratio(d1, d2))


class AnomalyScorer(Protocol):
    """Anything that predicts classes and reports d1/d2-style ratios can be swept by the harness."""

    def predict(self, points) -> np.ndarray:
        ...

    def ratios(self, points) -> np.ndarray:
        ...


class TreeScorer:
    """The tree-backed scorer: kNN vote for the class, distance ratio for the anomaly score."""
    def __init__(self, tree, table, train, k=const.DEFAULT_KNN, bucket=const.DEFAULT_BUCKET):
        self.tree = tree
        self.table = table
        self.train = train
        self.k = k
        self.bucket = bucket
        self._last = (None, None)

    def decisions(self, points, ids=None, tau=0.0):
        points = np.atleast_2d(points)
        ids = np.arange(points.shape[0]) if ids is None else ids
        return [score(self.tree, self.table, self.train, x, self.k, self.bucket, tau, int(i))
                for x, i in zip(points, ids)]

    def _evaluate(self, points):
        if self._last[0] is not points:
            found = self.decisions(points)
            self._last = (points, (np.array([d.predicted for d in found], dtype=np.int64),
                                   np.array([d.ratio for d in found], dtype=np.float64)))
        return self._last[1]

    def predict(self, points):
        return self._evaluate(points)[0]

    def ratios(self, points):
        return self._evaluate(points)[1]


@dataclass(frozen=True)
class HoldoutSpec:
    """
    Hold-out experiment settings: which classes are hidden from training, an
    optional class -> superclass map, and the tau grid to sweep.
    """
    held_out: Tuple[int, ...]
    superclasses: Optional[Dict[int, int]] = None
    threshold_grid: Tuple[float, ...] = const.DEFAULT_THRESHOLD_GRID
    test_fraction: float = const.DEFAULT_TEST_FRACTION

    def __post_init__(self):
        if not self.held_out:
            raise AnomalyError("hold out at least one class")
        if len(set(self.held_out)) != len(self.held_out):
            raise AnomalyError("held-out classes must be distinct")
        if not self.threshold_grid:
            raise AnomalyError("the threshold grid is empty")
        if any(math.isnan(t) or t < 0 for t in self.threshold_grid):
            raise AnomalyError("thresholds must be non-negative")
        if not 0.0 < self.test_fraction < 1.0:
            raise AnomalyError(f"test fraction must lie in (0, 1), got {self.test_fraction}")


@dataclass(frozen=True)
class SweepRow:
    tau: float
    pct_flagged: float
    precision: float
    recall: float
    f1: float
    f1_superclass: Optional[float] = None


@dataclass
class SweepReport:
    rows: List[SweepRow] = field(default_factory=list)
    held_out: Tuple[int, ...] = ()
    n_train: int = 0
    n_test: int = 0
    n_positive: int = 0
    accuracy_seen: float = 0.0

    def to_dict(self):
        return {
            "held_out": list(self.held_out),
            "n_train": self.n_train,
            "n_test": self.n_test,
            "n_positive": self.n_positive,
            "accuracy_seen": self.accuracy_seen,
            "sweep": [{"tau": r.tau if math.isfinite(r.tau) else "inf", "pct_flagged": r.pct_flagged,
                       "precision": r.precision, "recall": r.recall, "f1": r.f1,
                       "f1_superclass": r.f1_superclass} for r in self.rows],
        }


def _prf(true_positive, flagged_count, positive_count):
    precision = true_positive / flagged_count if flagged_count else 0.0
    recall = true_positive / positive_count if positive_count else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall > 0 else 0.0
    return precision, recall, f1


def sweep_thresholds(ratios, positives, grid, superclass_correct=None):
    """
    Precision / recall / F1 of the flag rule ratio > 1 + tau for every tau.

    Positives are points of held-out classes.  With ``superclass_correct`` a
    held-out point also counts as a hit when its predicted class belongs to its
    true superclass; false positives are unchanged.
    """
    ratios = np.asarray(ratios, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    rows = []
    for tau in grid:
        flagged = ratios > 1.0 + tau
        hits = int(np.count_nonzero(flagged & positives))
        precision, recall, f1 = _prf(hits, int(np.count_nonzero(flagged)), int(positives.sum()))
        f1_super = None
        if superclass_correct is not None:
            credited = int(np.count_nonzero(positives & (flagged | superclass_correct)))
            false_alarms = int(np.count_nonzero(flagged & ~positives))
            f1_super = _prf(credited, credited + false_alarms, int(positives.sum()))[2]
        rows.append(SweepRow(tau=float(tau), pct_flagged=100.0 * float(np.mean(flagged)),
                             precision=precision, recall=recall, f1=f1, f1_superclass=f1_super))
    return rows


def simulate_holdout(dataset, spec: HoldoutSpec, config, k=const.DEFAULT_KNN, bucket=const.DEFAULT_BUCKET,
                     threads=1, pair_cap=const.PAIR_CAP, scorer_factory=None):
    """
    Hide some classes during training and sweep the anomaly threshold.

    The seen classes are split with ``spec.test_fraction`` (seeded by the build
    seed); the tree trains on the rest.  The test set is the seen-class test
    share plus every held-out point.

    Args:
        scorer_factory: optional callable(train) -> AnomalyScorer replacing the tree scorer.

    Returns:
        SweepReport
    """
    if not dataset.has_labels:
        raise AnomalyError("hold-out simulation needs class labels")
    classes = set(int(c) for c in np.unique(dataset.labels))
    held = set(spec.held_out)
    if not held <= classes:
        raise AnomalyError(f"held-out classes {sorted(held - classes)} do not occur in the data")
    seen = classes - held
    if len(seen) < 2:
        raise AnomalyError(f"at least two classes must remain for training, got {len(seen)}")
    if spec.superclasses is not None and not classes <= set(spec.superclasses):
        raise AnomalyError(f"superclass map misses classes {sorted(classes - set(spec.superclasses))}")

    is_held = np.isin(dataset.labels, sorted(held))
    train, seen_test = train_test_split(dataset.subset(np.flatnonzero(~is_held)), spec.test_fraction, config.seed)
    held_part = dataset.subset(np.flatnonzero(is_held))
    test_points = np.vstack([seen_test.points, held_part.points])
    test_labels = np.concatenate([seen_test.labels, held_part.labels])
    positives = np.concatenate([np.zeros(seen_test.n, dtype=bool), np.ones(held_part.n, dtype=bool)])

    if scorer_factory is None:
        tree = build_tree(train, config, threads)
        table = build_table(train, config.seed, pair_cap, threads)
        scorer = TreeScorer(tree, table, train, k, bucket)
    else:
        scorer = scorer_factory(train)
    predicted = scorer.predict(test_points)
    ratios = scorer.ratios(test_points)
    debug(f"hold-out: {train.n} train, {seen_test.n} seen test, {held_part.n} held-out points")

    superclass_correct = None
    if spec.superclasses is not None:
        to_super = np.vectorize(lambda c: spec.superclasses[int(c)], otypes=[np.int64])
        superclass_correct = positives & (to_super(predicted) == to_super(test_labels))

    seen_mask = ~positives
    return SweepReport(rows=sweep_thresholds(ratios, positives, spec.threshold_grid, superclass_correct),
                       held_out=tuple(sorted(held)), n_train=train.n, n_test=int(positives.size),
                       n_positive=int(positives.sum()),
                       accuracy_seen=float(np.mean(predicted[seen_mask] == test_labels[seen_mask])))


def _cell(value):
    if value is None:
        return ""
    return "inf" if math.isinf(value) else repr(float(value))


def write_sweep_csv(report, path):
    with open(os.path.expanduser(path), "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["tau", "pct_flagged", "precision", "recall", "f1", "f1_superclass"])
        for row in report.rows:
            writer.writerow([_cell(row.tau), _cell(row.pct_flagged), _cell(row.precision),
                             _cell(row.recall), _cell(row.f1), _cell(row.f1_superclass)])
