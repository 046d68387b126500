#  dataSets.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Vector datasets and explicit similarity graphs: loading, validation,
# normalization and the synthetic generators used by the experiments.

import csv
import math
import os
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

import constants as const
from debug_utils import debug
from hctErrors import DatasetError


def _frozen(array):
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class VectorDataset:
    """
    An n x d matrix of feature vectors with optional integer class labels.

    Rows are immutable once the dataset is built.  ``ids`` are stable point
    identifiers (0..n-1 for freshly loaded data) that survive ``subset`` and
    ``train_test_split`` so results can always be traced back to input rows.

    Attributes:
        points (np.ndarray): float64 matrix, one point per row.
        labels (np.ndarray | None): non-negative class ids, one per row.
        ids (np.ndarray): stable point identifiers.
        unit_normalized (bool): every row has Euclidean norm 1 (within 1e-9).
    """
    points: np.ndarray
    labels: Optional[np.ndarray] = None
    ids: Optional[np.ndarray] = None
    unit_normalized: bool = False

    def __post_init__(self):
        points = np.asarray(self.points, dtype=np.float64)
        if points.ndim != 2:
            raise DatasetError(f"points must be a 2-d matrix, got shape {points.shape}")
        if points.shape[0] == 0:
            raise DatasetError("a dataset needs at least one point")
        bad = ~np.isfinite(points)
        if bad.any():
            row, col = np.argwhere(bad)[0]
            raise DatasetError(f"non-finite value at row {row}, column {col}")
        if self.unit_normalized:
            norms = np.linalg.norm(points, axis=1)
            off = np.abs(norms - 1.0) > const.UNIT_NORM_TOL
            if off.any():
                row = int(np.argmax(off))
                raise DatasetError(f"row {row} has norm {norms[row]!r}, expected a unit vector")
        object.__setattr__(self, "points", _frozen(points))

        n = points.shape[0]
        if self.labels is not None:
            labels = np.asarray(self.labels)
            if labels.shape != (n,):
                raise DatasetError(f"expected {n} labels, got {labels.shape[0] if labels.ndim else 0}")
            if labels.size and (not np.issubdtype(labels.dtype, np.integer)):
                if not np.all(np.equal(np.mod(labels, 1), 0)):
                    raise DatasetError("labels must be integers")
            labels = labels.astype(np.int64)
            if (labels < 0).any():
                raise DatasetError("labels must be non-negative")
            object.__setattr__(self, "labels", _frozen(labels))

        ids = np.arange(n) if self.ids is None else np.asarray(self.ids, dtype=np.int64)
        if ids.shape != (n,):
            raise DatasetError(f"expected {n} ids, got {ids.shape}")
        if np.unique(ids).size != n:
            raise DatasetError("point ids must be distinct")
        object.__setattr__(self, "ids", _frozen(ids))

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    @property
    def has_labels(self):
        return self.labels is not None

    def subset(self, rows):
        """A new dataset holding the given row positions, ids and labels carried along."""
        rows = np.asarray(rows, dtype=np.int64)
        return VectorDataset(points=self.points[rows],
                             labels=None if self.labels is None else self.labels[rows],
                             ids=self.ids[rows],
                             unit_normalized=self.unit_normalized)

    def with_labels(self, labels):
        return VectorDataset(points=self.points, labels=labels, ids=self.ids,
                             unit_normalized=self.unit_normalized)


@dataclass(frozen=True, eq=False)
class ExplicitGraph:
    """
    A symmetric similarity graph with weights in [0, 1], zero diagonal and no isolated nodes.

    ``degree`` is cached at construction (d_i = sum_j w_ij).  ``labels`` is optional
    ground truth, e.g. the two blocks of a planted partition.
    """
    weights: np.ndarray
    labels: Optional[np.ndarray] = None
    degree: np.ndarray = field(init=False)

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=np.float64)
        if weights.ndim != 2 or weights.shape[0] != weights.shape[1]:
            raise DatasetError(f"weights must be square, got shape {weights.shape}")
        if not np.isfinite(weights).all():
            raise DatasetError("weights must be finite")
        if np.abs(weights - weights.T).max(initial=0.0) > const.SYMMETRY_TOL:
            raise DatasetError("weights must be symmetric")
        if (weights < 0).any() or (weights > 1).any():
            raise DatasetError("weights must lie in [0, 1]")
        if np.abs(np.diag(weights)).max(initial=0.0) != 0.0:
            raise DatasetError("the diagonal of an explicit graph must be zero")
        degree = weights.sum(axis=1)
        isolated = np.flatnonzero(degree <= 0)
        if isolated.size:
            raise DatasetError(f"isolated node {int(isolated[0])} (degree 0)")
        object.__setattr__(self, "weights", _frozen(weights))
        object.__setattr__(self, "degree", _frozen(degree))
        if self.labels is not None:
            labels = np.asarray(self.labels, dtype=np.int64)
            if labels.shape != (weights.shape[0],):
                raise DatasetError("graph labels must have one entry per node")
            object.__setattr__(self, "labels", _frozen(labels))

    @property
    def n(self):
        return self.weights.shape[0]

    def edge_count(self):
        return int(np.count_nonzero(np.triu(self.weights, k=1)))


@dataclass(frozen=True)
class PlantedParams:
    """Two-block planted partition: intra-block probability p, inter-block q < p."""
    n: int
    p: float
    q: float
    seed: int = const.DEFAULT_SEED

    def __post_init__(self):
        if self.n < 2 or self.n % 2:
            raise DatasetError(f"planted partition needs an even n >= 2, got {self.n}")
        if not 0.0 < self.p <= 1.0:
            raise DatasetError(f"p must lie in (0, 1], got {self.p}")
        if not 0.0 <= self.q < 1.0:
            raise DatasetError(f"q must lie in [0, 1), got {self.q}")
        if not self.q < self.p:
            raise DatasetError(f"q ({self.q}) must be smaller than p ({self.p})")


def normalize_rows(points):
    """Scale every row to unit Euclidean norm; zero rows are an error."""
    points = np.asarray(points, dtype=np.float64)
    norms = np.linalg.norm(points, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise DatasetError(f"row {int(zero[0])} has zero norm and cannot be normalized")
    return points / norms[:, None]


def _is_unit(points):
    return bool(np.all(np.abs(np.linalg.norm(points, axis=1) - 1.0) <= const.UNIT_NORM_TOL))


def _parse_label(text, row, col):
    try:
        value = float(text)
    except ValueError:
        raise DatasetError(f"row {row}, column {col}: label {text!r} is not a number") from None
    if not math.isfinite(value) or value != int(value) or value < 0:
        raise DatasetError(f"row {row}, column {col}: label {text!r} is not a non-negative integer")
    return int(value)


def load_csv(path, label_column=None, normalize=False):
    """
    Load a comma-separated vector file.

    Lines starting with '#' and blank lines are skipped.  When ``label_column`` is
    given (negative values count from the end) that column holds integer class ids
    and is removed from the features.

    Args:
        path: CSV file path.
        label_column: optional index of the label column.
        normalize: scale rows to unit norm.

    Returns:
        VectorDataset with ids 0..n-1 in file order.

    Raises:
        DatasetError: parse failure (row and column reported), ragged rows, zero-norm row.
    """
    rows = []
    labels = []
    width = None
    with open(os.path.expanduser(path), newline="", encoding="utf-8") as handle:
        for lineno, record in enumerate(csv.reader(handle), start=1):
            if not record or (len(record) == 1 and not record[0].strip()):
                continue
            if record[0].lstrip().startswith("#"):
                continue
            if width is None:
                width = len(record)
            elif len(record) != width:
                raise DatasetError(f"row {lineno} has {len(record)} fields, expected {width} (ragged rows)")
            label_at = None
            if label_column is not None:
                label_at = label_column if label_column >= 0 else width + label_column
                if not 0 <= label_at < width:
                    raise DatasetError(f"label column {label_column} is outside rows of width {width}")
                labels.append(_parse_label(record[label_at].strip(), lineno, label_at))
            values = []
            for col, text in enumerate(record):
                if col == label_at:
                    continue
                try:
                    value = float(text)
                except ValueError:
                    raise DatasetError(f"row {lineno}, column {col}: cannot parse {text!r} as a number") from None
                if not math.isfinite(value):
                    raise DatasetError(f"row {lineno}, column {col}: value {text!r} is not finite")
                values.append(value)
            rows.append(values)

    if not rows:
        raise DatasetError(f"{path} holds no data rows")
    points = np.array(rows, dtype=np.float64)
    if points.shape[1] == 0:
        raise DatasetError(f"{path} has no feature columns")
    if normalize:
        points = normalize_rows(points)
    debug(f"loaded {points.shape[0]} x {points.shape[1]} from {path}")
    return VectorDataset(points=points,
                         labels=np.array(labels, dtype=np.int64) if label_column is not None else None,
                         unit_normalized=normalize or _is_unit(points))


def write_csv(dataset, path, with_labels=True):
    """Write a dataset so that load_csv(path, label_column=-1) reproduces it bit-exactly."""
    include = with_labels and dataset.has_labels
    with open(os.path.expanduser(path), "w", newline="", encoding="utf-8") as handle:
        handle.write(f"# pyHCT vectors n={dataset.n} d={dataset.d}"
                     f"{' label_column=-1' if include else ''}\n")
        writer = csv.writer(handle, lineterminator="\n")
        for row in range(dataset.n):
            fields = [repr(float(v)) for v in dataset.points[row]]
            if include:
                fields.append(str(int(dataset.labels[row])))
            writer.writerow(fields)


def load_labels(path):
    """One integer label per line, '#' comments allowed."""
    labels = []
    with open(os.path.expanduser(path), encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            labels.append(_parse_label(text, lineno, 0))
    return np.array(labels, dtype=np.int64)


def write_labels(labels, path):
    with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
        for label in labels:
            handle.write(f"{int(label)}\n")


def _format_weight(weight):
    return "1" if weight == 1.0 else repr(float(weight))


def load_edge_list(path, n=None):
    """
    Read an undirected edge list, one "i j w" per line (w defaults to 1), 0-indexed,
    each edge listed once.  The node count is the largest index + 1 unless given.
    """
    edges = []
    with open(os.path.expanduser(path), encoding="utf-8") as handle:
        for lineno, line in enumerate(handle, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.replace(",", " ").split()
            if len(parts) not in (2, 3):
                raise DatasetError(f"line {lineno}: expected 'i j [w]', got {line.strip()!r}")
            try:
                i, j = int(parts[0]), int(parts[1])
                w = float(parts[2]) if len(parts) == 3 else 1.0
            except ValueError:
                raise DatasetError(f"line {lineno}: cannot parse {line.strip()!r}") from None
            if i < 0 or j < 0:
                raise DatasetError(f"line {lineno}: negative node index")
            if i == j:
                raise DatasetError(f"line {lineno}: self-loop on node {i}")
            edges.append((lineno, i, j, w))
    if not edges:
        raise DatasetError(f"{path} holds no edges")
    size = n if n is not None else 1 + max(max(i, j) for _, i, j, _ in edges)
    weights = np.zeros((size, size), dtype=np.float64)
    for lineno, i, j, w in edges:
        if i >= size or j >= size:
            raise DatasetError(f"line {lineno}: node index outside 0..{size - 1}")
        if weights[i, j] != 0.0:
            raise DatasetError(f"line {lineno}: edge ({i}, {j}) listed twice")
        weights[i, j] = weights[j, i] = w
    return ExplicitGraph(weights=weights)


def write_edge_list(graph, path):
    rows, cols = np.nonzero(np.triu(graph.weights, k=1))
    with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
        for i, j in zip(rows, cols):
            handle.write(f"{i} {j} {_format_weight(graph.weights[i, j])}\n")


def gen_planted(params: PlantedParams) -> ExplicitGraph:
    """
    Sample a two-block planted partition graph.

    Nodes 0..n/2-1 form block 0 and n/2..n-1 block 1.  Every unordered pair is an
    edge with probability p inside a block and q across blocks.  The graph labels
    carry the block ids.
    """
    n = params.n
    rng = np.random.default_rng(params.seed)
    block = (np.arange(n) >= n // 2).astype(np.int64)
    upper_i, upper_j = np.triu_indices(n, k=1)
    probability = np.where(block[upper_i] == block[upper_j], params.p, params.q)
    present = rng.random(upper_i.size) < probability
    weights = np.zeros((n, n), dtype=np.float64)
    weights[upper_i[present], upper_j[present]] = 1.0
    weights[upper_j[present], upper_i[present]] = 1.0
    return ExplicitGraph(weights=weights, labels=block)


def gen_clique(n):
    """Unweighted clique on n nodes; n = 1 is rejected as an isolated node."""
    if n < 1:
        raise DatasetError(f"clique needs n >= 1, got {n}")
    return ExplicitGraph(weights=np.ones((n, n)) - np.eye(n))


def _line_means(k, dim, separation):
    """Means evenly spaced ``separation`` apart along the first axis, centred on the origin."""
    means = np.zeros((k, dim))
    means[:, 0] = separation * (np.arange(k) - (k - 1) / 2.0)
    return means


def _cluster_means(k, dim, separation, rng):
    if k == 1:
        return np.zeros((1, dim))
    if dim == 1:
        return _line_means(k, dim, separation)
    if k <= dim:
        # Random orthonormal frame: every pair of means sits sqrt(2) * radius apart
        frame, _ = np.linalg.qr(rng.standard_normal((dim, k)))
        return (separation / math.sqrt(2.0)) * frame.T
    best, best_gap = None, -1.0
    for _ in range(50):
        directions = rng.standard_normal((k, dim))
        directions /= np.linalg.norm(directions, axis=1)[:, None]
        chord = np.linalg.norm(directions[:, None, :] - directions[None, :, :], axis=2)
        gap = chord[np.triu_indices(k, 1)].min()
        if gap > best_gap:
            best, best_gap = directions, gap
    if best_gap <= 0:
        debug(f"no distinct sphere placement for {k} means in {dim} dimensions, using a line")
        return _line_means(k, dim, separation)
    return (separation / best_gap) * best


def gen_gmm(n, k, dim, separation, seed=const.DEFAULT_SEED):
    """
    k isotropic unit-variance Gaussian clusters, rows unit-normalized.

    Means are placed on a sphere (on a line for one-dimensional data) with
    pairwise distance at least ``separation``; cluster sizes differ by at most
    one; rows are shuffled with the same seed.

    Returns:
        VectorDataset with labels = cluster index.
    """
    if not (n >= k >= 1):
        raise DatasetError(f"need n >= k >= 1, got n={n}, k={k}")
    if dim < 1:
        raise DatasetError(f"dim must be >= 1, got {dim}")
    if not separation > 0:
        raise DatasetError(f"separation must be positive, got {separation}")
    rng = np.random.default_rng(seed)
    means = _cluster_means(k, dim, separation, rng)
    sizes = [n // k + (1 if c < n % k else 0) for c in range(k)]
    labels = np.repeat(np.arange(k), sizes)
    points = means[labels] + rng.standard_normal((n, dim))
    order = rng.permutation(n)
    return VectorDataset(points=normalize_rows(points[order]), labels=labels[order], unit_normalized=True)


def train_test_split(dataset, test_fraction, seed=const.DEFAULT_SEED) -> Tuple[VectorDataset, VectorDataset]:
    """Seeded random split; ids and labels travel with their rows."""
    if not 0.0 < test_fraction < 1.0:
        raise DatasetError(f"test fraction must lie in (0, 1), got {test_fraction}")
    if dataset.n < 2:
        raise DatasetError("need at least two points to split")
    order = np.random.default_rng(seed).permutation(dataset.n)
    n_test = min(dataset.n - 1, max(1, int(round(dataset.n * test_fraction))))
    return dataset.subset(np.sort(order[n_test:])), dataset.subset(np.sort(order[:n_test]))
