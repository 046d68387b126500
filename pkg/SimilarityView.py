#  SimilarityView.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# One oracle over both similarity modes.  Implicit mode works on C = X X^T through
# row aggregates and never forms C; explicit mode reads a dense weight matrix.
# All index sets passed to a view are LOCAL positions 0..m-1 of its active subset.

import threading

import numpy as np

import constants as const
from dataSets import ExplicitGraph, VectorDataset
from debug_utils import warn
from hctErrors import ModeError, SimilarityError

IMPLICIT = "implicit"
EXPLICIT = "explicit"


class ClampCounter:
    """
    Counts negative similarity aggregates that were clamped to zero.

    Real embeddings can have negative dot products, which the cut and volume
    formulas do not allow.  The first real violation prints a warning, later
    ones are only counted.  Shared by every view restricted from the same root.
    """
    def __init__(self):
        self._lock = threading.Lock()
        self._count = 0

    @property
    def count(self):
        with self._lock:
            return self._count

    def clamp(self, value, what="aggregate"):
        if value >= 0.0:
            return float(value)
        if value < -const.CLAMP_TOL:
            with self._lock:
                self._count += 1
                first = self._count == 1
            if first:
                warn(f"negative similarity {what} {value!r} clamped to 0 "
                     f"(inputs are not non-negative; further clamps are only counted)")
        return 0.0

    def clamp_array(self, values, what="aggregate"):
        values = np.asarray(values, dtype=np.float64)
        violations = int(np.count_nonzero(values < -const.CLAMP_TOL))
        if violations:
            with self._lock:
                first = self._count == 0
                self._count += violations
            if first:
                warn(f"{violations} negative similarity {what} values clamped to 0 "
                     f"(inputs are not non-negative; further clamps are only counted)")
        return np.maximum(values, 0.0)


class SimilarityView:
    """
    A similarity oracle over an active subset of a dataset or graph.

    Attributes:
        mode (str): "implicit" or "explicit".
        source: the VectorDataset or ExplicitGraph the view reads.
        active (np.ndarray): source row indices of the m active points.
        counter (ClampCounter): clamp bookkeeping shared with restricted views.
    """
    def __init__(self, source, active=None, counter=None):
        if isinstance(source, VectorDataset):
            self.mode = IMPLICIT
        elif isinstance(source, ExplicitGraph):
            self.mode = EXPLICIT
        else:
            raise ModeError(f"cannot build a similarity view over {type(source).__name__}")
        self.source = source
        n = source.n
        active = np.arange(n) if active is None else np.array(active, dtype=np.int64)
        if active.ndim != 1 or active.size == 0:
            raise SimilarityError("a view needs a non-empty 1-d active index list")
        if active.min() < 0 or active.max() >= n:
            raise SimilarityError(f"active indices must lie in 0..{n - 1}")
        if np.unique(active).size != active.size:
            raise SimilarityError("active indices must be distinct")
        active.setflags(write=False)
        self.active = active
        self.counter = counter if counter is not None else ClampCounter()

        # Cached eagerly so concurrent readers never race on a lazy fill
        if self.mode == IMPLICIT:
            self._rows = source.points[active]
            self._row_sum = self._rows.sum(axis=0)
            self._degrees = self._rows @ self._row_sum
        else:
            self._rows = None
            self._row_sum = None
            self._degrees = source.degree[active]
        self._degrees.setflags(write=False)

    @classmethod
    def implicit(cls, dataset, active=None):
        return cls(dataset, active)

    @classmethod
    def explicit(cls, graph, active=None):
        return cls(graph, active)

    @property
    def is_implicit(self):
        return self.mode == IMPLICIT

    @property
    def m(self):
        return self.active.size

    @property
    def d(self):
        self._need_vectors("feature dimension")
        return self._rows.shape[1]

    @property
    def rows(self):
        """The m x d active feature rows (implicit mode only)."""
        self._need_vectors("feature rows")
        return self._rows

    @property
    def row_sum(self):
        """s = sum of the active rows (implicit mode only)."""
        self._need_vectors("row sums")
        return self._row_sum

    def _need_vectors(self, what):
        if self.mode != IMPLICIT:
            raise ModeError(f"{what} exist only for vector data, this view is over an explicit graph")

    def restrict(self, local):
        """A view over a sub-subset, given as local positions; the clamp counter is shared."""
        local = np.asarray(local, dtype=np.int64)
        return SimilarityView(self.source, self.active[local], counter=self.counter)

    # ---------- degrees, volumes and cuts ----------
    def degrees(self):
        """
        Implicit mode: d_i = x_i . s over the active subset, self term included.
        Explicit mode: the graph's row sums restricted to the active subset.
        """
        return self._degrees

    def internal_degrees(self):
        """Row sums of the similarity block among active points only."""
        if self.mode == IMPLICIT:
            return self._degrees
        block = self.source.weights[np.ix_(self.active, self.active)]
        return block.sum(axis=1)

    def _mask(self, left):
        left = np.asarray(left, dtype=np.int64).ravel()
        if left.size == 0:
            raise SimilarityError("the left side of a cut must be non-empty")
        if left.min() < 0 or left.max() >= self.m:
            raise SimilarityError(f"cut indices must lie in 0..{self.m - 1}")
        mask = np.zeros(self.m, dtype=bool)
        mask[left] = True
        if np.count_nonzero(mask) != left.size:
            raise SimilarityError("cut indices must be distinct")
        if mask.all():
            raise SimilarityError("the left side of a cut must be a proper subset")
        return mask

    def cut_value(self, left):
        """C(left, rest) summed over cross pairs."""
        mask = self._mask(left)
        if self.mode == IMPLICIT:
            value = self._rows[mask].sum(axis=0) @ self._rows[~mask].sum(axis=0)
            return self.counter.clamp(value, "cut")
        weights = self.source.weights
        return float(weights[np.ix_(self.active[mask], self.active[~mask])].sum())

    def volume(self, left):
        """d(S), the degree mass of a set of local positions."""
        return self._volume(self._mask(left))

    def _volume(self, mask):
        value = self._degrees[mask].sum()
        return self.counter.clamp(value, "volume") if self.mode == IMPLICIT else float(value)

    def _sides(self, left):
        mask = self._mask(left)
        return self.cut_value(left), mask

    def conductance(self, left):
        """gamma(S) = C(S, rest) / min(d(S), d(rest))."""
        cut, mask = self._sides(left)
        denominator = min(self._volume(mask), self._volume(~mask))
        if denominator <= 0.0:
            raise SimilarityError("conductance undefined: one side has zero volume")
        return cut / denominator

    def expansion(self, left):
        """phi(S) = C(S, rest) / min(|S|, |rest|)."""
        cut, mask = self._sides(left)
        size = np.count_nonzero(mask)
        return cut / min(size, self.m - size)

    # ---------- dense forms and spectral operators ----------
    def dense_block(self):
        """The m x m similarity block among active points (implicit mode includes C_ii)."""
        if self.mode == IMPLICIT:
            return self._rows @ self._rows.T
        return self.source.weights[np.ix_(self.active, self.active)].copy()

    def floored_degrees(self):
        """Degrees used by the normalized operators, floored away from zero."""
        return np.maximum(self.internal_degrees(), const.DEGREE_FLOOR)

    def operator_dim(self):
        """Length of the vectors the normalized operator acts on: d (implicit) or m (explicit)."""
        return self._rows.shape[1] if self.mode == IMPLICIT else self.m

    def normalized_rows(self):
        """A~ = D^-1/2 A, the degree-normalized active rows (implicit mode only)."""
        self._need_vectors("normalized rows")
        return self._rows / np.sqrt(self.floored_degrees())[:, None]

    def normalized_matrix(self):
        """
        Dense symmetric normalized operator.

        Implicit mode: F = A^T D^-1 A (d x d).
        Explicit mode: N = D^-1/2 W D^-1/2 (m x m) over the internal block.
        """
        root = np.sqrt(self.floored_degrees())
        if self.mode == IMPLICIT:
            scaled = self._rows / root[:, None]
            return scaled.T @ scaled
        block = self.dense_block()
        return block / root[:, None] / root[None, :]

    def apply_normalized(self, vector):
        """Matrix-free product with the normalized operator of ``normalized_matrix``."""
        vector = np.asarray(vector, dtype=np.float64)
        if self.mode == IMPLICIT:
            return self._rows.T @ ((self._rows @ vector) / self.floored_degrees())
        root = np.sqrt(self.floored_degrees())
        block = self.source.weights[np.ix_(self.active, self.active)]
        return (block @ (vector / root)) / root
