#  spectralTools.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Eigenvector machinery for the spectral splitting rules: seeded power iteration
# with deflation, a cyclic Jacobi eigensolver for the exact rule, and the sweep
# cut that turns a vector into a low-conductance bipartition.

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

import constants as const
from debug_utils import debug
from hctErrors import EigenSolverError, ModeError, SimilarityError, SweepError


@dataclass(frozen=True)
class PowerConfig:
    """
    Power iteration settings.

    ``iteration_count`` overrides the default of ceil(c * ln(m) / epsilon) rounds
    (at least one), m being the number of active points.
    """
    epsilon: float = const.DEFAULT_EPSILON
    power_constant: float = const.DEFAULT_POWER_CONSTANT
    iteration_count: Optional[int] = None
    seed: int = const.DEFAULT_SEED

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")
        if not self.power_constant > 0:
            raise ValueError(f"power constant must be positive, got {self.power_constant}")
        if self.iteration_count is not None and self.iteration_count < 1:
            raise ValueError(f"iteration count must be >= 1, got {self.iteration_count}")

    def iterations(self, m):
        if self.iteration_count is not None:
            return self.iteration_count
        return max(1, math.ceil(self.power_constant * math.log(max(m, 1)) / self.epsilon))

    def with_seed(self, seed):
        return PowerConfig(self.epsilon, self.power_constant, self.iteration_count, seed)


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Best prefix of a sweep over sorted coordinates.

    ``left_ids`` are local positions, the first ``best_index`` entries of ``order``.
    ``threshold`` is the coordinate of the last point on the left.  ``fallback``
    marks a split taken outside the band: the separating prefix nearest to it,
    or the median when every coordinate is equal.
    """
    coordinates: np.ndarray
    order: np.ndarray
    best_index: int
    best_conductance: float
    left_ids: np.ndarray
    threshold: float
    fallback: bool = False


def _canonical_sign(vector):
    """Flip so the largest-magnitude component is positive."""
    if vector.size and vector[int(np.argmax(np.abs(vector)))] < 0:
        return -vector
    return vector


def _start_vector(dim, seed, stream):
    rng = np.random.default_rng([seed, stream])
    vector = rng.standard_normal(dim)
    norm = np.linalg.norm(vector)
    if norm == 0:
        vector = np.zeros(dim)
        vector[0] = 1.0
        return vector
    return vector / norm


def _power_step(view):
    if view.is_implicit:
        return view.apply_normalized
    # Lazy walk (I + N) / 2: same eigenvectors, spectrum moved into [0, 1] so the
    # eigenvalue -1 of a bipartite block cannot stall the iteration
    return lambda v: 0.5 * (v + view.apply_normalized(v))


def _operator_dim(view):
    dim = view.operator_dim()
    if dim < 1:
        raise SimilarityError("power iteration needs an operator dimension >= 1")
    return dim


def top_eigenvector(view, config: PowerConfig):
    """
    Leading eigenvector of the normalized operator by power iteration.

    Implicit mode iterates v <- A~^T (A~ v) in feature space; explicit mode iterates
    on D^-1/2 W D^-1/2.  The result is unit length with its largest component positive.
    """
    dim = _operator_dim(view)
    step = _power_step(view)
    vector = _start_vector(dim, config.seed, 0)
    for _ in range(config.iterations(view.m)):
        nxt = step(vector)
        norm = np.linalg.norm(nxt)
        if norm == 0:
            break
        vector = nxt / norm
    return _canonical_sign(vector)


def second_eigenvector_deflated(view, first, config: PowerConfig):
    """
    Second eigenvector by power iteration with (I - v v^T) applied every round.

    Returns the zero vector when the deflated space is empty (dimension 1).
    """
    first = np.asarray(first, dtype=np.float64)
    dim = _operator_dim(view)
    if first.shape != (dim,):
        raise ModeError(f"first eigenvector has shape {first.shape}, expected ({dim},)")
    if abs(np.linalg.norm(first) - 1.0) > 1e-6:
        raise SimilarityError("the vector to deflate must be unit length")
    step = _power_step(view)

    def deflate(vector):
        vector = vector - (vector @ first) * first
        norm = np.linalg.norm(vector)
        return vector / norm if norm > const.DEGREE_FLOOR else None

    vector = deflate(_start_vector(dim, config.seed, 1))
    if vector is None:
        return np.zeros(dim)
    for _ in range(config.iterations(view.m)):
        nxt = deflate(step(vector))
        if nxt is None:
            break
        vector = nxt
    vector = deflate(vector)
    return np.zeros(dim) if vector is None else _canonical_sign(vector)


def _round_robin(n):
    """Circle-method schedule: n-1 rounds (n even) of disjoint index pairs covering every pair once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    size = len(players)
    rounds = []
    for _ in range(size - 1):
        pairs = []
        for i in range(size // 2):
            p, q = players[i], players[size - 1 - i]
            if p >= 0 and q >= 0:
                pairs.append((min(p, q), max(p, q)))
        rounds.append((np.array([p for p, _ in pairs]), np.array([q for _, q in pairs])))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def jacobi_eigh(matrix, tol=const.JACOBI_TOL, max_sweeps=const.JACOBI_MAX_SWEEPS):
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin rounds of
    disjoint pairs so a whole round is applied as one block of rotations.

    Args:
        matrix: square symmetric array.
        tol: stop once the off-diagonal Frobenius norm is below tol * max(1, ||A||_F).
        max_sweeps: sweep cap.

    Returns:
        (eigenvalues, eigenvectors) in diagonal order, eigenvectors as columns.

    Raises:
        EigenSolverError: no convergence within ``max_sweeps``.
    """
    a = np.array(matrix, dtype=np.float64, copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ModeError(f"jacobi_eigh needs a square matrix, got shape {a.shape}")
    if not np.isfinite(a).all():
        raise EigenSolverError("matrix has non-finite entries")
    a = 0.5 * (a + a.T)
    n = a.shape[0]
    vectors = np.eye(n)
    if n == 1:
        return a.diagonal().copy(), vectors

    limit = tol * max(1.0, float(np.linalg.norm(a)))
    schedule = _round_robin(n)
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(a - np.diag(a.diagonal()))
        if off < limit:
            debug(f"jacobi converged after {sweep} sweeps (n={n})")
            return a.diagonal().copy(), vectors
        if sweep == max_sweeps:
            break
        for p, q in schedule:
            apq = a[p, q]
            live = apq != 0.0
            if not live.any():
                continue
            safe = np.where(live, apq, 1.0)
            theta = (a[q, q] - a[p, p]) / (2.0 * safe)
            t = np.where(theta >= 0, 1.0, -1.0) / (np.abs(theta) + np.hypot(theta, 1.0))
            t = np.where(live, t, 0.0)
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            # A <- J^T A J with J_pp = J_qq = c, J_pq = s, J_qp = -s
            row_p, row_q = a[p, :].copy(), a[q, :].copy()
            a[p, :] = c[:, None] * row_p - s[:, None] * row_q
            a[q, :] = s[:, None] * row_p + c[:, None] * row_q
            col_p, col_q = a[:, p].copy(), a[:, q].copy()
            a[:, p] = col_p * c[None, :] - col_q * s[None, :]
            a[:, q] = col_p * s[None, :] + col_q * c[None, :]
            vec_p, vec_q = vectors[:, p].copy(), vectors[:, q].copy()
            vectors[:, p] = vec_p * c[None, :] - vec_q * s[None, :]
            vectors[:, q] = vec_p * s[None, :] + vec_q * c[None, :]
        a = 0.5 * (a + a.T)
    raise EigenSolverError(f"Jacobi eigensolver did not converge in {max_sweeps} sweeps "
                           f"(off-diagonal norm {off!r})")


def exact_second_right_singular(view):
    """
    Eigenvector of the second-largest eigenvalue of F = A^T D^-1 A (d x d),
    i.e. the second right singular vector of D^-1/2 A, computed with jacobi_eigh.
    Equal eigenvalues keep their diagonal order.
    """
    if not view.is_implicit:
        raise ModeError("the exact eigenvector rule needs vector data")
    if view.m < 2 or view.d < 2:
        raise SimilarityError(f"exact eigenvector needs m >= 2 and d >= 2, got m={view.m}, d={view.d}")
    values, vectors = jacobi_eigh(view.normalized_matrix())
    order = np.argsort(-values, kind="stable")
    return _canonical_sign(vectors[:, order[1]])


def rayleigh_quotient(view, vector):
    """v^T N v / v^T v for the view's normalized operator."""
    vector = np.asarray(vector, dtype=np.float64)
    denominator = vector @ vector
    if denominator == 0:
        raise SimilarityError("Rayleigh quotient of the zero vector")
    return float(vector @ view.apply_normalized(vector) / denominator)


def normalized_spectrum(view):
    """Eigenvalues of the normalized operator, descending (LAPACK oracle)."""
    return np.linalg.eigvalsh(view.normalized_matrix())[::-1]


def band_limits(m, band):
    """Smallest and largest admissible left-side size for m points."""
    lo, hi = band
    if not 0.0 <= lo < hi <= 1.0:
        raise SweepError(f"balance band must satisfy 0 <= lo < hi <= 1, got {band}")
    first = max(1, math.ceil(lo * m - 1e-9))
    last = min(m - 1, math.floor(hi * m + 1e-9))
    if first > last:
        first = last = min(max(1, m // 2), m - 1)
    return first, last


def nearest_separating_prefix(ordered, first, last):
    """
    Prefix size j in 1..m-1 with ordered[j-1] < ordered[j] closest to first..last.

    Ties go to the most balanced j, then to the smaller.  None when every value
    in ``ordered`` (sorted ascending) is equal.
    """
    m = ordered.size
    sizes = np.arange(1, m)
    separating = sizes[ordered[sizes] > ordered[sizes - 1]]
    if separating.size == 0:
        return None
    gap = np.maximum(first - separating, 0) + np.maximum(separating - last, 0)
    return int(separating[np.lexsort((separating, np.abs(2 * separating - m), gap))][0])


def _prefix_profile(view, order):
    """Cut and both volumes for every prefix S_j, j = 1..m-1, in O(md) (implicit) or O(m^2)."""
    if view.is_implicit:
        rows = view.rows[order]
        total = view.row_sum
        prefix = np.cumsum(rows, axis=0)[:-1]
        vol_left = prefix @ total
        cut = vol_left - np.einsum("ij,ij->i", prefix, prefix)
        vol_right = total @ total - vol_left
        clamp = view.counter.clamp_array
        return clamp(cut, "cut"), clamp(vol_left, "volume"), clamp(vol_right, "volume")
    block = view.dense_block()[np.ix_(order, order)]
    row_total = np.cumsum(block.sum(axis=1))[:-1]
    inside = np.cumsum(np.tril(block, k=-1).sum(axis=1))[:-1]
    cut = row_total - 2.0 * inside
    degrees = view.degrees()[order]
    vol_left = np.cumsum(degrees)[:-1]
    vol_right = degrees.sum() - vol_left
    return cut, vol_left, vol_right


def sweep_cut(view, coordinates, balance_band=const.BALANCE_BAND):
    """
    Lowest-conductance prefix of the points sorted by coordinate.

    Prefix sizes j run over ceil(lo*m)..floor(hi*m), clipped to 1..m-1.  Prefixes
    that would split points with equal coordinates are skipped so the threshold
    always separates the two sides.  Ties in conductance go to the most balanced
    j, then to the smaller j.  When no in-band prefix separates distinct
    coordinates the separating prefix nearest to the band is taken, and only when
    every coordinate is equal does the median split j = m // 2 stand in.

    Raises:
        SweepError: every candidate prefix has a zero denominator.
    """
    coordinates = np.asarray(coordinates, dtype=np.float64)
    m = view.m
    if coordinates.shape != (m,):
        raise SweepError(f"expected {m} coordinates, got {coordinates.shape}")
    if m < 2:
        raise SweepError("a sweep needs at least two points")
    order = np.argsort(coordinates, kind="stable")
    ordered = coordinates[order]
    first, last = band_limits(m, balance_band)

    cut, vol_left, vol_right = _prefix_profile(view, order)
    denominator = np.minimum(vol_left, vol_right)
    with np.errstate(divide="ignore", invalid="ignore"):
        gamma = np.where(denominator > 0, cut / np.where(denominator > 0, denominator, 1.0), np.inf)

    sizes = np.arange(first, last + 1)
    separating = sizes[ordered[sizes] > ordered[sizes - 1]]
    if separating.size == 0:
        j = nearest_separating_prefix(ordered, first, last)
        if j is None:
            j = m // 2
            debug(f"sweep fallback to median split, all {m} coordinates equal")
        else:
            debug(f"no separating prefix inside the band, sweep takes j={j} of m={m}")
        return SweepResult(coordinates=coordinates, order=order, best_index=j,
                           best_conductance=float(gamma[j - 1]), left_ids=order[:j],
                           threshold=float(ordered[j - 1]), fallback=True)

    candidates = separating[np.isfinite(gamma[separating - 1])]
    if candidates.size == 0:
        raise SweepError("every candidate prefix has a zero-volume side")
    values = gamma[candidates - 1]
    best = values.min()
    tied = candidates[values <= best + const.TIE_TOL * max(1.0, abs(best))]
    j = int(tied[np.lexsort((tied, np.abs(2 * tied - m)))][0])
    return SweepResult(coordinates=coordinates, order=order, best_index=j,
                       best_conductance=float(gamma[j - 1]), left_ids=order[:j],
                       threshold=float(ordered[j - 1]))


def exhaustive_min_conductance(view, chunk=1 << 15):
    """
    Minimum conductance over every bipartition, by enumeration (m <= 20).

    Returns:
        (gamma, left_ids) with left_ids as local positions.
    """
    m = view.m
    if m < 2:
        raise SimilarityError("conductance needs at least two points")
    if m > const.EXHAUSTIVE_MAX_N:
        raise SimilarityError(f"exhaustive enumeration limited to m <= {const.EXHAUSTIVE_MAX_N}, got {m}")
    block = view.dense_block()
    degrees = view.degrees()
    total = degrees.sum()
    bits = 1 << np.arange(m - 1)
    best_gamma, best_mask = np.inf, None
    # The last point always stays on the right so each cut is enumerated once
    for start in range(1, 1 << (m - 1), chunk):
        codes = np.arange(start, min(start + chunk, 1 << (m - 1)))
        member = np.zeros((codes.size, m))
        member[:, :-1] = (codes[:, None] & bits[None, :]) > 0
        cut = ((member @ block) * (1.0 - member)).sum(axis=1)
        vol = member @ degrees
        denominator = np.minimum(vol, total - vol)
        with np.errstate(divide="ignore", invalid="ignore"):
            gamma = np.where(denominator > 0, cut / np.where(denominator > 0, denominator, 1.0), np.inf)
        k = int(np.argmin(gamma))
        if gamma[k] < best_gamma:
            best_gamma, best_mask = float(gamma[k]), member[k].astype(bool)
    if best_mask is None:
        raise SimilarityError("every bipartition has a zero-volume side")
    return best_gamma, np.flatnonzero(best_mask)
