#  splitRules.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# The four splitting rules (random hyperplane, exact and approximate spectral,
# 2-means) and the flat k-means baseline.  Every rule maps the active subset of
# a SimilarityView to a SplitPlan; index sets are local positions of that view.

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from sklearn.cluster import KMeans

import constants as const
from debug_utils import debug, warn
from hctErrors import DatasetError, ModeError
from spectralTools import (PowerConfig, band_limits, exact_second_right_singular, nearest_separating_prefix,
                           second_eigenvector_deflated, sweep_cut, top_eigenvector)


@dataclass(frozen=True)
class BuildConfig:
    """
    Tree build settings.

    Attributes:
        rule (str): node tag of the splitting rule (RP, EV, AEV, TwoMeans).
        balance_enforced (bool): keep every split inside the (1/3, 2/3) band.
        leaf_max (int): stop splitting at this many points.
        power (PowerConfig): power iteration settings for AEV.
        seed (int): root seed; node seeds are derived from it.
        knn_bucket (int): query bucket size B stored with the tree.
        rp_zero_threshold (bool): random hyperplanes through the origin instead of the median.
    """
    rule: str = const.RULE_AEV
    balance_enforced: bool = True
    leaf_max: int = const.DEFAULT_LEAF_MAX
    power: PowerConfig = field(default_factory=PowerConfig)
    seed: int = const.DEFAULT_SEED
    knn_bucket: int = const.DEFAULT_BUCKET
    rp_zero_threshold: bool = False

    def __post_init__(self):
        if self.rule not in RULES:
            raise ModeError(f"unknown splitting rule {self.rule!r}, expected one of {sorted(RULES)}")
        if self.leaf_max < 1:
            raise ValueError(f"leaf_max must be >= 1, got {self.leaf_max}")
        if self.knn_bucket < 1:
            raise ValueError(f"bucket size must be >= 1, got {self.knn_bucket}")

    @property
    def band(self):
        return const.BALANCE_BAND if self.balance_enforced else const.FULL_BAND

    @classmethod
    def from_flag(cls, rule_flag, **kwargs):
        """Build a config from the command line spelling of a rule (rp, ev, aev, 2means)."""
        try:
            return cls(rule=const.RULE_FLAGS[rule_flag], **kwargs)
        except KeyError:
            raise ModeError(f"unknown rule {rule_flag!r}, expected one of {sorted(const.RULE_FLAGS)}") from None

    def as_dict(self):
        return {
            "rule": self.rule,
            "balance_enforced": self.balance_enforced,
            "leaf_max": self.leaf_max,
            "epsilon": self.power.epsilon,
            "power_constant": self.power.power_constant,
            "iteration_count": self.power.iteration_count,
            "seed": self.seed,
            "knn_bucket": self.knn_bucket,
            "rp_zero_threshold": self.rp_zero_threshold,
        }

    @classmethod
    def from_dict(cls, data):
        power = PowerConfig(epsilon=data["epsilon"], power_constant=data["power_constant"],
                            iteration_count=data["iteration_count"], seed=data["seed"])
        return cls(rule=data["rule"], balance_enforced=data["balance_enforced"],
                   leaf_max=data["leaf_max"], power=power, seed=data["seed"],
                   knn_bucket=data["knn_bucket"], rp_zero_threshold=data["rp_zero_threshold"])


@dataclass(frozen=True, eq=False)
class SplitPlan:
    """
    Output of a splitting rule.

    ``direction``/``threshold`` are absent for explicit graphs.  For EV and AEV the
    projection of a point x is (direction . x) / sqrt(x . degree_vector), with the
    node's row sum frozen in ``degree_vector``; RP and TwoMeans use the raw dot product.
    """
    left_ids: np.ndarray
    right_ids: np.ndarray
    rule_tag: str
    direction: Optional[np.ndarray] = None
    threshold: Optional[float] = None
    degree_vector: Optional[np.ndarray] = None
    conductance: Optional[float] = None

    def __post_init__(self):
        left = np.sort(np.asarray(self.left_ids, dtype=np.int64))
        right = np.sort(np.asarray(self.right_ids, dtype=np.int64))
        if left.size == 0 or right.size == 0:
            raise ValueError("a split must leave both sides non-empty")
        if np.intersect1d(left, right).size:
            raise ValueError("split sides overlap")
        object.__setattr__(self, "left_ids", left)
        object.__setattr__(self, "right_ids", right)

    @property
    def has_hyperplane(self):
        return self.direction is not None


def project(points, direction, degree_vector=None):
    """
    Projection used both when building and when querying, so replaying the
    stored decisions reproduces the build-time sides bit for bit.
    """
    points = np.ascontiguousarray(np.atleast_2d(points), dtype=np.float64)
    coordinates = np.sum(points * direction, axis=1)
    if degree_vector is None:
        return coordinates
    degrees = np.maximum(np.sum(points * degree_vector, axis=1), const.DEGREE_FLOOR)
    return coordinates / np.sqrt(degrees)


def _plan(m, left, tag, **kwargs):
    left = np.asarray(left, dtype=np.int64)
    right = np.setdiff1d(np.arange(m), left)
    return SplitPlan(left_ids=left, right_ids=right, rule_tag=tag, **kwargs)


def _median_split(coordinates):
    """Left side up to the median projection; a median inside a run of ties moves to the nearest boundary."""
    order = np.argsort(coordinates, kind="stable")
    ordered = coordinates[order]
    j = math.ceil(coordinates.size / 2)
    if j < coordinates.size and ordered[j] == ordered[j - 1]:
        j = nearest_separating_prefix(ordered, j, j) or j
    return order[:j], float(ordered[j - 1])


def _nearest_band_split(coordinates, band, current):
    """
    Move a left-side size that fell outside the band to the closest in-band
    separating boundary, or the nearest separating boundary when the band has none.
    """
    m = coordinates.size
    first, last = band_limits(m, band)
    order = np.argsort(coordinates, kind="stable")
    ordered = coordinates[order]
    sizes = np.arange(first, last + 1)
    separating = sizes[ordered[sizes] > ordered[sizes - 1]]
    if separating.size == 0:
        j = nearest_separating_prefix(ordered, first, last) or m // 2
    else:
        j = int(separating[np.lexsort((separating, np.abs(separating - current)))][0])
    return order[:j], float(ordered[j - 1])


def _need_vectors(view, rule):
    if not view.is_implicit:
        raise ModeError(f"rule {rule} needs vector data, got an explicit graph")


def split_rp(view, config: BuildConfig, seed):
    """
    Random hyperplane: Gaussian direction, threshold at the median projection.

    Odd sizes put the median point on the left; equal projections keep index order.
    """
    _need_vectors(view, const.RULE_RP)
    rng = np.random.default_rng(seed)
    direction = rng.standard_normal(view.d)
    norm = np.linalg.norm(direction)
    direction = direction / norm if norm > 0 else np.eye(view.d)[0]
    coordinates = project(view.rows, direction)
    if config.rp_zero_threshold:
        left = np.flatnonzero(coordinates <= 0.0)
        if 0 < left.size < view.m:
            return _plan(view.m, left, const.RULE_RP, direction=direction, threshold=0.0)
        warn(f"zero-threshold random split would leave a side empty (m={view.m}), using the median")
    left, threshold = _median_split(coordinates)
    return _plan(view.m, left, const.RULE_RP, direction=direction, threshold=threshold)


def _spectral_plan(view, config, direction, tag):
    coordinates = project(view.rows, direction, view.row_sum)
    sweep = sweep_cut(view, coordinates, config.band)
    return _plan(view.m, sweep.left_ids, tag, direction=direction, threshold=sweep.threshold,
                 degree_vector=view.row_sum.copy(), conductance=sweep.best_conductance)


def split_ev(view, config: BuildConfig, seed=None):
    """Exact spectral rule: second right singular vector of D^-1/2 A, then a sweep cut."""
    _need_vectors(view, const.RULE_EV)
    if view.d < 2:
        debug("one-dimensional data, the spectral direction is the only axis")
        direction = np.ones(1)
    else:
        direction = exact_second_right_singular(view)
    return _spectral_plan(view, config, direction, const.RULE_EV)


def split_aev(view, config: BuildConfig, seed):
    """
    Approximate spectral rule: power iteration for the top eigenvector, deflated
    power iteration for the second, then a sweep cut.  On explicit graphs the
    sweep runs over D^-1/2 v and only the index partition is kept.
    """
    power = config.power.with_seed(seed)
    first = top_eigenvector(view, power)
    second = second_eigenvector_deflated(view, first, power)
    if view.is_implicit:
        return _spectral_plan(view, config, second, const.RULE_AEV)
    coordinates = second / np.sqrt(view.floored_degrees())
    sweep = sweep_cut(view, coordinates, config.band)
    return _plan(view.m, sweep.left_ids, const.RULE_GRAPH_SWEEP, conductance=sweep.best_conductance)


def kmeans_plusplus(points, k, rng):
    """k-means++ seeding: first center uniform, the rest by D^2 sampling, one attempt."""
    m = points.shape[0]
    centers = [points[rng.integers(m)]]
    closest = np.sum((points - centers[0]) ** 2, axis=1)
    for _ in range(1, k):
        total = closest.sum()
        index = rng.integers(m) if total <= 0 else rng.choice(m, p=closest / total)
        centers.append(points[index])
        closest = np.minimum(closest, np.sum((points - points[index]) ** 2, axis=1))
    return np.array(centers, dtype=np.float64)


def lloyd(points, centers, tol=const.LLOYD_TOL, max_rounds=const.LLOYD_MAX_ROUNDS):
    """
    Lloyd iterations until no center moves more than ``tol`` or ``max_rounds`` pass.
    An empty cluster keeps its previous center.

    Returns:
        (centers, assignment)
    """
    centers = np.array(centers, dtype=np.float64, copy=True)
    for _ in range(max_rounds):
        distance = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        assignment = np.argmin(distance, axis=1)
        moved = centers.copy()
        for c in range(centers.shape[0]):
            members = assignment == c
            if members.any():
                moved[c] = points[members].mean(axis=0)
        shift = np.linalg.norm(moved - centers, axis=1).max()
        centers = moved
        if shift < tol:
            break
    distance = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
    return centers, np.argmin(distance, axis=1)


def two_means_hyperplane(c1, c2):
    """h = 2(c1 - c2), s = |c1|^2 - |c2|^2; h.x <= s exactly when x is at least as close to c2."""
    c1 = np.asarray(c1, dtype=np.float64)
    c2 = np.asarray(c2, dtype=np.float64)
    return 2.0 * (c1 - c2), float(c1 @ c1 - c2 @ c2)


def split_2means(view, config: BuildConfig, seed):
    """
    2-means rule: k-means++ with two seeds, Lloyd to convergence, then the
    bisecting hyperplane of the two centers.  With balance on, a split outside
    the band moves its threshold to the nearest in-band boundary.
    """
    _need_vectors(view, const.RULE_TWO_MEANS)
    rows = view.rows
    m = view.m
    if np.ptp(rows, axis=0).max() == 0:
        warn(f"all {m} points are identical, splitting by index")
        return _plan(m, np.arange(math.ceil(m / 2)), const.RULE_TWO_MEANS,
                     direction=np.zeros(view.d), threshold=0.0)
    rng = np.random.default_rng(seed)
    centers, _ = lloyd(rows, kmeans_plusplus(rows, 2, rng))
    direction, threshold = two_means_hyperplane(centers[0], centers[1])
    coordinates = project(rows, direction)
    left = np.flatnonzero(coordinates <= threshold)
    first, last = band_limits(m, config.band)
    if not first <= left.size <= last:
        debug(f"2-means split {left.size}/{m} outside the band, moving the threshold")
        left, threshold = _nearest_band_split(coordinates, config.band, left.size)
    return _plan(m, left, const.RULE_TWO_MEANS, direction=direction, threshold=threshold)


RULES = {
    const.RULE_RP: split_rp,
    const.RULE_EV: split_ev,
    const.RULE_AEV: split_aev,
    const.RULE_TWO_MEANS: split_2means,
}


def split_node(view, config: BuildConfig, seed):
    """Apply the configured rule, checking it fits the view's mode."""
    if not view.is_implicit and config.rule in const.VECTOR_ONLY_RULES:
        raise ModeError(f"rule {config.rule} needs vector data; explicit graphs only support AEV")
    return RULES[config.rule](view, config, seed)


def flat_kmeans(points, k, seed=const.DEFAULT_SEED):
    """
    Flat k-means baseline (k-means++ seeding, Lloyd iterations, one run).

    Args:
        points: n x d array or a VectorDataset.

    Returns:
        (assignment, centers)
    """
    points = np.asarray(getattr(points, "points", points), dtype=np.float64)
    n = points.shape[0]
    if not 1 <= k <= n:
        raise DatasetError(f"flat k-means needs 1 <= k <= n, got k={k}, n={n}")
    model = KMeans(n_clusters=k, init="k-means++", n_init=1, algorithm="lloyd", random_state=seed)
    assignment = model.fit_predict(points)
    return assignment.astype(np.int64), model.cluster_centers_
