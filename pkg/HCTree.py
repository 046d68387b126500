#  HCTree.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
import json
import math
import os
import threading
from dataclasses import dataclass
from typing import Optional

import cachetools
import joblib
import numpy as np

import constants as const
from dataSets import VectorDataset
from debug_utils import debug
from hctErrors import ModeError, TreeFormatError, TreeVersionError
from SimilarityView import ClampCounter, SimilarityView
from splitRules import BuildConfig, project, split_node


@dataclass(frozen=True, eq=False)
class TreeNode:
    """
    One node of a cluster tree.

    Internal nodes carry both children and, for vector data, the hyperplane
    (direction, threshold, and for the spectral rules the frozen degree vector).
    Leaves carry the training row indices they hold.
    """
    leaf_count: int
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None
    direction: Optional[np.ndarray] = None
    threshold: Optional[float] = None
    degree_vector: Optional[np.ndarray] = None
    rule_tag: Optional[str] = None
    conductance: Optional[float] = None
    point_ids: Optional[np.ndarray] = None

    @property
    def is_leaf(self):
        return self.left is None

    def goes_left(self, x):
        """Replay the stored decision for one point."""
        return bool(project(x, self.direction, self.degree_vector)[0] <= self.threshold)


def _leaf(rows):
    return TreeNode(leaf_count=int(rows.size), point_ids=np.array(rows, dtype=np.int64))


def _internal(plan, left, right):
    return TreeNode(leaf_count=left.leaf_count + right.leaf_count, left=left, right=right,
                    direction=plan.direction, threshold=plan.threshold,
                    degree_vector=plan.degree_vector, rule_tag=plan.rule_tag,
                    conductance=plan.conductance)


def node_seed(root_seed, path):
    """Seed of the node reached from the root by the given left(0)/right(1) bits."""
    return int(np.random.SeedSequence(root_seed, spawn_key=tuple(path)).generate_state(1)[0])


def _split_once(data, counter, rows, path, config):
    view = SimilarityView(data, rows, counter=counter)
    plan = split_node(view, config, node_seed(config.seed, path))
    return plan, rows[plan.left_ids], rows[plan.right_ids]


def _grow(data, counter, rows, path, config):
    """Build the subtree over ``rows`` without recursion."""
    stack = [(rows, path, False)]
    plans = {}
    done = {}
    while stack:
        rows, at, expanded = stack.pop()
        if expanded:
            done[at] = _internal(plans.pop(at), done.pop(at + (0,)), done.pop(at + (1,)))
            continue
        if rows.size <= config.leaf_max:
            done[at] = _leaf(rows)
            continue
        plan, left_rows, right_rows = _split_once(data, counter, rows, at, config)
        plans[at] = plan
        stack.append((rows, at, True))
        stack.append((right_rows, at + (1,), False))
        stack.append((left_rows, at + (0,), False))
    return done[path]


def build_tree(data, config: BuildConfig, threads=1):
    """
    Top-down construction: split with the configured rule until a subset holds at
    most ``leaf_max`` points.

    With threads > 1 the top of the tree is expanded until about 2 * threads
    subtrees are open, and those are grown concurrently.  Node seeds depend only
    on the root seed and the node's path, so the result does not depend on the
    thread count.

    Args:
        data: VectorDataset or ExplicitGraph.
        config: BuildConfig.
        threads: worker threads.

    Returns:
        HCTree

    Raises:
        ModeError: a vector-only rule on an explicit graph.
    """
    counter = ClampCounter()
    root_view = SimilarityView(data, counter=counter)
    if not root_view.is_implicit and config.rule in const.VECTOR_ONLY_RULES:
        raise ModeError(f"rule {config.rule} needs vector data; explicit graphs only support AEV")

    open_subtrees = [(np.arange(data.n), ())]
    top_plans = {}
    target = 2 * threads if threads > 1 else 1
    while len(open_subtrees) < target:
        largest = max(range(len(open_subtrees)), key=lambda i: open_subtrees[i][0].size)
        rows, path = open_subtrees[largest]
        if rows.size <= config.leaf_max:
            break
        open_subtrees.pop(largest)
        plan, left_rows, right_rows = _split_once(data, counter, rows, path, config)
        top_plans[path] = plan
        open_subtrees += [(left_rows, path + (0,)), (right_rows, path + (1,))]

    if len(open_subtrees) > 1:
        grown = joblib.Parallel(n_jobs=threads, prefer="threads")(
            joblib.delayed(_grow)(data, counter, rows, path, config) for rows, path in open_subtrees)
    else:
        grown = [_grow(data, counter, rows, path, config) for rows, path in open_subtrees]
    done = {path: node for (_, path), node in zip(open_subtrees, grown)}
    for path in sorted(top_plans, key=len, reverse=True):
        done[path] = _internal(top_plans[path], done.pop(path + (0,)), done.pop(path + (1,)))

    dim = data.d if isinstance(data, VectorDataset) else None
    tree = HCTree(done[()], config=config, n=data.n, dim=dim,
                  mode="implicit" if dim is not None else "explicit")
    tree.clamp_count = counter.count
    debug(f"built {config.rule} tree: {tree.stats()}")
    return tree


class HCTree:
    """
    Immutable binary cluster tree with a preorder node table.

    Attributes:
        root (TreeNode): the root node.
        nodes (list): all nodes in preorder.
        config (BuildConfig): the settings the tree was built with.
        n (int): number of training points.
        dim (int | None): feature dimension, None for explicit graphs.
        mode (str): "implicit" (vector data, queryable) or "explicit".
    """
    def __init__(self, root, config, n, dim, mode, format_version=const.TREE_FORMAT_VERSION):
        self.root = root
        self.config = config
        self.n = n
        self.dim = dim
        self.mode = mode
        self.format_version = format_version
        self.clamp_count = 0
        self.nodes = []
        stack = [root]
        while stack:
            node = stack.pop()
            self.nodes.append(node)
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)
        self._index = {id(node): i for i, node in enumerate(self.nodes)}
        self._member_cache = cachetools.LRUCache(maxsize=const.MEMBER_CACHE_SIZE)
        self._cache_lock = threading.Lock()

    @property
    def rule(self):
        return self.config.rule

    @property
    def seed(self):
        return self.config.seed

    @property
    def queryable(self):
        return self.mode == "implicit"

    def index_of(self, node):
        return self._index[id(node)]

    def leaves(self):
        return [node for node in self.nodes if node.is_leaf]

    def internal_nodes(self):
        return [node for node in self.nodes if not node.is_leaf]

    def depth(self):
        """Edges on the longest root-to-leaf path (a single leaf has depth 0)."""
        deepest = 0
        stack = [(self.root, 0)]
        while stack:
            node, level = stack.pop()
            deepest = max(deepest, level)
            if not node.is_leaf:
                stack += [(node.left, level + 1), (node.right, level + 1)]
        return deepest

    def members(self, node):
        """Sorted training row indices under a node."""
        key = self.index_of(node)
        with self._cache_lock:
            cached = self._member_cache.get(key)
        if cached is not None:
            return cached
        parts = []
        stack = [node]
        while stack:
            current = stack.pop()
            if current.is_leaf:
                parts.append(current.point_ids)
            else:
                stack += [current.right, current.left]
        ids = np.sort(np.concatenate(parts))
        ids.setflags(write=False)
        with self._cache_lock:
            self._member_cache[key] = ids
        return ids

    def leaf_assignment(self):
        """Cluster id per training point: the preorder rank of the leaf holding it."""
        assignment = np.full(self.n, -1, dtype=np.int64)
        for rank, leaf in enumerate(self.leaves()):
            assignment[leaf.point_ids] = rank
        return assignment

    def _check_point(self, x):
        if not self.queryable:
            raise ModeError("trees built over explicit graphs store no hyperplanes and cannot be queried")
        x = np.asarray(x, dtype=np.float64).ravel()
        if x.size != self.dim:
            raise ModeError(f"query has dimension {x.size}, the tree was built on dimension {self.dim}")
        if not np.isfinite(x).all():
            raise ModeError("query point has non-finite coordinates")
        return x

    def descend(self, x, bucket):
        """
        Follow the stored hyperplanes from the root while the node is internal and
        holds at least ``bucket`` points.

        Returns:
            (stop node, number of edges descended)
        """
        if bucket < 1:
            raise ValueError(f"bucket size must be >= 1, got {bucket}")
        x = self._check_point(x)
        node = self.root
        steps = 0
        while not node.is_leaf and node.leaf_count >= bucket:
            node = node.left if node.goes_left(x) else node.right
            steps += 1
        return node, steps

    def query(self, x, bucket):
        """Candidate training rows for x: every point under the stop node."""
        node, _ = self.descend(x, bucket)
        return self.members(node)

    def stats(self):
        leaves = self.leaves()
        return {
            "rule": self.rule,
            "n": self.n,
            "internal_nodes": len(self.nodes) - len(leaves),
            "leaves": len(leaves),
            "depth": self.depth(),
            "mean_leaf_size": self.n / len(leaves),
        }

    # ---------- serialization ----------
    def to_dict(self):
        table = []
        for node in self.nodes:
            if node.is_leaf:
                table.append({"leaf_count": node.leaf_count,
                              "point_ids": [int(i) for i in node.point_ids]})
            else:
                table.append({
                    "leaf_count": node.leaf_count,
                    "left": self.index_of(node.left),
                    "right": self.index_of(node.right),
                    "direction": _float_list(node.direction),
                    "threshold": _finite_or_none(node.threshold),
                    "degree_vector": _float_list(node.degree_vector),
                    "rule_tag": node.rule_tag,
                    "conductance": _finite_or_none(node.conductance),
                })
        return {
            "header": {"format_version": self.format_version, "rule": self.rule, "dim": self.dim,
                       "n": self.n, "seed": self.seed, "mode": self.mode},
            "config": self.config.as_dict(),
            "nodes": table,
        }

    def dumps(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"), allow_nan=False)

    def save(self, path):
        serialize(self, path)

    @classmethod
    def load(cls, path):
        return deserialize(path)


def _finite_or_none(value):
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _float_list(vector):
    return None if vector is None else [float(v) for v in vector]


def serialize(tree, path):
    """Write the tree as JSON; floats keep their shortest exact representation."""
    with open(os.path.expanduser(path), "w", encoding="utf-8") as handle:
        handle.write(tree.dumps())
        handle.write("\n")


def _require(mapping, key, kind, where):
    if not isinstance(mapping, dict) or key not in mapping:
        raise TreeFormatError(f"corrupt tree payload: {where} lacks {key!r}")
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise TreeFormatError(f"corrupt tree payload: {where}.{key} has type {type(value).__name__}")
    return value


def _id_array(values, where):
    if not all(isinstance(value, int) and not isinstance(value, bool) for value in values):
        raise TreeFormatError(f"corrupt tree payload: {where} has non-integer point ids")
    return np.array(values, dtype=np.int64)


def _array(values, where):
    if values is None:
        return None
    try:
        array = np.array(values, dtype=np.float64)
    except (TypeError, ValueError):
        raise TreeFormatError(f"corrupt tree payload: {where} is not a numeric list") from None
    if array.ndim != 1:
        raise TreeFormatError(f"corrupt tree payload: {where} is not a flat list")
    return array


def loads(text):
    """Decode a tree from its JSON text."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as err:
        raise TreeFormatError(f"corrupt tree payload: {err}") from None
    header = _require(payload, "header", dict, "file")
    version = _require(header, "format_version", int, "header")
    if version != const.TREE_FORMAT_VERSION:
        raise TreeVersionError(f"tree format version {version} is not supported "
                               f"(this build reads version {const.TREE_FORMAT_VERSION})")
    n = _require(header, "n", int, "header")
    dim = header.get("dim")
    mode = _require(header, "mode", str, "header")
    try:
        config = BuildConfig.from_dict(_require(payload, "config", dict, "file"))
    except (KeyError, TypeError, ValueError) as err:
        raise TreeFormatError(f"corrupt tree payload: bad config ({err})") from None
    table = _require(payload, "nodes", list, "file")
    if not table:
        raise TreeFormatError("corrupt tree payload: no nodes")

    built = [None] * len(table)
    seen = np.zeros(n, dtype=np.int64)
    # Children follow their parent in preorder, so build from the back
    for i in range(len(table) - 1, -1, -1):
        entry = table[i]
        where = f"node {i}"
        leaf_count = _require(entry, "leaf_count", int, where)
        if "point_ids" in entry:
            ids = _id_array(_require(entry, "point_ids", list, where), where)
            if ids.size != leaf_count or ids.size == 0 or ids.min() < 0 or ids.max() >= n:
                raise TreeFormatError(f"corrupt tree payload: {where} has bad point ids")
            seen[ids] += 1
            built[i] = TreeNode(leaf_count=leaf_count, point_ids=ids)
            continue
        left = _require(entry, "left", int, where)
        right = _require(entry, "right", int, where)
        if not (i < left < len(table) and i < right < len(table)) or built[left] is None or built[right] is None:
            raise TreeFormatError(f"corrupt tree payload: {where} has bad child links")
        if leaf_count != built[left].leaf_count + built[right].leaf_count:
            raise TreeFormatError(f"corrupt tree payload: {where} leaf count does not add up")
        threshold = entry.get("threshold")
        conductance = entry.get("conductance")
        built[i] = TreeNode(leaf_count=leaf_count, left=built[left], right=built[right],
                            direction=_array(entry.get("direction"), f"{where}.direction"),
                            threshold=None if threshold is None else float(threshold),
                            degree_vector=_array(entry.get("degree_vector"), f"{where}.degree_vector"),
                            rule_tag=entry.get("rule_tag"),
                            conductance=math.nan if conductance is None else float(conductance))
        built[left] = built[right] = None
    if not np.all(seen == 1):
        raise TreeFormatError("corrupt tree payload: leaves do not cover every point exactly once")
    tree = HCTree(built[0], config=config, n=n, dim=dim, mode=mode, format_version=version)
    if len(tree.nodes) != len(table):
        raise TreeFormatError("corrupt tree payload: unreachable nodes")
    return tree


def deserialize(path):
    with open(os.path.expanduser(path), encoding="utf-8") as handle:
        return loads(handle.read())


# ---------- kNN classification ----------
def point_distances(points, x):
    """Euclidean distance from x to every row, evaluated row by row the same way for any subset."""
    difference = np.ascontiguousarray(points, dtype=np.float64) - x
    return np.sqrt(np.sum(difference * difference, axis=1))


def nearest(points, candidates, x, k):
    """
    The k nearest candidates to x, closest first; equal distances keep the smaller id first.

    Returns:
        (ids, distances)
    """
    candidates = np.asarray(candidates, dtype=np.int64)
    distances = point_distances(points[candidates], x)
    order = np.lexsort((candidates, distances))[:k]
    return candidates[order], distances[order]


def vote(labels, distances):
    """Majority label; ties go to the smaller summed distance, then the smaller label."""
    classes, counts = np.unique(labels, return_counts=True)
    summed = np.array([distances[labels == c].sum() for c in classes])
    best = np.lexsort((classes, summed, -counts))[0]
    return int(classes[best])


@dataclass(frozen=True)
class Neighbourhood:
    """Result of one tree-backed kNN lookup."""
    predicted: int
    neighbour_ids: np.ndarray
    distances: np.ndarray
    candidate_count: int
    steps: int


def knn_lookup(tree, dataset, x, k, bucket):
    """Descend, search the candidate set exhaustively and vote."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not dataset.has_labels:
        raise ModeError("classification needs training labels")
    if dataset.n != tree.n:
        raise ModeError(f"tree was built on {tree.n} points, the dataset has {dataset.n}")
    node, steps = tree.descend(x, bucket)
    candidates = tree.members(node)
    assert candidates.size > 0, "stop node without points"
    ids, distances = nearest(dataset.points, candidates, np.asarray(x, dtype=np.float64).ravel(), k)
    return Neighbourhood(predicted=vote(dataset.labels[ids], distances), neighbour_ids=ids,
                         distances=distances, candidate_count=int(candidates.size), steps=steps)


def classify(tree, dataset, x, k=const.DEFAULT_KNN, bucket=const.DEFAULT_BUCKET):
    """Predicted class of x by majority vote among its k nearest candidates."""
    return knn_lookup(tree, dataset, x, k, bucket).predicted
