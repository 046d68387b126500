#  treeMetrics.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Hierarchy cost (aggregate and brute-force), purity and macro-averaged
# classification scores.

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support

import constants as const
from HCTree import nearest, vote
from hctErrors import DatasetError, ModeError, SimilarityError
from SimilarityView import SimilarityView


@dataclass
class CostReport:
    """
    Hierarchy cost of a tree.

    ``per_node`` holds (preorder index, leaf_count, child_cut) for every internal
    node, and for every leaf holding more than one point (child_cut is then the
    similarity among the leaf's own points).
    """
    total_cost: float
    per_node: List[Tuple[int, int, float]] = field(default_factory=list)
    mode: str = "implicit"
    clamped_pair_warning_count: int = 0

    def to_dict(self):
        return {"total_cost": self.total_cost, "mode": self.mode,
                "clamped_pair_warning_count": self.clamped_pair_warning_count,
                "internal_nodes": len(self.per_node)}


def _check_cover(tree, view):
    if tree.n != view.m:
        raise ModeError(f"tree covers {tree.n} points but the similarity view has {view.m}")


def cost(tree, view):
    """
    Sum over internal nodes of leaf_count(node) x cut(left subtree, right subtree).

    Implicit mode keeps one aggregate row sum per node, so each cut is a single
    dot product; explicit mode sums the cross block of the weight matrix.
    """
    _check_cover(tree, view)
    clamps_before = view.counter.count
    per_node = []
    total = 0.0
    if view.is_implicit:
        rows = view.rows
        sums = [None] * len(tree.nodes)
        # Reverse preorder visits children before their parent
        for i in range(len(tree.nodes) - 1, -1, -1):
            node = tree.nodes[i]
            if node.is_leaf:
                block = rows[node.point_ids]
                sums[i] = block.sum(axis=0)
                if node.leaf_count > 1:
                    inside = 0.5 * (sums[i] @ sums[i] - np.einsum("ij,ij->", block, block))
                    per_node.append((i, node.leaf_count, view.counter.clamp(inside, "cut")))
                continue
            left, right = tree.index_of(node.left), tree.index_of(node.right)
            sums[i] = sums[left] + sums[right]
            per_node.append((i, node.leaf_count, view.counter.clamp(sums[left] @ sums[right], "cut")))
    else:
        weights = view.dense_block()
        for i, node in enumerate(tree.nodes):
            if node.is_leaf:
                if node.leaf_count > 1:
                    ids = node.point_ids
                    per_node.append((i, node.leaf_count, float(weights[np.ix_(ids, ids)].sum()) / 2.0))
                continue
            left, right = tree.members(node.left), tree.members(node.right)
            per_node.append((i, node.leaf_count, float(weights[np.ix_(left, right)].sum())))
    for _, count, cut in per_node:
        total += count * cut
    return CostReport(total_cost=total, per_node=sorted(per_node), mode=view.mode,
                      clamped_pair_warning_count=view.counter.count - clamps_before)


def _ancestor_paths(tree):
    """Row i lists the preorder indices from the root to point i's leaf, padded with -1-i."""
    width = tree.depth() + 1
    paths = -1 - np.repeat(np.arange(tree.n)[:, None], width, axis=1)
    stack = [(tree.root, [])]
    while stack:
        node, trail = stack.pop()
        trail = trail + [tree.index_of(node)]
        if node.is_leaf:
            paths[node.point_ids, :len(trail)] = trail
        else:
            stack += [(node.left, trail), (node.right, trail)]
    return paths


def brute_force_cost(tree, oracle):
    """
    The cost evaluated pair by pair: for every unordered pair {i, j}, C_ij times
    the leaf count of their lowest common ancestor.

    Args:
        tree: HCTree with n <= 2000 points.
        oracle: SimilarityView, or an n x n similarity matrix.
    """
    if tree.n > const.BRUTE_FORCE_MAX_N:
        raise SimilarityError(f"brute-force cost is limited to n <= {const.BRUTE_FORCE_MAX_N}, got {tree.n}")
    if isinstance(oracle, SimilarityView):
        _check_cover(tree, oracle)
        similarity = oracle.dense_block()
    else:
        similarity = np.asarray(oracle, dtype=np.float64)
        if similarity.shape != (tree.n, tree.n):
            raise ModeError(f"similarity matrix has shape {similarity.shape}, expected ({tree.n}, {tree.n})")
    paths = _ancestor_paths(tree)
    counts = np.array([node.leaf_count for node in tree.nodes], dtype=np.float64)
    total = 0.0
    for i in range(tree.n - 1):
        shared = np.cumprod(paths[i + 1:] == paths[i], axis=1).sum(axis=1)
        lca = paths[i, shared - 1]
        total += float(similarity[i, i + 1:] @ counts[lca])
    return total


def purity(assignment, labels):
    """Mean over clusters of the share held by the cluster's most common label."""
    assignment = np.asarray(assignment)
    labels = np.asarray(labels)
    if assignment.size == 0:
        raise DatasetError("purity of an empty cluster set")
    if assignment.shape != labels.shape:
        raise DatasetError(f"{assignment.size} assignments for {labels.size} labels")
    clusters, cluster_of = np.unique(assignment, return_inverse=True)
    classes, class_of = np.unique(labels, return_inverse=True)
    table = np.zeros((clusters.size, classes.size), dtype=np.int64)
    np.add.at(table, (cluster_of, class_of), 1)
    return float(np.mean(table.max(axis=1) / table.sum(axis=1)))


def leaf_purity(tree, labels):
    return purity(tree.leaf_assignment(), labels)


@dataclass
class ClassReport:
    """Per-class and macro-averaged precision, recall and F1 over the classes present in the truth."""
    classes: np.ndarray
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    macro_p: float
    macro_r: float
    macro_f1: float
    confusion: np.ndarray

    def to_dict(self):
        return {
            "macro_p": self.macro_p,
            "macro_r": self.macro_r,
            "macro_f1": self.macro_f1,
            "per_class": {int(c): {"precision": float(p), "recall": float(r), "f1": float(f)}
                          for c, p, r, f in zip(self.classes, self.precision, self.recall, self.f1)},
        }


def classification_report(predicted, truth):
    predicted = np.asarray(predicted, dtype=np.int64)
    truth = np.asarray(truth, dtype=np.int64)
    if predicted.shape != truth.shape:
        raise DatasetError(f"{predicted.size} predictions for {truth.size} true labels")
    if truth.size == 0:
        raise DatasetError("classification report needs at least one labelled point")
    classes = np.unique(truth)
    precision, recall, f1, _ = precision_recall_fscore_support(
        truth, predicted, labels=classes, average=None, zero_division=0)
    return ClassReport(classes=classes, precision=precision, recall=recall, f1=f1,
                       macro_p=float(precision.mean()), macro_r=float(recall.mean()),
                       macro_f1=float(f1.mean()),
                       confusion=confusion_matrix(truth, predicted, labels=np.union1d(classes, predicted)))


def exact_knn_classify(dataset, queries, k=const.DEFAULT_KNN):
    """Brute-force kNN majority vote over the whole training set (the exact-mode ceiling)."""
    everyone = np.arange(dataset.n)
    queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
    predicted = np.empty(queries.shape[0], dtype=np.int64)
    for q, x in enumerate(queries):
        ids, distances = nearest(dataset.points, everyone, x, k)
        predicted[q] = vote(dataset.labels[ids], distances)
    return predicted
