#  hctCommands.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# One function per subcommand.  Each resolves its settings (flag > ini file >
# built-in default), runs the experiment, and writes a JSON report carrying the
# run manifest.  Every command returns the process exit code.

import math
import os
import sys
import time
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
import psutil

import constants as const
from AnomalyTable import HoldoutSpec, simulate_holdout, write_sweep_csv
from Bcolors import Bcolors
from ConfigManager.ConfigManager import ConfigManager
from dataSets import (ExplicitGraph, PlantedParams, VectorDataset, gen_clique, gen_gmm, gen_planted,
                      load_csv, load_edge_list, load_labels, train_test_split, write_csv,
                      write_edge_list, write_labels)
from debug_utils import debug, note
from hctErrors import DatasetError, ModeError
from HCTree import build_tree, knn_lookup
from RunManifest import RunManifest, write_report
from SimilarityView import SimilarityView
from spectralTools import PowerConfig, exhaustive_min_conductance, sweep_cut
from splitRules import BuildConfig, flat_kmeans
from treeMetrics import (brute_force_cost, classification_report, cost, exact_knn_classify,
                         leaf_purity, purity)

bc = Bcolors()

CHEEGER_EXHAUSTIVE_MAX_N = 14
CHEEGER_TOL = 1e-9
COST_REL_TOL = 1e-6


def _pick(flag, config_value):
    return config_value if flag is None else flag


def default_threads():
    return psutil.cpu_count(logical=False) or 1


@dataclass(frozen=True)
class RunSettings:
    """Flag, ini and built-in values merged into what a command actually uses."""
    rule: str
    epsilon: float
    power_constant: float
    leaf_max: int
    balance: bool
    threads: int
    rp_zero_threshold: bool
    bucket: int
    knn: int
    test_fraction: float
    pair_cap: int
    threshold_grid: Tuple[float, ...]
    anomaly_test_fraction: float
    indent: int
    seed: int

    @classmethod
    def from_args(cls, args, config: Optional[ConfigManager] = None):
        config = config or ConfigManager(getattr(args, "config", None))
        build = config.get_section_as_dict("Build")
        query = config.get_section_as_dict("Query")
        anomaly = config.get_section_as_dict("Anomaly")
        grid = _pick(getattr(args, "threshold_grid", None), anomaly["threshold_grid"])
        threads = _pick(getattr(args, "threads", None), build["threads"])
        return cls(
            rule=_pick(getattr(args, "rule", None), build["rule"]),
            epsilon=float(_pick(getattr(args, "epsilon", None), build["epsilon"])),
            power_constant=float(build["power_constant"]),
            leaf_max=int(_pick(getattr(args, "leaf_max", None), build["leaf_max"])),
            balance=bool(build["balance"]) and not getattr(args, "no_balance", False),
            threads=int(threads) or default_threads(),
            rp_zero_threshold=bool(build["rp_zero_threshold"]),
            bucket=int(_pick(getattr(args, "bucket", None), query["bucket"])),
            knn=int(_pick(getattr(args, "knn", None), query["knn"])),
            test_fraction=float(_pick(getattr(args, "test_fraction", None), query["test_fraction"])),
            pair_cap=int(anomaly["pair_cap"]),
            threshold_grid=tuple(float(t) for t in (grid if isinstance(grid, (tuple, list)) else (grid,))),
            anomaly_test_fraction=float(_pick(getattr(args, "test_fraction", None), anomaly["test_fraction"])),
            indent=int(config.get("Report", "indent", 2)),
            seed=int(args.seed),
        )

    def build_config(self, balance=None):
        if self.rule not in const.RULE_FLAGS:
            raise ModeError(f"unknown rule {self.rule!r} in the configuration, expected one of {sorted(const.RULE_FLAGS)}")
        power = PowerConfig(epsilon=self.epsilon, power_constant=self.power_constant, seed=self.seed)
        return BuildConfig.from_flag(self.rule, balance_enforced=self.balance if balance is None else balance,
                                     leaf_max=self.leaf_max, power=power, seed=self.seed,
                                     knn_bucket=self.bucket, rp_zero_threshold=self.rp_zero_threshold)


def _manifest(args, hash_inputs=True):
    flags = {key: value for key, value in vars(args).items() if key not in ("command", "verbose")}
    manifest = RunManifest(command=args.command, flags=flags, seeds={"seed": int(args.seed)})
    for path in (getattr(args, "input", None), getattr(args, "labels", None)):
        if hash_inputs and path and os.path.isfile(os.path.expanduser(path)):
            manifest.add_input(path)
    return manifest


def _emit(report, manifest, args, settings, path=None):
    """Write the report to ``path`` (default --out) or print it."""
    target = path if path is not None else args.out
    text = write_report(report, manifest, target, indent=settings.indent)
    if target:
        note(f"report written to {target}")
    else:
        print(text)
    return text


def load_input(args):
    """
    Read --input as an explicit graph (``.edges``) or a CSV of vectors.

    Vectors are unit-normalized on load.  Labels come from --labels or
    --label-column when given.
    """
    if args.input.endswith(".edges"):
        graph = load_edge_list(args.input)
        if args.label_column is not None:
            raise DatasetError("--label-column applies to CSV input only; use --labels for graphs")
        if args.labels:
            graph = ExplicitGraph(weights=graph.weights, labels=load_labels(args.labels))
        return graph
    dataset = load_csv(args.input, label_column=args.label_column, normalize=True)
    if args.labels:
        dataset = dataset.with_labels(load_labels(args.labels))
    return dataset


def _need_labelled_vectors(data, command):
    if not isinstance(data, VectorDataset):
        raise ModeError(f"{command} needs vector data (CSV input), not an explicit graph")
    if not data.has_labels:
        raise DatasetError(f"{command} needs class labels: pass --labels or --label-column")
    return data


def _mean(values):
    return float(np.mean(values)) if len(values) else 0.0


# ---------- gen ----------
def cmd_gen(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args, hash_inputs=False)
    labels_path = args.labels or f"{args.out}.labels"
    with manifest.timed("generate"):
        if args.subtype == "planted":
            graph = gen_planted(PlantedParams(n=args.n, p=args.p, q=args.q, seed=args.seed))
            write_edge_list(graph, args.out)
            write_labels(graph.labels, labels_path)
            written = {"graph": args.out, "labels": labels_path, "n": graph.n, "edges": graph.edge_count()}
        elif args.subtype == "clique":
            graph = gen_clique(args.n)
            write_edge_list(graph, args.out)
            written = {"graph": args.out, "n": graph.n, "edges": graph.edge_count()}
        else:
            dataset = gen_gmm(args.n, args.k, args.dim, args.sep, seed=args.seed)
            write_csv(dataset, args.out, with_labels=False)
            write_labels(dataset.labels, labels_path)
            written = {"vectors": args.out, "labels": labels_path, "n": dataset.n, "d": dataset.d}
    for path in (args.out, written.get("labels")):
        if path:
            manifest.add_input(path)
    print(write_report({"generated": written}, manifest, indent=settings.indent))
    return 0


# ---------- build ----------
def cmd_build(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    data = load_input(args)
    config = settings.build_config()
    with manifest.timed("build"):
        tree = build_tree(data, config, threads=settings.threads)
    if args.tree:
        tree.save(args.tree)
        note(f"tree written to {args.tree}")
    report = {
        "tree": tree.stats(),
        "build_config": config.as_dict(),
        "mode": tree.mode,
        "clamped_pair_warning_count": tree.clamp_count,
        "threads": settings.threads,
    }
    _emit(report, manifest, args, settings)
    return 0


# ---------- classify ----------
def cmd_classify(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    dataset = _need_labelled_vectors(load_input(args), "classify")
    train, test = train_test_split(dataset, settings.test_fraction, settings.seed)
    config = settings.build_config()
    with manifest.timed("build"):
        tree = build_tree(train, config, threads=settings.threads)

    predicted = np.empty(test.n, dtype=np.int64)
    candidates = np.empty(test.n, dtype=np.int64)
    steps = np.empty(test.n, dtype=np.int64)
    with manifest.timed("query"):
        for q in range(test.n):
            found = knn_lookup(tree, train, test.points[q], settings.knn, settings.bucket)
            predicted[q], candidates[q], steps[q] = found.predicted, found.candidate_count, found.steps

    scores = classification_report(predicted, test.labels)
    exact_mode = settings.bucket > train.n
    report = {
        "rule": config.rule,
        "n_train": train.n,
        "n_test": test.n,
        "k": settings.knn,
        "bucket": settings.bucket,
        "exact_mode": exact_mode,
        "scores": scores.to_dict(),
        "build_seconds": manifest.timings["build"],
        "mean_query_seconds": manifest.timings["query"] / test.n,
        "mean_candidate_size": _mean(candidates),
        "mean_descent_steps": _mean(steps),
        "tree": tree.stats(),
    }
    status = 0
    if exact_mode:
        exact = exact_knn_classify(train, test.points, settings.knn)
        agree = bool(np.array_equal(exact, predicted))
        report["matches_exact_knn"] = agree
        if not agree:
            print(f"{bc.FAIL}exact mode disagrees with brute-force kNN on "
                  f"{int(np.count_nonzero(exact != predicted))} queries{bc.RESET}", file=sys.stderr)
            status = 1
    _emit(report, manifest, args, settings)
    return status


# ---------- cost ----------
def cmd_cost(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    data = load_input(args)
    config = settings.build_config(balance=False)
    with manifest.timed("build"):
        tree = build_tree(data, config, threads=settings.threads)
    view = SimilarityView(data)
    with manifest.timed("cost"):
        fast = cost(tree, view)
    report = {"rule": config.rule, "n": data.n, "cost": fast.to_dict(), "tree": tree.stats()}
    status = 0
    if args.brute_force:
        with manifest.timed("brute_force"):
            slow = brute_force_cost(tree, view)
        relative = abs(fast.total_cost - slow) / max(abs(slow), 1e-300)
        agree = relative < COST_REL_TOL
        report["brute_force"] = {"total_cost": slow, "relative_difference": relative, "agree": agree}
        verdict = f"{bc.PASS}PASS" if agree else f"{bc.FAIL}FAIL"
        print(f"{bc.METRIC}cost{bc.RESET} fast {bc.VALUE}{fast.total_cost!r}{bc.RESET} "
              f"brute-force {bc.VALUE}{slow!r}{bc.RESET} {verdict}{bc.RESET}", file=sys.stderr)
        status = 0 if agree else 1
    _emit(report, manifest, args, settings)
    return status


# ---------- purity ----------
def _assign_seconds(points, centers):
    start = time.perf_counter()
    for x in points:
        int(np.argmin(((centers - x) ** 2).sum(axis=1)))
    return (time.perf_counter() - start) / points.shape[0]


def cmd_purity(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    dataset = _need_labelled_vectors(load_input(args), "purity")
    config = settings.build_config()
    with manifest.timed("build"):
        tree = build_tree(dataset, config, threads=settings.threads)

    visited = np.empty(dataset.n, dtype=np.int64)
    with manifest.timed("descent"):
        for row in range(dataset.n):
            _, steps = tree.descend(dataset.points[row], 1)
            visited[row] = steps + 1
    leaves = len(tree.leaves())
    report = {
        "rule": config.rule,
        "n": dataset.n,
        "tree": {
            "leaves": leaves,
            "purity": leaf_purity(tree, dataset.labels),
            "mean_nodes_visited": _mean(visited),
            "mean_query_seconds": manifest.timings["descent"] / dataset.n,
            "build_seconds": manifest.timings["build"],
        },
    }
    # Baselines: similar lookup time (log2 of the leaf count) and similar granularity (one cluster per leaf)
    for name, k in (("kmeans_log_leaves", max(1, round(math.log2(leaves)))), ("kmeans_leaves", leaves)):
        with manifest.timed(name):
            assignment, centers = flat_kmeans(dataset, k, settings.seed)
        report[name] = {
            "k": k,
            "purity": purity(assignment, dataset.labels),
            "mean_query_seconds": _assign_seconds(dataset.points, centers),
            "build_seconds": manifest.timings[name],
        }
    debug(f"purity tree={report['tree']['purity']!r} k1={report['kmeans_log_leaves']['purity']!r}")
    _emit(report, manifest, args, settings)
    return 0


# ---------- anomaly ----------
def cmd_anomaly(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    dataset = _need_labelled_vectors(load_input(args), "anomaly")
    spec = HoldoutSpec(held_out=tuple(args.holdout), superclasses=args.superclasses,
                       threshold_grid=settings.threshold_grid, test_fraction=settings.anomaly_test_fraction)
    with manifest.timed("holdout"):
        sweep = simulate_holdout(dataset, spec, settings.build_config(), k=settings.knn,
                                 bucket=settings.bucket, threads=settings.threads, pair_cap=settings.pair_cap)
    if args.out:
        write_sweep_csv(sweep, args.out)
        note(f"sweep written to {args.out}")
    print(write_report({"anomaly": sweep.to_dict()}, manifest, indent=settings.indent))
    return 0


# ---------- cheeger ----------
def cmd_cheeger(args):
    settings = RunSettings.from_args(args)
    manifest = _manifest(args)
    graph = load_input(args)
    if not isinstance(graph, ExplicitGraph):
        raise ModeError("cheeger needs an explicit graph (.edges edge list)")
    view = SimilarityView.explicit(graph)
    with manifest.timed("spectrum"):
        values, vectors = np.linalg.eigh(view.normalized_matrix())
    lambda2 = float(values[-2])
    with manifest.timed("conductance"):
        if graph.n <= CHEEGER_EXHAUSTIVE_MAX_N:
            method = "exhaustive"
            gamma, _ = exhaustive_min_conductance(view)
        else:
            method = "sweep"
            coordinates = vectors[:, -2] / np.sqrt(view.floored_degrees())
            gamma = sweep_cut(view, coordinates, const.FULL_BAND).best_conductance
    lower = (1.0 - lambda2) / 2.0
    upper = math.sqrt(max(0.0, 2.0 * (1.0 - lambda2)))
    # A sweep only bounds gamma(G) from above, so the lower side is checked on the sweep value too
    holds = lower - CHEEGER_TOL <= gamma <= upper + CHEEGER_TOL
    print(f"{bc.METRIC}lambda2{bc.RESET} {bc.VALUE}{lambda2!r}{bc.RESET}  "
          f"{bc.METRIC}gamma{bc.RESET} {bc.VALUE}{float(gamma)!r}{bc.RESET} ({method})  "
          f"{bc.PASS + 'PASS' if holds else bc.FAIL + 'FAIL'}{bc.RESET}", file=sys.stderr)
    report = {"n": graph.n, "edges": graph.edge_count(), "lambda2": lambda2, "gamma": float(gamma),
              "method": method, "lower_bound": lower, "upper_bound": upper, "holds": holds}
    _emit(report, manifest, args, settings)
    return 0 if holds else 1


COMMANDS = {
    "gen": cmd_gen,
    "build": cmd_build,
    "classify": cmd_classify,
    "cost": cmd_cost,
    "purity": cmd_purity,
    "anomaly": cmd_anomaly,
    "cheeger": cmd_cheeger,
}


def run(args):
    return COMMANDS[args.command](args)
