import json
import math

import numpy as np
import pytest

from cmdLineHelp import help as cli_help
from dataSets import VectorDataset, load_csv, load_labels, normalize_rows, write_csv
from HCTree import HCTree, build_tree, deserialize
from pyhct import main
from spectralTools import PowerConfig
from splitRules import BuildConfig


@pytest.fixture
def no_config(tmp_path):
    return ["--config", str(tmp_path / "absent.ini")]


def _report(capsys):
    return json.loads(capsys.readouterr().out)


@pytest.fixture
def gmm_files(tmp_path, no_config, capsys):
    vectors = tmp_path / "gmm.csv"
    labels = tmp_path / "gmm.labels"
    assert main(["gen", "gmm", "--n", "120", "--k", "4", "--dim", "8", "--seed", "2",
                 "--out", str(vectors), "--labels", str(labels)] + no_config) == 0
    capsys.readouterr()
    return str(vectors), str(labels)


class TestGen:
    def test_clique(self, tmp_path, no_config, capsys):
        out = tmp_path / "c4.edges"
        assert main(["gen", "clique", "--n", "4", "--out", str(out)] + no_config) == 0
        report = _report(capsys)
        assert report["generated"]["edges"] == 6
        assert len(out.read_text().splitlines()) == 6
        assert "c4.edges" in report["manifest"]["input_digests"]

    def test_planted_is_reproducible(self, tmp_path, no_config, capsys):
        out = tmp_path / "p.edges"
        argv = ["gen", "planted", "--n", "40", "--p", "0.5", "--q", "0.05", "--seed", "9", "--out", str(out)]
        assert main(argv + no_config) == 0
        first_key = _report(capsys)["manifest"]["run_key"]
        first = out.read_text()
        assert main(argv + no_config) == 0
        assert _report(capsys)["manifest"]["run_key"] == first_key
        assert out.read_text() == first
        assert len((tmp_path / "p.edges.labels").read_text().split()) == 40


class TestCommands:
    def test_build_writes_a_tree(self, gmm_files, tmp_path, no_config, capsys):
        vectors, labels = gmm_files
        tree_path = tmp_path / "t.json"
        assert main(["build", "--input", vectors, "--labels", labels, "--rule", "rp",
                     "--tree", str(tree_path)] + no_config) == 0
        report = _report(capsys)
        assert report["tree"]["n"] == 120
        assert report["mode"] == "implicit"
        assert deserialize(tree_path).n == 120

    def test_exported_tree_matches_a_library_build(self, gmm_files, tmp_path, no_config, capsys):
        vectors, labels = gmm_files
        tree_path = tmp_path / "export.json"
        assert main(["build", "--input", vectors, "--labels", labels, "--rule", "rp", "--leaf-max", "4",
                     "--seed", "5", "--tree", str(tree_path)] + no_config) == 0
        capsys.readouterr()
        data = load_csv(vectors, normalize=True).with_labels(load_labels(labels))
        config = BuildConfig.from_flag("rp", leaf_max=4, seed=5, power=PowerConfig(seed=5))
        expected = build_tree(data, config)
        exported = HCTree.load(tree_path)
        np.testing.assert_array_equal(exported.leaf_assignment(), expected.leaf_assignment())
        assert cli_help["tree"].count("HCTree.load") == 1

    def test_classify_exact_mode(self, gmm_files, no_config, capsys):
        vectors, labels = gmm_files
        assert main(["classify", "--input", vectors, "--labels", labels, "--bucket", "1000000000",
                     "--knn", "3", "--threads", "2"] + no_config) == 0
        report = _report(capsys)
        assert report["exact_mode"] is True
        assert report["matches_exact_knn"] is True
        assert report["mean_descent_steps"] == 0.0

    def test_classify_report_file(self, gmm_files, tmp_path, no_config, capsys):
        vectors, labels = gmm_files
        out = tmp_path / "classify.json"
        assert main(["classify", "--input", vectors, "--labels", labels, "--bucket", "8",
                     "--out", str(out)] + no_config) == 0
        report = json.loads(out.read_text())
        assert report["exact_mode"] is False
        assert report["mean_candidate_size"] < 8
        assert report["scores"]["macro_f1"] >= 0.8

    def test_cost_on_clique(self, tmp_path, no_config, capsys):
        graph = tmp_path / "c6.edges"
        main(["gen", "clique", "--n", "6", "--out", str(graph)] + no_config)
        capsys.readouterr()
        assert main(["cost", "--input", str(graph), "--brute-force"] + no_config) == 0
        report = _report(capsys)
        assert report["cost"]["total_cost"] == pytest.approx(70.0)
        assert report["brute_force"]["agree"] is True

    @pytest.mark.parametrize("rule", ["rp", "ev", "aev", "2means"])
    def test_cost_on_vectors(self, tmp_path, no_config, capsys, rule):
        rng = np.random.default_rng(4)
        path = tmp_path / "pos.csv"
        write_csv(VectorDataset(points=normalize_rows(rng.random((30, 4)) + 0.1), unit_normalized=True), path)
        assert main(["cost", "--input", str(path), "--rule", rule, "--brute-force"] + no_config) == 0
        assert _report(capsys)["brute_force"]["agree"] is True

    def test_purity(self, gmm_files, no_config, capsys):
        vectors, labels = gmm_files
        assert main(["purity", "--input", vectors, "--labels", labels, "--leaf-max", "8"] + no_config) == 0
        report = _report(capsys)
        leaves = report["tree"]["leaves"]
        assert report["kmeans_leaves"]["k"] == leaves
        assert report["kmeans_log_leaves"]["k"] == max(1, round(math.log2(leaves)))
        assert 0.0 < report["tree"]["purity"] <= 1.0
        assert report["tree"]["mean_nodes_visited"] >= 1.0

    def test_anomaly(self, gmm_files, tmp_path, no_config, capsys):
        vectors, labels = gmm_files
        out = tmp_path / "sweep.csv"
        assert main(["anomaly", "--input", vectors, "--labels", labels, "--holdout", "3",
                     "--threshold-grid", "0,1,inf", "--out", str(out)] + no_config) == 0
        report = _report(capsys)
        assert [row["tau"] for row in report["anomaly"]["sweep"]] == [0.0, 1.0, "inf"]
        assert len(out.read_text().splitlines()) == 4
        assert report["manifest"]["flags"]["threshold_grid"][2] == "inf"

    def test_cheeger_on_clique(self, tmp_path, no_config, capsys):
        graph = tmp_path / "c4.edges"
        main(["gen", "clique", "--n", "4", "--out", str(graph)] + no_config)
        capsys.readouterr()
        assert main(["cheeger", "--input", str(graph)] + no_config) == 0
        report = _report(capsys)
        assert report["method"] == "exhaustive"
        assert report["gamma"] == pytest.approx(2 / 3)
        assert report["lambda2"] == pytest.approx(-1 / 3)
        assert report["holds"] is True

    def test_cheeger_sweep_on_planted(self, tmp_path, no_config, capsys):
        graph = tmp_path / "p.edges"
        main(["gen", "planted", "--n", "40", "--p", "0.6", "--q", "0.05", "--seed", "1",
              "--out", str(graph)] + no_config)
        capsys.readouterr()
        assert main(["cheeger", "--input", str(graph)] + no_config) == 0
        assert _report(capsys)["method"] == "sweep"

    def test_missing_labels_is_an_error(self, gmm_files, no_config, capsys):
        vectors, _ = gmm_files
        assert main(["classify", "--input", vectors] + no_config) == 1
        assert "labels" in capsys.readouterr().err
