#  conftest.py Copyright (c) 2026 Nikki Cooper
#
#  This program and the accompanying materials are made available under the
#  terms of the GNU Lesser General Public License, version 3.0 which is available at
#  https://www.gnu.org/licenses/gpl-3.0.html#license-text
#
# Shared fixtures: small vector datasets and graphs with known structure.

import numpy as np
import pytest

from dataSets import ExplicitGraph, VectorDataset, gen_clique, gen_gmm, normalize_rows


@pytest.fixture
def gmm_small():
    """120 unit rows in 8 dimensions, three well separated labelled clusters."""
    return gen_gmm(120, 3, 8, 12.0, seed=3)


@pytest.fixture
def positive_vectors():
    """40 unit rows with non-negative coordinates, so every dot product is >= 0."""
    rng = np.random.default_rng(11)
    return VectorDataset(points=normalize_rows(rng.random((40, 5)) + 0.05), unit_normalized=True)


@pytest.fixture
def two_triangles():
    """Two 3-cliques {0,1,2} and {3,4,5} joined by the single edge 2-3."""
    weights = np.zeros((6, 6))
    for block in ((0, 1, 2), (3, 4, 5)):
        for i in block:
            for j in block:
                if i != j:
                    weights[i, j] = 1.0
    weights[2, 3] = weights[3, 2] = 1.0
    return ExplicitGraph(weights=weights, labels=np.array([0, 0, 0, 1, 1, 1]))


@pytest.fixture
def clique4():
    return gen_clique(4)


def random_graph(n, density, rng):
    """Random weighted graph with weights in (0, 1]; a ring keeps every node connected."""
    upper = np.triu((rng.random((n, n)) < density) * rng.uniform(0.1, 1.0, (n, n)), k=1)
    ring = np.arange(n)
    upper[ring[:-1], ring[1:]] = np.maximum(upper[ring[:-1], ring[1:]], 0.5)
    return ExplicitGraph(weights=upper + upper.T)
