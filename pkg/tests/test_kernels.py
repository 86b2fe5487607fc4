import itertools

import numpy as np
import pytest

from slovaklab import sepkernel


def random_adjacency(n, p, seed):
    rng = np.random.default_rng(seed)
    adj = rng.random((n, n)) < p
    adj = np.triu(adj, 1)
    return adj | adj.T


def brute_force_max(adj):
    n = adj.shape[0]
    best = 0
    for r in range(n, 0, -1):
        for combo in itertools.combinations(range(n), r):
            if all(adj[a, b] for a, b in itertools.combinations(combo, 2)):
                return r
        if best:
            break
    return 0


def is_clique(adj, idx):
    return all(adj[a, b] for a, b in itertools.combinations(idx, 2))


BACKENDS = ["python"] + (["cython"] if sepkernel.BACKEND == "cython" else [])


@pytest.mark.parametrize("backend", BACKENDS)
class TestMaxSeparated:
    def test_empty_and_singleton(self, backend):
        assert sepkernel.max_separated_indices(
            np.zeros((0, 0), bool), backend=backend) == []
        assert sepkernel.max_separated_indices(
            np.zeros((1, 1), bool), backend=backend) == [0]

    def test_no_edges(self, backend):
        idx = sepkernel.max_separated_indices(np.zeros((5, 5), bool),
                                              backend=backend)
        assert len(idx) == 1

    def test_complete_graph(self, backend):
        adj = ~np.eye(7, dtype=bool)
        idx = sepkernel.max_separated_indices(adj, backend=backend)
        assert idx == list(range(7))

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_brute_force(self, backend, seed):
        n = 10 + (seed % 3) * 5  # 10, 15, 20 vertices
        adj = random_adjacency(n, 0.5, seed)
        idx = sepkernel.max_separated_indices(adj, backend=backend)
        assert is_clique(adj, idx)
        assert len(idx) == brute_force_max(adj)

    def test_greedy_is_valid_lower_bound(self, backend):
        adj = random_adjacency(40, 0.4, seed=7)
        g = sepkernel.greedy_separated_indices(adj, backend=backend)
        m = sepkernel.max_separated_indices(adj, backend=backend)
        assert is_clique(adj, g)
        assert len(g) <= len(m)

    def test_diagonal_cleared(self, backend):
        adj = np.ones((4, 4), bool)
        idx = sepkernel.max_separated_indices(adj, backend=backend)
        assert len(idx) == 4

    def test_asymmetric_rejected(self, backend):
        adj = np.zeros((3, 3), bool)
        adj[0, 1] = True
        with pytest.raises(ValueError):
            sepkernel.max_separated_indices(adj, backend=backend)


@pytest.mark.skipif(sepkernel.BACKEND != "cython",
                    reason="compiled kernel not built")
class TestBackendParity:
    @pytest.mark.parametrize("seed", range(8))
    def test_same_size_on_random_graphs(self, seed):
        adj = random_adjacency(60 + seed * 10, 0.45, seed)
        a = sepkernel.max_separated_indices(adj, backend="cython")
        b = sepkernel.max_separated_indices(adj, backend="python")
        assert len(a) == len(b)
        assert is_clique(adj, a) and is_clique(adj, b)
