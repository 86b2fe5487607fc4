"""Backend selection for the separated-set search.

Prefers the compiled Cython kernel (``_sepcy``); falls back to the pure
Python implementation (``_seppy``) with the identical algorithm.  Both take
a boolean "separated" adjacency matrix and return vertex indices.
"""

from __future__ import annotations

import numpy as np

from . import _seppy

try:  # pragma: no cover - depends on the build environment
    from . import _sepcy

    BACKEND = "cython"
except ImportError:  # pragma: no cover
    _sepcy = None
    BACKEND = "python"


def _check(adj: np.ndarray) -> np.ndarray:
    adj = np.asarray(adj, dtype=bool)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValueError("adjacency must be square")
    if adj.diagonal().any():
        adj = adj.copy()
        np.fill_diagonal(adj, False)
    if not np.array_equal(adj, adj.T):
        raise ValueError("adjacency must be symmetric")
    return adj


def _pack_words(adj: np.ndarray) -> np.ndarray:
    n = adj.shape[0]
    packed = np.packbits(adj, axis=1, bitorder="little")
    pad = (-packed.shape[1]) % 8
    if pad:
        packed = np.pad(packed, ((0, 0), (0, pad)))
    return packed.view(np.uint64)


def _pack_ints(adj: np.ndarray) -> list:
    packed = np.packbits(adj, axis=1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


def max_separated_indices(adj: np.ndarray, backend: str | None = None) -> list:
    """Exact maximum separated subset (maximum clique) of the adjacency."""
    adj = _check(adj)
    n = adj.shape[0]
    use = backend or BACKEND
    if use == "cython" and _sepcy is not None:
        return _sepcy.max_clique(_pack_words(adj), n)
    return _seppy.max_clique(_pack_ints(adj), n)


def greedy_separated_indices(adj: np.ndarray, backend: str | None = None) -> list:
    """Greedy maximal separated subset: a certified lower bound."""
    adj = _check(adj)
    n = adj.shape[0]
    use = backend or BACKEND
    if use == "cython" and _sepcy is not None:
        return _sepcy.greedy_clique_py(_pack_words(adj), n)
    return _seppy.greedy_clique(_pack_ints(adj), n)
