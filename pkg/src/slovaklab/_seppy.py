"""Pure-Python maximum separated-set search (bitset branch and bound).

A maximum (n,eps)-separated subset is a maximum clique in the graph whose
edges join pairs at rho_n distance > eps.  This module is the fallback for
the compiled kernel in ``_sepcy``; both implement the same algorithm:
greedy clique + greedy colouring for the bound, Tomita-style expansion.

Vertex sets are Python ints used as bitsets, adjacency rows likewise.
"""

from __future__ import annotations

import sys


def _greedy_clique(neigh, full):
    clique = []
    p = full
    while p:
        v = (p & -p).bit_length() - 1
        clique.append(v)
        p &= neigh[v]
    return clique


def _color_sort(neigh, p):
    """Greedy colouring of the candidate set; returns vertices ordered by
    colour (ascending) with their colour numbers."""
    order, colors = [], []
    color = 0
    uncolored = p
    while uncolored:
        color += 1
        q = uncolored
        while q:
            v = (q & -q).bit_length() - 1
            bit = 1 << v
            q &= ~neigh[v]
            q &= ~bit
            uncolored &= ~bit
            order.append(v)
            colors.append(color)
    return order, colors


def max_clique(neigh: list, n: int) -> list:
    """Indices of a maximum clique of the graph given by bitset rows."""
    if n == 0:
        return []
    full = (1 << n) - 1
    best = _greedy_clique(neigh, full)
    order, colors = _color_sort(neigh, full)
    if colors and colors[-1] == len(best):
        return best  # colouring bound met by the greedy clique
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * n + 100))

    r: list = []

    def expand(p, order, colors):
        nonlocal best
        for i in range(len(order) - 1, -1, -1):
            v = order[i]
            if len(r) + colors[i] <= len(best):
                return
            r.append(v)
            new_p = p & neigh[v]
            if new_p:
                sub_order, sub_colors = _color_sort(neigh, new_p)
                expand(new_p, sub_order, sub_colors)
            elif len(r) > len(best):
                best = r.copy()
            r.pop()
            p &= ~(1 << v)

    expand(full, order, colors)
    return sorted(best)


def greedy_clique(neigh: list, n: int) -> list:
    """Greedy maximal clique: a certified lower bound on the maximum."""
    if n == 0:
        return []
    return sorted(_greedy_clique(neigh, (1 << n) - 1))
