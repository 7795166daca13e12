"""Pairwise crossing numbers, crossing counts and the pairwise lower bound.

``c[u, v]`` is the number of crossings between edges of ``u`` and edges of
``v`` when ``u`` is placed to the left of ``v``: the count of neighbor pairs
``(a, b)`` with ``a`` in N(u), ``b`` in N(v) and ``a > b``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .model import Instance, check_permutation


class FenwickTree:
    """Binary indexed tree of counts over positions ``1..size``."""

    def __init__(self, size: int):
        self.size = size
        self._tree = [0] * (size + 1)
        self.total = 0

    def add(self, pos: int, count: int = 1) -> None:
        self.total += count
        tree = self._tree
        while pos <= self.size:
            tree[pos] += count
            pos += pos & -pos

    def prefix(self, pos: int) -> int:
        """Sum of counts at positions ``1..pos``."""
        s = 0
        tree = self._tree
        while pos > 0:
            s += tree[pos]
            pos -= pos & -pos
        return s

    def count_greater(self, pos: int) -> int:
        return self.total - self.prefix(pos)


def merge_counts(nu: Sequence[int], nv: Sequence[int]) -> tuple[int, int, int]:
    """One merge pass over two ascending neighbor lists.

    Returns ``(c_uv, c_vu, shared)``.
    """
    du, dv = len(nu), len(nv)
    i = j = 0
    cuv = cvu = shared = 0
    while i < du or j < dv:
        if j == dv or (i < du and nu[i] < nv[j]):
            cuv += j
            i += 1
        elif i == du or nv[j] < nu[i]:
            cvu += i
            j += 1
        else:
            shared += 1
            cuv += j
            cvu += i
            i += 1
            j += 1
    return cuv, cvu, shared


def pair_crossings(instance: Instance, u: int, v: int) -> tuple[int, int]:
    if u == v:
        raise ValueError("pair_crossings needs two distinct free vertices")
    cuv, cvu, _ = merge_counts(instance.adjacency[u], instance.adjacency[v])
    return cuv, cvu


def crossing_matrix(instance: Instance) -> np.ndarray:
    """Dense ``(n1, n1)`` int64 matrix of pairwise crossing numbers.

    Computed as ``inc @ less.T`` where ``less[v, a]`` counts neighbors of ``v``
    strictly left of A-position ``a``.
    """
    inc = instance.incidence
    less = np.cumsum(inc, axis=1) - inc
    c = inc @ less.T
    np.fill_diagonal(c, 0)
    return c


def shared_endpoints(instance: Instance) -> np.ndarray:
    inc = instance.incidence
    return inc @ inc.T


def count_crossings(instance: Instance, ordering: Sequence[int]) -> int:
    """Total crossings of ``ordering`` by inversion counting, O(m log n0)."""
    check_permutation(ordering, instance.n1)
    tree = FenwickTree(instance.n0)
    total = 0
    for b in ordering:
        nbrs = instance.adjacency[b]
        for a in nbrs:
            total += tree.count_greater(a)
        for a in nbrs:
            tree.add(a)
    return total


def order_cost(matrix: np.ndarray, ordering: Sequence[int]) -> int:
    """Sum of ``matrix[u, v]`` over all pairs with ``u`` placed before ``v``."""
    n = matrix.shape[0]
    check_permutation(ordering, n)
    if n < 2:
        return 0
    perm = np.asarray(ordering)
    permuted = matrix[np.ix_(perm, perm)]
    return int(np.triu(permuted, 1).sum())


def pair_lower_bound(matrix: np.ndarray) -> int:
    n = matrix.shape[0]
    mins = np.minimum(matrix, matrix.T)
    return int(np.triu(mins, 1).sum()) if n else 0
