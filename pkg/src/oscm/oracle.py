"""Brute-force reference solver and random instance generation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .crossings import crossing_matrix
from .model import Instance, Solution

MAX_BRUTE_FORCE = 10


class TooLargeError(ValueError):
    pass


@dataclass(frozen=True)
class GenSpec:
    n0: int
    n1: int
    density: float
    seed: int = 0
    guarantee_no_isolated: bool = False

    def __post_init__(self):
        if not 0.0 <= self.density <= 1.0:
            raise ValueError("density must lie in [0, 1]")


def generate(spec: GenSpec) -> Instance:
    rng = np.random.default_rng(spec.seed)
    present = rng.random((spec.n1, spec.n0)) < spec.density
    adjacency = []
    for b in range(spec.n1):
        nbrs = (np.flatnonzero(present[b]) + 1).tolist()
        if not nbrs and spec.guarantee_no_isolated and spec.n0 > 0:
            nbrs = [int(rng.integers(1, spec.n0 + 1))]
        adjacency.append(tuple(nbrs))
    return Instance(spec.n0, spec.n1, tuple(adjacency))


def brute_force_opt(instance: Instance) -> Solution:
    """Exact optimum by enumerating all orderings in lexicographic order.

    Partial orderings are extended one vertex at a time with the incremental
    cost ``sum(c[t, v] for t already placed)``. Ties keep the lexicographically
    smallest permutation.
    """
    n = instance.n1
    if n > MAX_BRUTE_FORCE:
        raise TooLargeError(f"brute force limited to n1 <= {MAX_BRUTE_FORCE}, got {n}")
    c = crossing_matrix(instance).tolist()
    best_cost = None
    best_perm: list[int] = []
    prefix: list[int] = []
    used = [False] * n

    def extend(cost: int) -> None:
        nonlocal best_cost, best_perm
        if best_cost is not None and cost >= best_cost:
            return  # costs are nonnegative and earlier leaves win ties
        if len(prefix) == n:
            best_cost, best_perm = cost, prefix.copy()
            return
        for v in range(n):
            if used[v]:
                continue
            add = 0
            for t in prefix:
                add += c[t][v]
            used[v] = True
            prefix.append(v)
            extend(cost + add)
            prefix.pop()
            used[v] = False

    extend(0)
    return Solution(tuple(best_perm), best_cost or 0)
