"""Independent oracles and instance corpora shared by the tests."""

import itertools
from functools import lru_cache

import numpy as np

from oscm.model import Instance
from oscm.oracle import GenSpec, generate

TWO_STARS_TEXT = "p ocr 4 2 6\n1 5\n3 5\n4 5\n2 6\n3 6\n4 6\n"
TWO_STARS = Instance.from_lists(4, [(1, 3, 4), (2, 3, 4)])
SWAP = Instance.from_lists(2, [(2,), (1,)])
# smallest pairwise-min cycle: 0 < 1, 1 < 2 and 2 < 0 are each the cheaper orientation
CYCLIC = Instance.from_lists(6, [(3, 4), (1, 4, 5), (2, 3, 6)])
DENSITIES = (0.2, 0.5, 0.8)


@lru_cache(maxsize=None)
def all_perms(n):
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64)


def quadratic_crossings(instance, ordering):
    """Count crossing edge pairs straight from the definition."""
    pos = {b: i for i, b in enumerate(ordering)}
    edges = [(a, b) for b, nbrs in enumerate(instance.adjacency) for a in nbrs]
    total = 0
    for (a1, b1), (a2, b2) in itertools.combinations(edges, 2):
        if (a1 < a2 and pos[b1] > pos[b2]) or (a1 > a2 and pos[b1] < pos[b2]):
            total += 1
    return total


def quadratic_pair(nu, nv):
    return sum(a > b for a in nu for b in nv), sum(b > a for a in nu for b in nv)


def all_costs(matrix):
    """Cost of every permutation (rows of ``all_perms``), vectorized."""
    n = matrix.shape[0]
    perms = all_perms(n)
    cost = np.zeros(len(perms), dtype=np.int64)
    for i in range(n):
        for j in range(i + 1, n):
            cost += matrix[perms[:, i], perms[:, j]]
    return perms, cost


def exhaustive_opt(matrix):
    _, cost = all_costs(matrix)
    return int(cost.min())


def consistent_opt(matrix, before):
    """Optimum over permutations respecting every ``before[u, v]``; None if none do."""
    perms, cost = all_costs(matrix)
    n = matrix.shape[0]
    pos = np.argsort(perms, axis=1)
    ok = np.ones(len(perms), dtype=bool)
    for u, v in zip(*np.nonzero(before)):
        ok &= pos[:, u] < pos[:, v]
    if not ok.any():
        return None
    return int(cost[ok].min())


def corpus(count=300, seed0=0):
    """Deterministic small instances: n0 in 2..8, n1 in 2..7, densities cycled."""
    out = []
    for i in range(count):
        rng = np.random.default_rng(10_000 + seed0 + i)
        n0 = int(rng.integers(2, 9))
        n1 = int(rng.integers(2, 8))
        out.append(generate(GenSpec(n0, n1, DENSITIES[i % 3], seed=seed0 + i)))
    return out


def random_instance(rng, max_n0=30, max_n1=30, density=None):
    n0 = int(rng.integers(0, max_n0 + 1))
    n1 = int(rng.integers(0, max_n1 + 1))
    d = float(rng.random()) if density is None else density
    return generate(GenSpec(n0, n1, d, seed=int(rng.integers(2**32))))
