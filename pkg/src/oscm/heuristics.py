"""Constructive and improvement heuristics.

Uninformed constructors score every free vertex from its neighbor positions
and sort by score. Informed constructors read a fractional LP solution.
Improvement passes take an ordering and never return a worse one.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .config import SolverConfig
from .crossings import order_cost
from .lp import INT_TOL, LpSolution, pair_columns
from .model import Instance, Solution, check_permutation
from .reduction import FixConflict, FixState

PM_LOW = 0.0957
PM_HIGH = 0.9043


class IsolatedVertexError(ValueError):
    pass


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def order_by_scores(scores: Sequence[float]) -> list[int]:
    """Indices sorted by non-decreasing score; equal scores keep index order."""
    s = np.asarray(scores, dtype=float)
    if not np.all(np.isfinite(s)):
        raise ValueError("scores must be finite")
    return np.argsort(s, kind="stable").tolist()


def _require_neighbors(instance: Instance) -> None:
    for b, nbrs in enumerate(instance.adjacency):
        if not nbrs:
            raise IsolatedVertexError(f"free vertex {b} has no neighbors")


def barycenter_scores(instance: Instance) -> list[float]:
    _require_neighbors(instance)
    return [sum(nbrs) / len(nbrs) for nbrs in instance.adjacency]


def barycenter(instance: Instance) -> list[int]:
    return order_by_scores(barycenter_scores(instance))


def median_scores(instance: Instance) -> list[float]:
    _require_neighbors(instance)
    scores = []
    for w in instance.adjacency:
        d = len(w)
        scores.append(float(w[(d - 1) // 2]) if d % 2 else (w[d // 2 - 1] + w[d // 2]) / 2)
    return scores


def median(instance: Instance) -> list[int]:
    return order_by_scores(median_scores(instance))


def probabilistic_median_scores(instance: Instance, draws: Sequence[float]) -> list[float]:
    """Score ``w[floor(x * d)]`` for each vertex with its own draw ``x``."""
    _require_neighbors(instance)
    return [float(w[int(np.floor(x * len(w)))]) for w, x in zip(instance.adjacency, draws)]


def probabilistic_median(instance: Instance, seed=0) -> list[int]:
    """One draw of the probabilistic median; ``seed`` may be an int or a Generator."""
    draws = _rng(seed).uniform(PM_LOW, PM_HIGH, size=instance.n1)
    return order_by_scores(probabilistic_median_scores(instance, draws))


def _before_probabilities(fractional: LpSolution, fixstate: FixState | None) -> np.ndarray:
    if np.any(fractional.x < -INT_TOL) or np.any(fractional.x > 1 + INT_TOL):
        raise ValueError("fractional values must lie in [0, 1]")
    P = np.clip(fractional.before_matrix(), 0.0, 1.0)
    np.fill_diagonal(P, 0.0)
    if fixstate is not None:
        P[fixstate.before] = 1.0
        P[fixstate.before.T] = 0.0
    return P


def sort_scores(fractional: LpSolution, fixstate: FixState | None = None) -> np.ndarray:
    """Expected number of vertices left of each vertex."""
    return _before_probabilities(fractional, fixstate).sum(axis=0)


def sort_heuristic(fractional: LpSolution, fixstate: FixState | None = None) -> list[int]:
    return order_by_scores(sort_scores(fractional, fixstate))


def randomized_rounding(
    fractional: LpSolution, matrix: np.ndarray, seed=0, trials: int = 32
) -> Solution:
    """Best of ``trials`` Bernoulli tournaments, each ordered by Copeland score."""
    if trials < 1:
        raise ValueError("trials must be at least 1")
    n = fractional.n1
    if n < 2:
        return Solution(tuple(range(n)), 0)
    rng = _rng(seed)
    x = np.clip(fractional.x, 0.0, 1.0)
    iu, iv = pair_columns(n)
    best = None
    for _ in range(trials):
        u_first = rng.random(len(x)) < x
        wins = np.bincount(iu[u_first], minlength=n) + np.bincount(iv[~u_first], minlength=n)
        order = np.lexsort((np.arange(n), -wins)).tolist()
        cost = order_cost(matrix, order)
        if best is None or cost < best.crossings:
            best = Solution(tuple(order), cost)
    return best


def shift_improve(ordering: Sequence[int], matrix: np.ndarray) -> Solution:
    """Reinsert single vertices at their best position until no move helps.

    Vertices are visited in their current left-to-right order; for each, the
    cost change of every target position comes from prefix sums of
    ``c[v, t] - c[t, v]`` along the ordering.
    """
    n = matrix.shape[0]
    check_permutation(ordering, n)
    order = list(ordering)
    if n < 2:
        return Solution(tuple(order), 0)
    c = matrix
    improved = True
    while improved:
        improved = False
        for v in list(order):
            i = order.index(v)
            arr = np.asarray(order)
            D = c[v, arr] - c[arr, v]
            S = np.concatenate([[0], np.cumsum(D)])
            delta = np.empty(n, dtype=np.int64)
            delta[:i] = S[i] - S[:i]
            delta[i] = 0
            delta[i + 1 :] = S[i + 1] - S[i + 2 :]
            j = int(np.argmin(delta))
            if delta[j] < 0:
                order.pop(i)
                order.insert(j, v)
                improved = True
    return Solution(tuple(order), order_cost(matrix, order))


def _state_from_window(ordering: Sequence[int], matrix: np.ndarray, w: int) -> FixState:
    n = matrix.shape[0]
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(ordering, dtype=np.int64)] = np.arange(n)
    dist = pos[None, :] - pos[:, None]
    state = FixState(matrix)
    state.fix_many(dist >= w)
    state.transitive_close()
    return state


def local_search_improve(
    ordering: Sequence[int],
    matrix: np.ndarray,
    w: int,
    config: SolverConfig | None = None,
    deadline: float | None = None,
) -> Solution:
    """Exactly re-optimize every pair closer than ``w`` positions, repeatedly.

    Pairs at distance ``>= w`` keep their current relative order. The window
    problem is solved by branch and cut seeded with the current ordering and
    re-solved around each improvement until none is found.
    """
    from .bnb import branch_and_cut

    if w < 2:
        raise ValueError("window width must be at least 2")
    n = matrix.shape[0]
    check_permutation(ordering, n)
    config = config or SolverConfig()
    best = Solution(tuple(ordering), order_cost(matrix, ordering))
    while n > 1:
        state = _state_from_window(best.ordering, matrix, w)
        result = branch_and_cut(matrix, state, best, config, use_rins=False, deadline=deadline)
        if result.best.crossings >= best.crossings or not result.proven_optimal:
            best = min(best, result.best, key=lambda s: s.crossings)
            break
        best = result.best
    return best


def rins(
    fractional: LpSolution,
    incumbent: Solution,
    matrix: np.ndarray,
    node_limit: int = 10_000,
    config: SolverConfig | None = None,
    deadline: float | None = None,
) -> Solution:
    """Relaxation induced neighborhood search around ``incumbent``.

    Pairs whose LP value is integral and agrees with the incumbent are fixed;
    the rest is searched by a node-limited branch and cut.
    """
    from .bnb import branch_and_cut

    n = matrix.shape[0]
    if n < 2:
        return incumbent
    pos = np.empty(n, dtype=np.int64)
    pos[np.asarray(incumbent.ordering, dtype=np.int64)] = np.arange(n)
    iu, iv = pair_columns(n)
    x = fractional.x
    inc_u_first = pos[iu] < pos[iv]
    agree_one = (x >= 1 - INT_TOL) & inc_u_first
    agree_zero = (x <= INT_TOL) & ~inc_u_first
    mask = np.zeros((n, n), dtype=bool)
    mask[iu[agree_one], iv[agree_one]] = True
    mask[iv[agree_zero], iu[agree_zero]] = True
    state = FixState(matrix)
    state.fix_many(mask)
    try:
        state.transitive_close()
    except FixConflict:  # cannot happen: all fixes agree with one ordering
        return incumbent
    if state.num_free() == 0:
        return incumbent
    config = config or SolverConfig()
    result = branch_and_cut(matrix, state, incumbent, config, node_limit=node_limit, use_rins=False, deadline=deadline)
    return result.best if result.best.crossings < incumbent.crossings else incumbent


def heuristic_portfolio(
    instance: Instance, matrix: np.ndarray, seed=0, config: SolverConfig | None = None
) -> Solution:
    """Barycenter, median and probabilistic-median starts, each shift-improved."""
    config = config or SolverConfig()
    if instance.n1 == 0:
        return Solution((), 0)
    rng = _rng(seed)
    starts = [tuple(barycenter(instance)), tuple(median(instance))]
    starts += [tuple(probabilistic_median(instance, rng)) for _ in range(config.restarts)]
    best = None
    seen = set()
    for start in starts:
        if start in seen:
            continue
        seen.add(start)
        sol = shift_improve(start, matrix)
        if best is None or sol.crossings < best.crossings:
            best = sol
    return best
