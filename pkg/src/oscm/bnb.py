"""Depth-first branch and cut over the ordering MIP.

Each node solves the LP relaxation with lazily separated triangle rows,
prunes on infeasibility or on the rounded-up bound, records integral
solutions, runs informed heuristics and branches on the pair whose LP value
is closest to one half.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .config import SolverConfig
from .crossings import count_crossings, crossing_matrix, order_cost, pair_lower_bound
from .heuristics import (
    heuristic_portfolio,
    local_search_improve,
    randomized_rounding,
    rins,
    shift_improve,
    sort_heuristic,
    sort_scores,
)
from .lp import INT_TOL, LpSolution, build_lp, pair_columns, solve_relaxation
from .model import Instance, Solution
from .reduction import FixConflict, FixState, bound_fix, extract_isolated, reduce, split_instance

log = logging.getLogger(__name__)


class SearchError(RuntimeError):
    """Internal inconsistency detected during the search."""


@dataclass
class SearchNode:
    trail: tuple[tuple[tuple[int, int], bool], ...]  # ((u, v), u_first) decisions
    state: FixState
    depth: int
    bound: int  # rounded LP bound of the parent
    root_version: int = 0


@dataclass
class SearchResult:
    best: Solution
    proven_optimal: bool
    lower_bound: int
    nodes: int = 0
    lp_solves: int = 0
    cuts_added: int = 0
    history: list[int] = field(default_factory=list)


@dataclass
class SolveReport:
    best: Solution
    proven_optimal: bool
    lower_bound: int
    heuristic_cost: int
    nodes_explored: int = 0
    cuts_added: int = 0
    lp_solves: int = 0
    wall_time: float = 0.0
    reductions: dict = field(default_factory=dict)
    incumbent_history: list[int] = field(default_factory=list)


def choose_branch_column(values: Sequence[float]) -> int:
    """Column whose value is closest to 0.5; the lowest index wins ties."""
    x = np.asarray(values, dtype=float)
    frac = np.minimum(x, 1.0 - x) > INT_TOL
    if not frac.any():
        raise ValueError("no fractional column to branch on")
    # rounding keeps mirrored values such as 0.3 and 0.7 tied
    dist = np.where(frac, np.round(np.abs(x - 0.5), 9), np.inf)
    return int(np.argmin(dist))


def choose_branch_variable(x: LpSolution) -> tuple[int, int]:
    iu, iv = pair_columns(x.n1)
    col = choose_branch_column(x.x)
    return int(iu[col]), int(iv[col])


def decode_integral(x: LpSolution, state: FixState | None = None) -> list[int]:
    """The ordering encoded by an integral, triangle-feasible LP solution."""
    if not x.is_integral():
        raise ValueError("solution is not integral")
    rounded = LpSolution(x.n1, np.round(x.x), x.objective_value, x.status)
    scores = np.round(sort_scores(rounded, state)).astype(np.int64)
    if len(set(scores.tolist())) != x.n1:
        raise SearchError("integral solution does not encode a total order")
    return np.argsort(scores, kind="stable").tolist()


def _expired(deadline: float | None) -> bool:
    return deadline is not None and time.monotonic() >= deadline


def branch_and_cut(
    matrix: np.ndarray,
    state: FixState,
    incumbent: Solution,
    config: SolverConfig | None = None,
    *,
    node_limit: int | None = None,
    deadline: float | None = None,
    use_rins: bool = True,
    rng: np.random.Generator | None = None,
    on_improve: Callable[[Solution], None] | None = None,
) -> SearchResult:
    """Search for an ordering strictly better than ``incumbent``.

    ``state`` holds the fixes valid at the root; it is not modified. The
    result is proven optimal (over orderings consistent with ``state`` and the
    incumbent) when the tree is exhausted within the node and time limits.
    """
    config = config or SolverConfig()
    rng = rng if rng is not None else np.random.default_rng(config.seed)
    n = matrix.shape[0]
    result = SearchResult(incumbent, True, incumbent.crossings, history=[incumbent.crossings])
    if n < 2:
        return result

    root = state.copy()

    def tighten_root() -> bool:
        try:
            bound_fix(matrix, root, result.best.crossings, improving_only=True)
            root.transitive_close()
        except FixConflict:
            return False
        return True

    if not tighten_root():
        return result

    def improve(sol: Solution) -> bool:
        if sol.crossings >= result.best.crossings:
            return False
        log.debug("incumbent %d -> %d", result.best.crossings, sol.crossings)
        result.best = sol
        result.history.append(sol.crossings)
        if on_improve is not None:
            on_improve(sol)
        return True

    model = build_lp(matrix, root)
    root_version = 0
    stack = [SearchNode((), root, 0, root.lower_bound, root_version)]
    rins_due = use_rins
    exhausted = True
    while stack:
        if _expired(deadline) or (node_limit is not None and result.nodes >= node_limit):
            exhausted = False
            break
        node = stack.pop()
        if node.bound >= result.best.crossings:
            continue
        if node.root_version != root_version:
            try:
                node.state.absorb(root)
            except FixConflict:
                continue
            node.root_version = root_version
        result.nodes += 1
        sol = solve_relaxation(model, node.state, config.max_cuts)
        if not sol.optimal:
            continue
        bound = sol.bound()
        if bound >= result.best.crossings:
            continue
        if sol.is_integral():
            order = decode_integral(sol, node.state)
            cost = order_cost(matrix, order)
            if cost != bound:
                raise SearchError(f"integral LP value {sol.objective_value} differs from ordering cost {cost}")
            improved = improve(Solution(tuple(order), cost))
        else:
            improved = improve(shift_improve(sort_heuristic(sol, node.state), matrix))
            if result.nodes == 1 or result.nodes % config.rr_every == 0:
                rr = randomized_rounding(sol, matrix, rng, config.rr_trials)
                improved |= improve(shift_improve(rr.ordering, matrix))
            if rins_due:
                rins_due = False
                sub = rins(sol, result.best, matrix, config.rins_node_limit, config, deadline=deadline)
                improved |= improve(sub)
        if improved:
            rins_due = use_rins
            root_version += 1
            if not tighten_root():
                stack.clear()
                break
        if sol.is_integral() or bound >= result.best.crossings:
            continue
        u, v = choose_branch_variable(sol)
        pos = {b: i for i, b in enumerate(result.best.ordering)}
        incumbent_u_first = pos[u] < pos[v]
        children = []
        for u_first in (not incumbent_u_first, incumbent_u_first):
            child = node.state.copy()
            try:
                if u_first:
                    child.fix(u, v)
                else:
                    child.fix(v, u)
                child.transitive_close()
            except FixConflict:
                continue
            children.append(SearchNode(node.trail + (((u, v), u_first),), child, node.depth + 1, bound, node.root_version))
        stack.extend(children)  # incumbent-matching child is popped first
    result.lp_solves = model.lp_solves
    result.cuts_added = model.cuts_added
    if exhausted:
        result.proven_optimal = True
        result.lower_bound = result.best.crossings
    else:
        result.proven_optimal = False
        result.lower_bound = min([result.best.crossings] + [nd.bound for nd in stack])
    return result


def solve_exact(instance: Instance, config: SolverConfig | None = None) -> SolveReport:
    """Full pipeline: heuristics, data reduction, then branch and cut per part."""
    config = config or SolverConfig()
    start = time.monotonic()
    deadline = None if config.time_limit is None else start + config.time_limit
    rng = np.random.default_rng(config.seed)

    matrix = crossing_matrix(instance)
    core, isolated, kept = extract_isolated(instance)
    core_matrix = matrix[np.ix_(kept, kept)]
    heur = heuristic_portfolio(core, core_matrix, rng, config)
    if config.local_search and core.n1 > config.window:
        heur = local_search_improve(heur.ordering, core_matrix, config.window, config, deadline=deadline)
    incumbent = isolated + [kept[i] for i in heur.ordering]

    state, split = reduce(instance, matrix, heur.crossings)
    part_orders = split.conform(incumbent)
    part_costs = []
    for verts, order in zip(split.vertices, part_orders):
        sub = matrix[np.ix_(verts, verts)]
        part_costs.append(order_cost(sub, order))
    total = sum(part_costs)
    report = SolveReport(
        best=Solution(tuple(incumbent), heur.crossings),
        proven_optimal=True,
        lower_bound=0,
        heuristic_cost=heur.crossings,
        reductions=dict(state.rule_counts),
        incumbent_history=[heur.crossings] + ([total] if total < heur.crossings else []),
    )
    finals = []
    for k, (verts, order) in enumerate(zip(split.vertices, part_orders)):
        sub = matrix[np.ix_(verts, verts)]
        inc = Solution(tuple(order), part_costs[k])

        def on_improve(sol: Solution, k=k) -> None:
            nonlocal total
            total -= part_costs[k] - sol.crossings
            part_costs[k] = sol.crossings
            report.incumbent_history.append(total)

        res = branch_and_cut(
            sub, state.restrict(verts), inc, config, deadline=deadline, rng=rng, on_improve=on_improve
        )
        finals.append(res.best.ordering)
        report.nodes_explored += res.nodes
        report.cuts_added += res.cuts_added
        report.lp_solves += res.lp_solves
        report.lower_bound += res.lower_bound
        report.proven_optimal &= res.proven_optimal
    ordering = split.assemble(finals)
    cost = count_crossings(instance, ordering)
    if cost != total:
        raise SearchError(f"assembled ordering has {cost} crossings, parts claim {total}")
    report.best = Solution(tuple(ordering), cost)
    report.wall_time = time.monotonic() - start
    return report


def solve_heuristic(instance: Instance, config: SolverConfig | None = None) -> SolveReport:
    """Heuristic-only pipeline: portfolio per split part, no local search or search tree."""
    config = config or SolverConfig()
    start = time.monotonic()
    rng = np.random.default_rng(config.seed)
    matrix = crossing_matrix(instance)
    core, isolated, kept = extract_isolated(instance)
    split = split_instance(core)
    split.isolated = isolated
    split.vertices = [[kept[i] for i in verts] for verts in split.vertices]
    orders = []
    for part, verts in zip(split.parts, split.vertices):
        sub = matrix[np.ix_(verts, verts)]
        orders.append(heuristic_portfolio(part, sub, rng, config).ordering)
    ordering = split.assemble(orders)
    cost = count_crossings(instance, ordering)
    lb = pair_lower_bound(matrix)
    return SolveReport(
        best=Solution(tuple(ordering), cost),
        proven_optimal=cost == lb,
        lower_bound=lb,
        heuristic_cost=cost,
        wall_time=time.monotonic() - start,
        incumbent_history=[cost],
    )
