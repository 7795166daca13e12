"""Data reduction: isolated vertices, instance splitting and pair fixing rules.

All pair fixings live in a :class:`FixState`, a partial orientation of the
free-vertex pairs kept acyclic and (after :meth:`FixState.transitive_close`)
transitively closed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from typing import Sequence

import numpy as np

from .model import Instance


class PairStatus(IntEnum):
    FREE = 0
    U_BEFORE_V = 1
    V_BEFORE_U = 2


class FixConflict(Exception):
    """A fix contradicts the current state.

    ``triple`` is set for directed 3-cycles found by closure, rotated so the
    smallest vertex comes first.
    """

    def __init__(self, message: str, pair=None, triple=None):
        super().__init__(message)
        self.pair = pair
        self.triple = triple


RULES = ("isolated", "split", "zero_pairs", "dominance", "bound", "closure")


class FixState:
    """Partial order on ``n1`` free vertices with its cost bookkeeping.

    ``before[u, v]`` is True iff ``u`` is fixed to the left of ``v``.
    ``fixed_cost`` sums ``c`` in the fixed direction over fixed pairs and
    ``residual_lb`` sums ``min(c_uv, c_vu)`` over free pairs.

    After a :class:`FixConflict` the state is partially updated and must be
    discarded.
    """

    def __init__(self, matrix: np.ndarray):
        self.matrix = matrix
        self.n1 = matrix.shape[0]
        self.before = np.zeros((self.n1, self.n1), dtype=bool)
        self._mins = np.minimum(matrix, matrix.T)
        self.fixed_cost = 0
        self.residual_lb = int(np.triu(self._mins, 1).sum()) if self.n1 else 0
        self.rule_counts = dict.fromkeys(RULES, 0)

    def copy(self) -> "FixState":
        other = FixState.__new__(FixState)
        other.matrix = self.matrix
        other.n1 = self.n1
        other.before = self.before.copy()
        other._mins = self._mins
        other.fixed_cost = self.fixed_cost
        other.residual_lb = self.residual_lb
        other.rule_counts = dict(self.rule_counts)
        return other

    @property
    def lower_bound(self) -> int:
        return self.fixed_cost + self.residual_lb

    def status(self, u: int, v: int) -> PairStatus:
        if self.before[u, v]:
            return PairStatus.U_BEFORE_V
        if self.before[v, u]:
            return PairStatus.V_BEFORE_U
        return PairStatus.FREE

    def is_free(self, u: int, v: int) -> bool:
        return not (self.before[u, v] or self.before[v, u])

    def free_mask(self) -> np.ndarray:
        """Boolean (n1, n1) mask of free pairs ``u < v``."""
        fixed = self.before | self.before.T
        return np.triu(~fixed, 1)

    def num_free(self) -> int:
        return int(self.free_mask().sum())

    def fix(self, u: int, v: int, rule: str | None = None) -> bool:
        """Fix ``u`` before ``v``. Returns False if that was already fixed."""
        if u == v:
            raise ValueError("cannot orient a vertex against itself")
        if self.before[u, v]:
            return False
        if self.before[v, u]:
            raise FixConflict(f"{u} before {v} contradicts an existing fix", pair=(u, v))
        self.before[u, v] = True
        self.fixed_cost += int(self.matrix[u, v])
        self.residual_lb -= int(self._mins[u, v])
        if rule is not None:
            self.rule_counts[rule] += 1
        return True

    def fix_many(self, mask: np.ndarray, rule: str | None = None) -> int:
        """Fix every ``(u, v)`` with ``mask[u, v]`` set; the mask must only hold free pairs."""
        if (mask & self.before.T).any() or (mask & mask.T).any():
            u, v = map(int, np.argwhere((mask & self.before.T) | (mask & mask.T))[0])
            raise FixConflict(f"{u} before {v} contradicts an existing fix", pair=(u, v))
        new = mask & ~self.before
        count = int(new.sum())
        if count:
            self.before |= new
            self.fixed_cost += int(self.matrix[new].sum())
            self.residual_lb -= int(self._mins[new].sum())
            if rule is not None:
                self.rule_counts[rule] += count
        return count

    def transitive_close(self) -> int:
        """Propagate ``u<v, v<w => u<w`` to a fixed point (Warshall sweep).

        Returns the number of new fixes; raises :class:`FixConflict` carrying a
        directed triple if the fixed relation contains a cycle.
        """
        closure = self.before.copy()
        for k in range(self.n1):
            left = closure[:, k]
            right = closure[k, :]
            if not left.any() or not right.any():
                continue
            implied = np.outer(left, right)
            clash = implied & closure.T
            if clash.any():
                u, w = map(int, np.argwhere(clash)[0])
                raise FixConflict(
                    f"fixed orientations contain the cycle {u} < {k} < {w} < {u}",
                    triple=_rotate((u, k, w)),
                )
            closure |= implied
        new = closure & ~self.before
        return self.fix_many(new, "closure")

    def consistent_with(self, ordering: Sequence[int]) -> bool:
        pos = np.empty(self.n1, dtype=np.int64)
        pos[np.asarray(ordering, dtype=np.int64)] = np.arange(self.n1)
        u, v = np.nonzero(self.before)
        return bool(np.all(pos[u] < pos[v]))

    def restrict(self, vertices: Sequence[int]) -> "FixState":
        """State on the sub-matrix induced by ``vertices`` (new local indices)."""
        idx = np.asarray(vertices, dtype=np.int64)
        sub = FixState(self.matrix[np.ix_(idx, idx)])
        sub.fix_many(self.before[np.ix_(idx, idx)])
        return sub

    def absorb(self, other: "FixState") -> int:
        """Add every fix of ``other`` (same vertex set) and re-close."""
        count = self.fix_many(other.before & ~self.before)
        if count:
            count += self.transitive_close()
        return count

    def __repr__(self):
        return f"FixState(n1={self.n1}, fixed={int(self.before.sum())}, lb={self.lower_bound})"


def _rotate(triple):
    i = triple.index(min(triple))
    return triple[i:] + triple[:i]


@dataclass
class SplitResult:
    """Left-to-right decomposition of an instance into independent parts.

    ``vertices[k]`` lists the original free-vertex indices of ``parts[k]``;
    ``isolated`` holds degree-zero vertices that go leftmost.
    """

    parts: list[Instance]
    vertices: list[list[int]]
    isolated: list[int] = field(default_factory=list)
    a_ranges: list[tuple[int, int]] = field(default_factory=list)

    @property
    def prefix_isolated(self) -> int:
        return len(self.isolated)

    def assemble(self, orderings: Sequence[Sequence[int]]) -> list[int]:
        """Map per-part orderings (local indices) to one full ordering."""
        if len(orderings) != len(self.parts):
            raise ValueError("need exactly one ordering per part")
        full = list(self.isolated)
        for verts, order in zip(self.vertices, orderings):
            full.extend(verts[i] for i in order)
        return full

    def conform(self, ordering: Sequence[int]) -> list[list[int]]:
        """Split a full ordering into per-part local orderings, keeping relative order."""
        local = {}
        for k, verts in enumerate(self.vertices):
            for i, b in enumerate(verts):
                local[b] = (k, i)
        out: list[list[int]] = [[] for _ in self.parts]
        for b in ordering:
            if b in local:
                k, i = local[b]
                out[k].append(i)
        return out


def extract_isolated(instance: Instance) -> tuple[Instance, list[int], list[int]]:
    """Split off degree-zero free vertices.

    Returns ``(core, isolated, kept)`` where ``kept[i]`` is the original index
    of core vertex ``i``.
    """
    kept = [b for b in range(instance.n1) if instance.adjacency[b]]
    isolated = [b for b in range(instance.n1) if not instance.adjacency[b]]
    if not isolated:
        return instance, [], kept
    return instance.subinstance(kept), isolated, kept


def split_instance(instance: Instance) -> SplitResult:
    """Maximal decomposition by cut positions ``q`` of the fixed layer.

    A cut separates ``B1`` from ``B2`` whenever every vertex of ``B1`` has its
    rightmost neighbor at or left of ``q`` and every vertex of ``B2`` has its
    leftmost neighbor at or right of ``q``. One sweep over the vertices sorted
    by ``(leftmost, rightmost, index)`` finds all cuts.
    """
    if any(not nbrs for nbrs in instance.adjacency):
        raise ValueError("split_instance requires an instance without isolated free vertices")
    if instance.n1 == 0:
        return SplitResult([], [])
    order = sorted(range(instance.n1), key=lambda b: (instance.adjacency[b][0], instance.adjacency[b][-1], b))
    groups: list[list[int]] = [[order[0]]]
    reach = instance.adjacency[order[0]][-1]
    for b in order[1:]:
        left, right = instance.adjacency[b][0], instance.adjacency[b][-1]
        if reach <= left:
            groups.append([b])
        else:
            groups[-1].append(b)
        reach = max(reach, right)
    vertices = [sorted(g) for g in groups]
    parts = [instance.subinstance(v) for v in vertices]
    ranges = [
        (min(instance.adjacency[b][0] for b in v), max(instance.adjacency[b][-1] for b in v)) for v in vertices
    ]
    return SplitResult(parts, vertices, [], ranges)


def fix_zero_pairs(matrix: np.ndarray, state: FixState) -> int:
    """Fix ``u`` before ``v`` whenever ``c_uv = 0 < c_vu``."""
    free = state.free_mask()
    free = free | free.T
    mask = free & (matrix == 0) & (matrix.T > 0)
    return state.fix_many(mask, "zero_pairs")


def gap_prefix_counts(instance: Instance) -> np.ndarray:
    """``P[v, g]`` = neighbors of ``v`` left of gap ``g`` (gap ``g`` sits at ``g + 0.5``)."""
    inc = instance.incidence
    out = np.zeros((instance.n1, instance.n0 + 1), dtype=np.int64)
    out[:, 1:] = np.cumsum(inc, axis=1)
    return out


def dominance_fix(instance: Instance, matrix: np.ndarray, state: FixState) -> int:
    """Probe-edge dominance for equal-degree pairs.

    ``u`` goes before ``v`` when ``c_uv < c_vu`` and, at every gap of the
    fixed layer, ``u`` has at least as many neighbors to the left as ``v``:
    then moving ``u`` left past ``v`` never increases the crossings of any
    edge between them.
    """
    n = instance.n1
    if n < 2:
        return 0
    prefix = gap_prefix_counts(instance)
    deg = instance.degrees
    free = state.free_mask()
    free = free | free.T
    mask = np.zeros((n, n), dtype=bool)
    for u in range(n):
        cand = free[u] & (deg == deg[u]) & (matrix[u] < matrix[:, u])
        if not cand.any():
            continue
        vs = np.flatnonzero(cand)
        dominated = np.all(prefix[u] >= prefix[vs], axis=1)
        mask[u, vs[dominated]] = True
    return state.fix_many(mask, "dominance")


def bound_fix(matrix: np.ndarray, state: FixState, ub: int, improving_only: bool = False) -> int:
    """Fix pairs whose expensive orientation alone exceeds the incumbent.

    With ``lb = state.lower_bound``, choosing the expensive orientation of a
    free pair costs at least ``lb + (c - min)``. By default a pair is fixed
    when ``c - min > ub - lb``, which keeps every ordering of cost ``<= ub``.
    With ``improving_only`` the test is ``>=`` and only orderings strictly
    better than ``ub`` survive; a resulting conflict then proves ``ub``
    optimal.
    """
    lb = state.lower_bound
    if ub < lb:
        raise FixConflict(f"incumbent {ub} is below the lower bound {lb}")
    gap = ub - lb
    free = state.free_mask()
    free = free | free.T
    excess = matrix - state._mins
    prune = excess >= gap if improving_only else excess > gap
    prune &= excess > 0  # equal pairs: neither side can be excluded
    # excess[u, v] large => u-before-v is too expensive => fix v before u
    mask = (free & prune).T & free
    both = mask & mask.T
    if both.any():
        u, v = map(int, np.argwhere(both)[0])
        raise FixConflict(f"both orientations of ({u}, {v}) are pruned; the incumbent is optimal", pair=(u, v))
    return state.fix_many(mask, "bound")


def reduce(instance: Instance, matrix: np.ndarray, ub: int | None = None) -> tuple[FixState, SplitResult]:
    """Run all reduction rules to a joint fixed point.

    The returned state covers the full instance: isolated vertices are fixed
    leftmost and vertices of different split parts are fixed in part order,
    so any ordering consistent with it is a valid full solution. Every optimal
    ordering consistent with the split survives when ``ub`` is at least the
    optimum.
    """
    state = FixState(matrix)
    core, isolated, kept = extract_isolated(instance)
    split = split_instance(core)
    split.isolated = isolated
    split.vertices = [[kept[i] for i in verts] for verts in split.vertices]
    n = instance.n1
    if isolated:
        mask = np.zeros((n, n), dtype=bool)
        mask[np.ix_(isolated, kept)] = True
        # isolated vertices among themselves stay in ascending label order
        iso = np.asarray(isolated)
        mask[np.ix_(iso, iso)] = np.triu(np.ones((len(iso), len(iso)), dtype=bool), 1)
        state.fix_many(mask, "isolated")
    if len(split.vertices) > 1:
        part_of = np.full(n, -1)
        for k, verts in enumerate(split.vertices):
            part_of[verts] = k
        mask = (part_of[:, None] < part_of[None, :]) & (part_of[:, None] >= 0)
        state.fix_many(mask & ~state.before, "split")
    while True:
        fired = fix_zero_pairs(matrix, state)
        fired += dominance_fix(instance, matrix, state)
        if ub is not None:
            fired += bound_fix(matrix, state, ub)
        fired += state.transitive_close()
        if not fired:
            break
    return state, split
