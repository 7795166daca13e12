"""Linear relaxation of the ordering MIP with lazily separated triangle rows.

There is one column ``x[u, v]`` per pair ``u < v`` (1 means ``u`` left of
``v``). The objective is ``sum (c_uv - c_vu) x_uv + sum c_vu``. Pairs fixed
by a :class:`FixState` become columns with equal bounds, so the column set
and the row pool never change while the search moves between nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .reduction import FixState
from .simplex import DualSimplex, NumericalError, Status

FEAS_TOL = 1e-6
INT_TOL = 1e-6
MAX_CUTS = 500


def pair_columns(n1: int) -> tuple[np.ndarray, np.ndarray]:
    """Row/column vertex indices of the LP columns, in column order."""
    return np.triu_indices(n1, 1)


def column_index(n1: int) -> np.ndarray:
    """``idx[u, v]`` is the column of pair ``(min, max)``; -1 on the diagonal."""
    iu, iv = pair_columns(n1)
    idx = np.full((n1, n1), -1, dtype=np.int64)
    cols = np.arange(len(iu))
    idx[iu, iv] = cols
    idx[iv, iu] = cols
    return idx


@dataclass
class LpSolution:
    n1: int
    x: np.ndarray
    objective_value: float
    status: Status

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL

    def before_matrix(self) -> np.ndarray:
        """``P[u, v]`` = fractional value of "``u`` left of ``v``"."""
        P = np.zeros((self.n1, self.n1))
        if self.n1 > 1:
            iu, iv = pair_columns(self.n1)
            P[iu, iv] = self.x
            P[iv, iu] = 1.0 - self.x
        return P

    def is_integral(self, tol: float = INT_TOL) -> bool:
        return bool(np.all(np.minimum(self.x, 1.0 - self.x) <= tol))

    def bound(self) -> int:
        """Rounded-up objective, valid because crossing counts are integers."""
        return int(np.ceil(self.objective_value - FEAS_TOL))


@dataclass
class LpModel:
    n1: int
    cost: np.ndarray
    constant: float
    lo: np.ndarray
    hi: np.ndarray
    rows: list[tuple[int, int, int]] = field(default_factory=list)
    lp_solves: int = 0
    cuts_added: int = 0
    _pooled: set = field(default_factory=set, repr=False)
    _engine: DualSimplex | None = field(default=None, repr=False)

    @property
    def num_columns(self) -> int:
        return len(self.cost)

    def apply_state(self, state: FixState) -> None:
        iu, iv = pair_columns(self.n1)
        ahead = state.before[iu, iv]
        behind = state.before[iv, iu]
        self.lo = np.where(ahead, 1.0, 0.0)
        self.hi = np.where(behind, 0.0, 1.0)

    def add_triangles(self, triples) -> int:
        added = 0
        for t in triples:
            if t not in self._pooled:
                self._pooled.add(t)
                self.rows.append(t)
                added += 1
        self.cuts_added += added
        return added

    def row_matrix(self, triples) -> np.ndarray:
        idx = column_index(self.n1)
        out = np.zeros((len(triples), self.num_columns))
        for r, (u, v, w) in enumerate(triples):
            out[r, idx[u, v]] += 1.0
            out[r, idx[v, w]] += 1.0
            out[r, idx[u, w]] -= 1.0
        return out

    def row_activity(self, x: np.ndarray) -> np.ndarray:
        if not self.rows:
            return np.zeros(0)
        idx = column_index(self.n1)
        t = np.asarray(self.rows)
        u, v, w = t[:, 0], t[:, 1], t[:, 2]
        return x[idx[u, v]] + x[idx[v, w]] - x[idx[u, w]]


def build_lp(matrix: np.ndarray, state: FixState | None = None) -> LpModel:
    n1 = matrix.shape[0]
    iu, iv = pair_columns(n1)
    cost = (matrix[iu, iv] - matrix[iv, iu]).astype(float)
    constant = float(matrix[iv, iu].sum())
    model = LpModel(n1, cost, constant, np.zeros(len(iu)), np.ones(len(iu)))
    if state is not None:
        model.apply_state(state)
    return model


def _engine_for(model: LpModel, cold: bool = False) -> DualSimplex:
    eng = model._engine
    if eng is None or cold:
        eng = DualSimplex(model.cost, model.lo, model.hi)
        model._engine = eng
    pending = model.rows[eng.m :]
    if pending:
        eng.add_rows(model.row_matrix(pending), 0.0, 1.0)
    eng.set_column_bounds(model.lo, model.hi)
    return eng


def simplex_solve(model: LpModel) -> LpSolution:
    """Solve the current model, warm-starting from the previous basis.

    A numerical breakdown is retried once from a cold basis before
    :class:`NumericalError` propagates.
    """
    model.lp_solves += 1
    if model.num_columns == 0:
        return LpSolution(model.n1, np.zeros(0), model.constant, Status.OPTIMAL)
    try:
        eng = _engine_for(model)
        status = eng.solve()
    except NumericalError:
        eng = _engine_for(model, cold=True)
        status = eng.solve()
    x = eng.structural
    return LpSolution(model.n1, x, float(model.cost @ x) + model.constant, status)


def separate_triangles(x: LpSolution, state: FixState | None = None, max_cuts: int = MAX_CUTS):
    """Violated triangle rows ``(u, v, w)``, ``u < v < w``, most violated first.

    A row is violated when ``x_uv + x_vw - x_uw`` leaves ``[0, 1]`` by more
    than the feasibility tolerance. Fixed pairs read their fixed value.
    """
    n = x.n1
    if n < 3:
        return []
    X = np.zeros((n, n))
    iu, iv = pair_columns(n)
    X[iu, iv] = x.x
    if state is not None:
        ahead = state.before[iu, iv]
        behind = state.before[iv, iu]
        X[iu[ahead], iv[ahead]] = 1.0
        X[iu[behind], iv[behind]] = 0.0
    found = []
    for v in range(1, n - 1):
        val = X[:v, v][:, None] + X[v, v + 1 :][None, :] - X[:v, v + 1 :]
        excess = np.maximum(val - 1.0, -val)
        us, ws = np.nonzero(excess > FEAS_TOL)
        for u, w in zip(us.tolist(), ws.tolist()):
            found.append((float(excess[u, w]), (u, v, v + 1 + w)))
    found.sort(key=lambda item: (-item[0], item[1]))
    return [t for _, t in found[:max_cuts]]


def solve_relaxation(model: LpModel, state: FixState | None = None, max_cuts: int = MAX_CUTS) -> LpSolution:
    """Cutting-plane loop: solve, add violated triangles, repeat until none."""
    if state is not None:
        model.apply_state(state)
        if state.num_free() == 0:
            iu, iv = pair_columns(model.n1)
            x = state.before[iu, iv].astype(float)
            sol = LpSolution(model.n1, x, float(state.fixed_cost), Status.OPTIMAL)
            if separate_triangles(sol, state, 1):
                sol.status = Status.INFEASIBLE
            return sol
    while True:
        sol = simplex_solve(model)
        if not sol.optimal:
            return sol
        cuts = separate_triangles(sol, state, max_cuts)
        if not model.add_triangles(cuts):
            return sol
