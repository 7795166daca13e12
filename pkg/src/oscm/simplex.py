"""Bounded-variable dual simplex with a dense explicit basis inverse.

Solves ``min c.x`` subject to ``row_lo <= A x <= row_hi`` and
``lo <= x <= hi`` where every bound is finite. Each row gets one slack
``s_i = a_i . x`` carrying the row's two-sided bounds, giving the equality
system ``A x - s = 0`` over ``n + m`` boxed variables.

With all variables boxed, any basis is made dual feasible by placing each
nonbasic variable at the bound matching the sign of its reduced cost, so no
phase 1 is needed: the all-slack basis is a valid start, and added rows or
changed bounds are absorbed by further dual pivots (warm start).
"""

from __future__ import annotations

import enum
import logging

import numpy as np

log = logging.getLogger(__name__)

PRIMAL_TOL = 1e-7
DUAL_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 64
BLAND_AFTER = 100


class Status(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


class NumericalError(RuntimeError):
    pass


class DualSimplex:
    def __init__(self, cost, lo, hi, max_iter: int = 100_000):
        self.n = len(cost)
        self.m = 0
        self.cost = np.asarray(cost, dtype=float).copy()
        self.lo = np.asarray(lo, dtype=float).copy()
        self.hi = np.asarray(hi, dtype=float).copy()
        if np.any(self.lo > self.hi):
            raise ValueError("lower bound above upper bound")
        self.A = np.zeros((0, self.n))
        self.basis = np.zeros(0, dtype=np.int64)
        self.is_basic = np.zeros(self.n, dtype=bool)
        self.at_upper = self.cost < 0
        self.binv = np.zeros((0, 0))
        self.max_iter = max_iter
        self.iterations = 0
        self.pivots_since_refactor = 0
        self.certificate: int | None = None
        self.x = np.where(self.at_upper, self.hi, self.lo)

    # -- model edits -------------------------------------------------------

    def add_rows(self, rows, row_lo, row_hi) -> None:
        rows = np.atleast_2d(np.asarray(rows, dtype=float))
        k = rows.shape[0]
        if k == 0:
            return
        if rows.shape[1] != self.n:
            raise ValueError("row width does not match the number of columns")
        row_lo = np.broadcast_to(np.asarray(row_lo, dtype=float), (k,))
        row_hi = np.broadcast_to(np.asarray(row_hi, dtype=float), (k,))
        m = self.m
        basis_cols = self._columns(self.basis, rows_only=rows)
        # new slacks enter the basis: [[B, 0], [R, -I]]^-1 = [[Binv, 0], [R Binv, -I]]
        binv = np.zeros((m + k, m + k))
        binv[:m, :m] = self.binv
        binv[m:, :m] = basis_cols @ self.binv
        binv[m:, m:] = -np.eye(k)
        self.binv = binv
        self.A = np.vstack([self.A, rows])
        self.lo = np.concatenate([self.lo, row_lo])
        self.hi = np.concatenate([self.hi, row_hi])
        self.cost = np.concatenate([self.cost, np.zeros(k)])
        self.is_basic = np.concatenate([self.is_basic, np.ones(k, dtype=bool)])
        self.at_upper = np.concatenate([self.at_upper, np.zeros(k, dtype=bool)])
        self.basis = np.concatenate([self.basis, np.arange(self.n + m, self.n + m + k)])
        self.m = m + k

    def set_bounds(self, j: int, lo: float, hi: float) -> None:
        if lo > hi:
            raise ValueError("lower bound above upper bound")
        self.lo[j] = lo
        self.hi[j] = hi

    def set_column_bounds(self, lo, hi) -> None:
        lo = np.asarray(lo, dtype=float)
        hi = np.asarray(hi, dtype=float)
        if np.any(lo > hi):
            raise ValueError("lower bound above upper bound")
        self.lo[: self.n] = lo
        self.hi[: self.n] = hi

    # -- linear algebra helpers ---------------------------------------------

    def _columns(self, idx, rows_only=None) -> np.ndarray:
        """Columns of ``[A, -I]`` for variable indices ``idx``."""
        A = self.A if rows_only is None else rows_only
        out = np.zeros((A.shape[0], len(idx)))
        idx = np.asarray(idx, dtype=np.int64)
        struct = idx < self.n
        out[:, struct] = A[:, idx[struct]]
        if rows_only is None:
            slack_pos = np.flatnonzero(~struct)
            out[idx[~struct] - self.n, slack_pos] = -1.0
        return out

    def _refactor(self) -> None:
        if self.m == 0:
            self.binv = np.zeros((0, 0))
        else:
            B = self._columns(self.basis)
            try:
                self.binv = np.linalg.inv(B)
            except np.linalg.LinAlgError as exc:
                raise NumericalError("singular basis") from exc
            if not np.all(np.isfinite(self.binv)):
                raise NumericalError("non-finite basis inverse")
        self.pivots_since_refactor = 0

    def _row_times_matrix(self, y) -> np.ndarray:
        """``y @ [A, -I]``."""
        return np.concatenate([y @ self.A, -y])

    def _primal(self) -> np.ndarray:
        x = np.where(self.at_upper, self.hi, self.lo)
        x[self.basis] = 0.0
        rhs = self.A @ x[: self.n] - x[self.n :]
        x[self.basis] = -(self.binv @ rhs)
        return x

    # -- solve ---------------------------------------------------------------

    def solve(self) -> Status:
        self._refactor()
        degenerate = 0
        bland = False
        self.certificate = None
        nonbasic_fixed = self.lo >= self.hi
        for _ in range(self.max_iter):
            if self.pivots_since_refactor >= REFACTOR_EVERY:
                self._refactor()
            y = self.cost[self.basis] @ self.binv if self.m else np.zeros(0)
            d = self.cost - self._row_times_matrix(y)
            d[self.basis] = 0.0
            # keep dual feasibility by moving nonbasics to the sign-matching bound
            self.at_upper = np.where(d < -DUAL_TOL, True, np.where(d > DUAL_TOL, False, self.at_upper))
            self.at_upper[self.is_basic] = False
            x = self._primal()
            self.x = x
            if self.m == 0:
                return Status.OPTIMAL
            xb = x[self.basis]
            lo_b = self.lo[self.basis]
            hi_b = self.hi[self.basis]
            viol = np.maximum(lo_b - xb, xb - hi_b)
            infeasible = viol > PRIMAL_TOL
            if not infeasible.any():
                return Status.OPTIMAL
            if bland:
                cand = np.flatnonzero(infeasible)
                r = int(cand[np.argmin(self.basis[cand])])
            else:
                r = int(np.argmax(viol))
            below = xb[r] < lo_b[r]
            alpha = self._row_times_matrix(self.binv[r])
            nonbasic_fixed = self.lo >= self.hi
            movable = ~self.is_basic & ~nonbasic_fixed
            at_up = self.at_upper
            if below:
                elig = movable & (((~at_up) & (alpha < -PIVOT_TOL)) | (at_up & (alpha > PIVOT_TOL)))
            else:
                elig = movable & (((~at_up) & (alpha > PIVOT_TOL)) | (at_up & (alpha < -PIVOT_TOL)))
            if not elig.any():
                self.certificate = int(self.basis[r])
                return Status.INFEASIBLE
            cand = np.flatnonzero(elig)
            ratios = np.abs(d[cand]) / np.abs(alpha[cand])
            best = ratios.min()
            ties = cand[ratios <= best + 1e-12]
            if bland:
                q = int(ties.min())
            else:
                q = int(ties[np.argmax(np.abs(alpha[ties]))])
            if best <= 1e-12:
                degenerate += 1
                if degenerate >= BLAND_AFTER and not bland:
                    log.debug("switching to Bland's rule after %d degenerate pivots", degenerate)
                    bland = True
            self._pivot(r, q, leave_upper=not below)
        raise NumericalError(f"no convergence within {self.max_iter} dual simplex iterations")

    def _pivot(self, r: int, q: int, leave_upper: bool) -> None:
        col = self.binv @ self._columns([q])[:, 0]
        piv = col[r]
        if abs(piv) < PIVOT_TOL:
            raise NumericalError("vanishing pivot element")
        leaving = int(self.basis[r])
        row_r = self.binv[r] / piv
        self.binv -= np.outer(col, row_r)
        self.binv[r] = row_r
        self.basis[r] = q
        self.is_basic[q] = True
        self.is_basic[leaving] = False
        self.at_upper[q] = False
        self.at_upper[leaving] = leave_upper
        self.iterations += 1
        self.pivots_since_refactor += 1

    # -- results ---------------------------------------------------------------

    @property
    def structural(self) -> np.ndarray:
        return np.clip(self.x[: self.n], self.lo[: self.n], self.hi[: self.n])

    def objective(self) -> float:
        return float(self.cost[: self.n] @ self.structural)

    def reduced_costs(self) -> np.ndarray:
        y = self.cost[self.basis] @ self.binv if self.m else np.zeros(0)
        d = self.cost - self._row_times_matrix(y)
        d[self.basis] = 0.0
        return d
