"""Exact and heuristic solvers for one-sided crossing minimization."""

from .bnb import SolveReport, solve_exact, solve_heuristic
from .config import SolverConfig
from .crossings import count_crossings, crossing_matrix, order_cost, pair_lower_bound
from .model import Instance, Solution, parse_instance, write_solution

__all__ = [
    "Instance",
    "Solution",
    "SolveReport",
    "SolverConfig",
    "count_crossings",
    "crossing_matrix",
    "order_cost",
    "pair_lower_bound",
    "parse_instance",
    "solve_exact",
    "solve_heuristic",
    "write_solution",
]
