from __future__ import annotations

from dataclasses import dataclass


@dataclass
class SolverConfig:
    seed: int = 0
    time_limit: float | None = None  # seconds
    window: int = 20  # local search window width
    restarts: int = 64  # probabilistic median draws in the portfolio
    rr_trials: int = 32  # randomized rounding tournaments per call
    rr_every: int = 16  # run randomized rounding every k-th node
    rins_node_limit: int = 10_000
    max_cuts: int = 500  # triangle rows added per separation round
    local_search: bool = True
