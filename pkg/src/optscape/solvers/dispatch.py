"""Family dispatch for the learnable solver plus call-count instrumentation."""

from __future__ import annotations

import threading
import time

import numpy as np

from ..errors import ConfigError
from ..problems.types import Family, Solution
from .knapsack import solve_multiknapsack
from .shortest_path import solve_dag_shortest_path
from .simplex_qp import solve_portfolio_qp
from .support_milp import solve_portfolio_milp


class SolverStats:
    """Thread-safe counter of solver invocations and their wall times.

    Training-loop accounting relies on this being incremented exactly once
    per ``solve_family`` call; brute-force oracles never touch it.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self.call_count = 0
        self.wall_time_total = 0.0
        self.per_call_times: list[float] = []

    def record(self, seconds: float) -> None:
        with self._lock:
            self.call_count += 1
            self.wall_time_total += seconds
            self.per_call_times.append(seconds)

    def merge(self, other: "SolverStats") -> None:
        with self._lock:
            self.call_count += other.call_count
            self.wall_time_total += other.wall_time_total
            self.per_call_times.extend(other.per_call_times)


def solve_family(family: Family, c, z, stats: SolverStats | None = None) -> Solution:
    """Exact family-appropriate solve of the linear/quadratic surrogate.

    For the path families this is a shortest path under c; for the knapsack
    c plays the item values; for the quadratic portfolio c plays the
    predicted returns against the descriptor's covariance; for the
    combinatorial portfolio c is the linear surrogate cost. Increments
    ``stats`` by exactly one call.
    """
    c = np.asarray(c, dtype=np.float64)
    t0 = time.perf_counter()
    if family is Family.SHORTEST_PATH_LP:
        sol = solve_dag_shortest_path(z.grid_n, c)
    elif family is Family.STOCHASTIC_SP:
        sol = solve_dag_shortest_path(z.grid_n, c)
    elif family is Family.MULTI_KNAPSACK:
        sol = solve_multiknapsack(c, z.weights, z.capacities)
    elif family is Family.PORTFOLIO_QP:
        sol = solve_portfolio_qp(c, z.cov, z.risk_weight)
    elif family is Family.PORTFOLIO_MINLP:
        sol = solve_portfolio_milp(c, z)
    else:
        raise ConfigError(f"unknown family {family}")
    if stats is not None:
        stats.record(time.perf_counter() - t0)
    return sol
