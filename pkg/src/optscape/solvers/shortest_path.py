"""Exact shortest path on the directed acyclic grid."""

from __future__ import annotations

import numpy as np

from .. import grids
from ..problems.types import Solution


def solve_dag_shortest_path(grid_n: int, costs) -> Solution:
    """Minimum-cost source-to-sink path under arbitrary-sign edge costs."""
    indicator, cost = grids.shortest_path_dp(grid_n, np.asarray(costs, dtype=np.float64))
    return Solution(x=indicator, v=np.zeros(0, dtype=np.int8), objective_surrogate=cost)
