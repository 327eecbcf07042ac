"""Exact desk-scale solvers, brute-force oracles, and call accounting."""

from .dispatch import SolverStats, solve_family
from .knapsack import solve_multiknapsack
from .oracle import MAX_ENUMERATIONS, brute_force_oracle
from .shortest_path import solve_dag_shortest_path
from .simplex_qp import kkt_residual, project_to_simplex, solve_portfolio_qp
from .support_milp import fill_support, solve_portfolio_milp, support_size_range

__all__ = [
    "SolverStats",
    "solve_family",
    "solve_multiknapsack",
    "MAX_ENUMERATIONS",
    "brute_force_oracle",
    "solve_dag_shortest_path",
    "kkt_residual",
    "project_to_simplex",
    "solve_portfolio_qp",
    "fill_support",
    "solve_portfolio_milp",
    "support_size_range",
]
