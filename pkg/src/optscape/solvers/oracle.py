"""Exhaustive-search oracles for desk-scale verification.

These never touch SolverStats: they exist to certify the fast solvers and
to provide true-optimum references for regret metrics. Each refuses
instances whose enumeration would exceed ``MAX_ENUMERATIONS`` candidates.
"""

from __future__ import annotations

from itertools import combinations
from math import comb

import numpy as np

from .. import grids
from ..errors import ConfigError
from ..problems.objectives import eval_objective
from ..problems.types import Family, Solution
from .support_milp import support_size_range

MAX_ENUMERATIONS = 2**20


def _guard(count: int, what: str) -> None:
    if count > MAX_ENUMERATIONS:
        raise ConfigError(
            f"{what} would enumerate {count} candidates (> {MAX_ENUMERATIONS}); refusing"
        )


def _best_path(grid_n: int, score, minimize: bool) -> tuple[np.ndarray, float]:
    _guard(grids.n_paths(grid_n), "path enumeration")
    best_vec, best_val = None, None
    for vec in grids.enumerate_paths(grid_n):
        val = score(vec)
        if best_val is None or (val < best_val if minimize else val > best_val):
            best_val, best_vec = val, vec
    return best_vec.astype(np.float64), float(best_val)


def _minlp_vertex_values(c_sub: np.ndarray, f_min: float, f_max: float) -> float:
    """Minimum of c_sub @ x over the box-simplex slice by full vertex enumeration.

    Vertices put every coordinate but one at a bound; the free coordinate
    absorbs the remaining mass. All choices of the bound pattern are
    enumerated explicitly, independent of the greedy fill used by the
    production solver.
    """
    s = c_sub.size
    if s == 1:
        return float(c_sub[0]) if f_min - 1e-12 <= 1.0 <= f_max + 1e-12 else np.inf
    others = np.arange(s)
    masks = np.array([[bool(b >> i & 1) for i in range(s - 1)] for b in range(2 ** (s - 1))])
    best = np.inf
    for j in range(s):
        rest = np.delete(others, j)
        # mass at bounds: f_max where mask, f_min elsewhere
        bound_mass = masks @ (np.full(s - 1, f_max - f_min)) + f_min * (s - 1)
        free = 1.0 - bound_mass
        valid = (free >= f_min - 1e-12) & (free <= f_max + 1e-12)
        if not np.any(valid):
            continue
        cost_rest = masks[valid] @ (c_sub[rest] * (f_max - f_min)) + f_min * c_sub[rest].sum()
        vals = cost_rest + free[valid] * c_sub[j]
        best = min(best, float(vals.min()))
    return best


def brute_force_oracle(family: Family, z, c=None) -> Solution:
    """Exact optimum by exhaustive enumeration.

    With ``c`` given, optimizes the linear surrogate ``c @ x`` like the
    production solvers. With ``c=None``, optimizes the family's true
    objective where that is enumerable (paths and item subsets); the
    quadratic and cubic portfolios require an explicit c.
    """
    if family is Family.SHORTEST_PATH_LP:
        costs = np.asarray(c if c is not None else z.costs, dtype=np.float64)
        vec, val = _best_path(z.grid_n, lambda p: float(costs @ p), minimize=True)
        return Solution(x=vec, v=np.zeros(0, dtype=np.int8), objective_surrogate=val)

    if family is Family.STOCHASTIC_SP:
        if c is not None:
            costs = np.asarray(c, dtype=np.float64)
            vec, val = _best_path(z.grid_n, lambda p: float(costs @ p), minimize=True)
        else:
            def true_obj(p):
                sol = Solution(x=p.astype(np.float64), v=np.zeros(0, dtype=np.int8),
                               objective_surrogate=0.0)
                return eval_objective(family, sol, z)

            vec, val = _best_path(z.grid_n, true_obj, minimize=False)
        return Solution(x=vec, v=np.zeros(0, dtype=np.int8), objective_surrogate=val)

    if family is Family.MULTI_KNAPSACK:
        values = np.asarray(c if c is not None else z.values, dtype=np.float64)
        k = z.n_items
        _guard(2**k, "subset enumeration")
        ints = np.arange(2**k, dtype=np.uint64)
        subsets = (ints[:, None] >> np.arange(k, dtype=np.uint64)) & 1
        subsets = subsets.astype(np.float64)
        feasible = np.all(subsets @ z.weights.T <= z.capacities + 1e-12, axis=1)
        totals = np.where(feasible, subsets @ values, -np.inf)
        best = int(np.argmax(totals))
        v = subsets[best].astype(np.int8)
        return Solution(x=np.zeros(0), v=v, objective_surrogate=float(values @ subsets[best]))

    if family is Family.PORTFOLIO_MINLP:
        if c is None:
            raise ConfigError("the combinatorial portfolio oracle needs an explicit cost vector")
        c = np.asarray(c, dtype=np.float64)
        s_min, s_max = support_size_range(z)
        total = sum(
            comb(z.n_assets, s) * s * 2 ** (s - 1) for s in range(s_min, s_max + 1)
        )
        _guard(total, "support-vertex enumeration")
        best_val = np.inf
        best_support = None
        for s in range(s_min, s_max + 1):
            for support in combinations(range(z.n_assets), s):
                val = _minlp_vertex_values(c[list(support)], z.f_min, z.f_max)
                if val < best_val:
                    best_val = val
                    best_support = support
        # reconstruct a matching allocation with the production fill rule
        from .support_milp import fill_support

        x = fill_support(c, best_support, z.f_min, z.f_max)
        v = np.zeros(z.n_assets, dtype=np.int8)
        v[list(best_support)] = 1
        return Solution(x=x, v=v, objective_surrogate=best_val)

    raise ConfigError(f"no brute-force oracle for family {family}")
