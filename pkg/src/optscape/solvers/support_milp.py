"""Exact linear-cost solve over the combinatorial portfolio constraint set.

Minimizes ``c @ x`` subject to: allocations sum to one; every selected
fraction lies in [f_min, f_max]; the number of selected assets lies in
[min_assets, max_assets]; unselected assets get exactly zero. Feasible
support sizes s satisfy ``s * f_min <= 1 <= s * f_max``, so the solver
enumerates supports of each admissible size (lexicographic order) and
fills each one greedily: every member starts at f_min and the remaining
mass pours into ascending-cost members up to f_max, which is the exact
optimum of the one-constraint inner LP. Ties keep the first (smallest
size, lexicographically smallest) support.
"""

from __future__ import annotations

import math
from itertools import combinations

import numpy as np

from ..errors import ConfigError
from ..problems.types import PortfolioMINLPDescriptor, Solution

MAX_ASSETS_EXACT = 20


def support_size_range(z: PortfolioMINLPDescriptor) -> tuple[int, int]:
    """Admissible support sizes; raises when no size is feasible."""
    s_min = max(z.min_assets, math.ceil(1.0 / z.f_max - 1e-12))
    s_max = min(z.max_assets, math.floor(1.0 / z.f_min + 1e-12), z.n_assets)
    if s_min > s_max:
        raise ConfigError(
            f"no feasible support size: need {s_min} <= s <= {s_max} given "
            f"f_min={z.f_min}, f_max={z.f_max}, assets in [{z.min_assets}, {z.max_assets}]"
        )
    return s_min, s_max


def fill_support(c: np.ndarray, support, f_min: float, f_max: float) -> np.ndarray:
    """Exact inner-LP fill of a fixed support: f_min for all, pour the rest
    into ascending-cost members up to f_max."""
    k = c.size
    support = np.asarray(support, dtype=np.int64)
    x = np.zeros(k)
    x[support] = f_min
    residual = 1.0 - f_min * support.size
    for i in support[np.argsort(c[support], kind="stable")]:
        if residual <= 0.0:
            break
        add = min(f_max - f_min, residual)
        x[i] += add
        residual -= add
    return x


def solve_portfolio_milp(c, z: PortfolioMINLPDescriptor) -> Solution:
    """Global exact optimum of the linear surrogate over the portfolio set."""
    c = np.asarray(c, dtype=np.float64)
    k = z.n_assets
    if c.shape != (k,):
        raise ConfigError(f"cost vector must have length {k}, got {c.shape}")
    if k > MAX_ASSETS_EXACT:
        raise ConfigError(
            f"exact support enumeration is capped at {MAX_ASSETS_EXACT} assets; "
            f"got {k} -- reduce the instance size"
        )
    s_min, s_max = support_size_range(z)
    best_x = None
    best_obj = np.inf
    best_support = None
    for s in range(s_min, s_max + 1):
        for support in combinations(range(k), s):
            x = fill_support(c, support, z.f_min, z.f_max)
            obj = float(c @ x)
            if obj < best_obj:
                best_obj = obj
                best_x = x
                best_support = support
    v = np.zeros(k, dtype=np.int8)
    v[list(best_support)] = 1
    return Solution(x=best_x, v=v, objective_surrogate=best_obj)
