"""True objectives f(x; z), feasibility predicates, and feature extraction."""

from __future__ import annotations

import math

import numpy as np

from .. import grids
from ..errors import ConfigError, InfeasibleSolutionError
from .types import (
    Family,
    Instance,
    KnapsackDescriptor,
    PortfolioMINLPDescriptor,
    PortfolioQPDescriptor,
    Sense,
    ShortestPathDescriptor,
    Solution,
    StochasticSPDescriptor,
)

_SQRT2 = math.sqrt(2.0)


def gaussian_cdf(t: float) -> float:
    """Standard normal CDF, accurate to machine precision via erfc."""
    if not math.isfinite(t):
        raise ConfigError(f"gaussian_cdf requires a finite argument, got {t}")
    return 0.5 * math.erfc(-t / _SQRT2)


def _path_indicator(sol: Solution, m: int) -> np.ndarray:
    x = sol.x if sol.x.size else sol.v.astype(np.float64)
    if x.shape != (m,):
        raise ConfigError(f"expected a decision vector of length {m}, got {x.shape}")
    return x


def is_feasible(family: Family, sol: Solution, z, tol: float = 1e-9) -> bool:
    """True iff the decision satisfies all of the family's constraints within tol."""
    if family in (Family.SHORTEST_PATH_LP, Family.STOCHASTIC_SP):
        m = grids.n_edges(z.grid_n)
        x = sol.x if sol.x.size else sol.v.astype(np.float64)
        return x.shape == (m,) and grids.is_unit_path(z.grid_n, x, tol)

    if family is Family.MULTI_KNAPSACK:
        v = sol.v if sol.v.size else np.round(sol.x).astype(np.int8)
        if v.shape != (z.n_items,):
            return False
        raw = sol.v if sol.v.size else sol.x
        if np.any(np.abs(raw - v) > tol):
            return False
        return bool(np.all(z.weights @ v <= z.capacities + tol))

    if family is Family.PORTFOLIO_QP:
        x = sol.x
        if x.shape != (z.n_assets,):
            return False
        return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol)

    if family is Family.PORTFOLIO_MINLP:
        x, v = sol.x, sol.v
        k = z.n_assets
        if x.shape != (k,) or v.shape != (k,):
            return False
        if abs(x.sum() - 1.0) > tol or np.any(x < -tol):
            return False
        sel = v.astype(bool)
        if np.any(x[~sel] > tol):
            return False
        if np.any(x[sel] < z.f_min - tol) or np.any(x[sel] > z.f_max + tol):
            return False
        n_sel = int(sel.sum())
        return z.min_assets <= n_sel <= z.max_assets

    raise ConfigError(f"unknown family {family}")


def eval_objective(family: Family, sol: Solution, z, tol: float = 1e-9) -> float:
    """True objective in the family's natural sense.

    Maximize families (stochastic shortest path, knapsack in value form)
    return the quantity to maximize; training code negates internally.
    Raises if the solution is infeasible -- objectives are never evaluated
    silently on garbage decisions.
    """
    if not is_feasible(family, sol, z, tol):
        raise InfeasibleSolutionError(f"solution infeasible for {family.value}")

    if family is Family.SHORTEST_PATH_LP:
        x = _path_indicator(sol, grids.n_edges(z.grid_n))
        return float(z.costs @ x)

    if family is Family.MULTI_KNAPSACK:
        v = sol.v if sol.v.size else np.round(sol.x)
        return float(z.values @ v)

    if family is Family.STOCHASTIC_SP:
        x = _path_indicator(sol, grids.n_edges(z.grid_n))
        total_mu = float(z.mu @ x)
        total_var = float(z.sigma @ x)
        if total_var <= 0.0:
            # limit of the CDF as the variance vanishes
            return 1.0 if total_mu <= z.deadline else 0.0
        return gaussian_cdf((z.deadline - total_mu) / math.sqrt(total_var))

    if family is Family.PORTFOLIO_QP:
        x = sol.x
        return float(z.risk_weight * (x @ z.cov @ x) - z.mu @ x)

    if family is Family.PORTFOLIO_MINLP:
        x = sol.x
        quad = float(x @ z.cov @ x)
        cubic = float(np.einsum("ijk,i,j,k->", z.coskew, x, x, x))
        turnover = float(np.abs(x - z.x0).sum())
        return (
            z.risk_weight * quad
            + z.turnover_weight * turnover
            - float(z.mu @ x)
            - z.skew_weight * cubic
        )

    raise ConfigError(f"unknown family {family}")


def to_internal(family: Family, value: float) -> float:
    """Map a natural-sense objective to the internal minimize convention."""
    return -value if family.sense is Sense.MAXIMIZE else value


def from_internal(family: Family, value: float) -> float:
    return -value if family.sense is Sense.MAXIMIZE else value


def cost_dim(family: Family, z) -> int:
    """Dimension of the surrogate cost vector the solver consumes."""
    if family in (Family.SHORTEST_PATH_LP, Family.STOCHASTIC_SP):
        return grids.n_edges(z.grid_n)
    if family is Family.MULTI_KNAPSACK:
        return z.n_items
    return z.n_assets


def cost_vector(family: Family, z) -> np.ndarray:
    """Ground-truth cost block: the regression target for two-stage fitting."""
    if family is Family.SHORTEST_PATH_LP:
        return np.asarray(z.costs)
    if family is Family.MULTI_KNAPSACK:
        return np.asarray(z.values)
    if family is Family.STOCHASTIC_SP:
        return np.asarray(z.mu)
    if family in (Family.PORTFOLIO_QP, Family.PORTFOLIO_MINLP):
        return np.asarray(z.mu)
    raise ConfigError(f"unknown family {family}")


def context_features(family: Family, z) -> np.ndarray:
    """Per-instance context fed to the landscape surrogate alongside costs.

    Kept compact on purpose: the predictable cost block, plus variance and
    deadline information for the stochastic shortest path (whose features
    are its full description).
    """
    if family is Family.STOCHASTIC_SP:
        return np.concatenate([z.mu, z.sigma, [z.deadline]])
    return cost_vector(family, z)


def observed_features(family: Family, z) -> np.ndarray:
    """The y vector for fully-observed families (y = z)."""
    if not family.fully_observed:
        raise ConfigError(f"{family.value} is a partial-information family")
    if family is Family.STOCHASTIC_SP:
        return np.concatenate([z.mu, z.sigma, [z.deadline]])
    return np.asarray(z.mu)
