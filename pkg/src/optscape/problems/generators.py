"""Synthetic dataset generators for the five benchmark families.

Every generator is a pure function of its arguments and seed: calling it
twice with the same inputs produces bit-identical datasets.
"""

from __future__ import annotations

import numpy as np

from .. import grids
from ..errors import ConfigError
from .types import (
    Dataset,
    Family,
    Instance,
    KnapsackDescriptor,
    PortfolioMINLPDescriptor,
    PortfolioQPDescriptor,
    ShortestPathDescriptor,
    StochasticSPDescriptor,
)

DEADLINE_FACTORS = {"tight": 0.9, "normal": 1.0, "loose": 1.1}


def gen_shortest_path_dataset(
    grid_n: int = 5,
    n_instances: int = 1000,
    feat_dim: int = 5,
    poly_deg: int = 6,
    noise_halfwidth: float = 0.5,
    seed: int = 0,
) -> Dataset:
    """Grid shortest-path instances with polynomially-lifted linear features.

    Features y are standard normal. Ground-truth edge costs are
    ``(((B y)_j / sqrt(feat_dim) + 3)^poly_deg / 3.5^poly_deg + 1) * eps_j``
    with B a fixed +-1 matrix shared across the dataset and eps uniform on
    [1 - noise_halfwidth, 1 + noise_halfwidth].
    """
    if grid_n < 2 or feat_dim < 1 or n_instances < 1:
        raise ConfigError("need grid_n >= 2, feat_dim >= 1, n_instances >= 1")
    rng = np.random.default_rng(seed)
    m = grids.n_edges(grid_n)
    projection = rng.choice([-1.0, 1.0], size=(m, feat_dim))
    instances = []
    for _ in range(n_instances):
        y = rng.standard_normal(feat_dim)
        base = projection @ y / np.sqrt(feat_dim) + 3.0
        costs = (base**poly_deg / 3.5**poly_deg + 1.0)
        costs = costs * rng.uniform(1.0 - noise_halfwidth, 1.0 + noise_halfwidth, size=m)
        instances.append(Instance(y=y, z=ShortestPathDescriptor(grid_n=grid_n, costs=costs)))
    params = dict(
        grid_n=grid_n,
        n_instances=n_instances,
        feat_dim=feat_dim,
        poly_deg=poly_deg,
        noise_halfwidth=noise_halfwidth,
    )
    return Dataset(Family.SHORTEST_PATH_LP, seed, tuple(instances), {"name": "shortest_path", **params})


def gen_knapsack_dataset(
    n_items: int = 100,
    dims: int = 5,
    capacity: float = 40.0,
    feat_dim: int = 256,
    hidden: int = 500,
    n_instances: int = 1000,
    seed: int = 0,
) -> Dataset:
    """Multidimensional knapsack instances with random-network features.

    Item values are uniform on (0, 5) per instance; weights are uniform on
    (0, 1) and shared across the dataset, as is the scalar capacity
    replicated over all dimensions. Features come from one fixed randomly
    initialized tanh network with a single hidden layer applied to the
    value vector.
    """
    if n_items < 1 or dims < 1 or n_instances < 1 or feat_dim < 1 or hidden < 1:
        raise ConfigError("knapsack generator sizes must be positive")
    rng = np.random.default_rng(seed)
    weights = rng.uniform(0.0, 1.0, size=(dims, n_items))
    capacities = np.full(dims, float(capacity))
    w1 = rng.standard_normal((hidden, n_items)) / np.sqrt(n_items)
    w2 = rng.standard_normal((feat_dim, hidden)) / np.sqrt(hidden)
    instances = []
    for _ in range(n_instances):
        values = rng.uniform(0.0, 5.0, size=n_items)
        y = w2 @ np.tanh(w1 @ values)
        z = KnapsackDescriptor(values=values, weights=weights, capacities=capacities)
        instances.append(Instance(y=y, z=z))
    params = dict(
        n_items=n_items,
        dims=dims,
        capacity=capacity,
        feat_dim=feat_dim,
        hidden=hidden,
        n_instances=n_instances,
    )
    return Dataset(Family.MULTI_KNAPSACK, seed, tuple(instances), {"name": "knapsack", **params})


def gen_stochastic_sp_instance(
    grid_n: int = 5, deadline_mode: str = "normal", seed: int = 0
) -> Instance:
    """One stochastic shortest-path instance; fully observed (y = z).

    Edge means are uniform on [0.1, 0.2]; edge variances are
    u * (1 - mu) with u uniform on [0.1, 0.3]. The deadline is the
    mean-weighted shortest-path length scaled by 0.9 / 1.0 / 1.1 for
    tight / normal / loose modes.
    """
    if deadline_mode not in DEADLINE_FACTORS:
        raise ConfigError(f"deadline_mode must be one of {sorted(DEADLINE_FACTORS)}")
    rng = np.random.default_rng(seed)
    m = grids.n_edges(grid_n)
    mu = rng.uniform(0.1, 0.2, size=m)
    sigma = rng.uniform(0.1, 0.3, size=m) * (1.0 - mu)
    _, sp_len = grids.shortest_path_dp(grid_n, mu)
    deadline = DEADLINE_FACTORS[deadline_mode] * sp_len
    z = StochasticSPDescriptor(grid_n=grid_n, mu=mu, sigma=sigma, deadline=deadline)
    y = np.concatenate([mu, sigma, [deadline]])
    return Instance(y=y, z=z)


def gen_stochastic_sp_dataset(
    grid_n: int = 5,
    n_instances: int = 25,
    deadline_mode: str = "normal",
    seed: int = 0,
) -> Dataset:
    """A collection of independent stochastic shortest-path instances."""
    if n_instances < 1:
        raise ConfigError("n_instances must be >= 1")
    child_seeds = np.random.SeedSequence(seed).spawn(n_instances)
    instances = tuple(
        gen_stochastic_sp_instance(grid_n, deadline_mode, seed=s) for s in child_seeds
    )
    params = dict(grid_n=grid_n, n_instances=n_instances, deadline_mode=deadline_mode)
    return Dataset(Family.STOCHASTIC_SP, seed, instances, {"name": "stochastic_sp", **params})


def _sample_returns(rng, k: int, history_len: int, n_factors: int = 3):
    loadings = rng.normal(0.0, 0.1, size=(k, n_factors))
    drift = 0.05 * rng.standard_normal(n_factors)
    factors = drift + rng.standard_normal((history_len, n_factors))
    noise = 0.05 * rng.standard_normal((history_len, k))
    history = factors @ loadings.T + noise
    future_mu = loadings @ drift + 0.01 * rng.standard_normal(k)
    return history, future_mu


def gen_portfolio_dataset(
    k: int = 10,
    n_instances: int = 100,
    history_len: int = 40,
    obs_steps: int = 8,
    with_coskewness: bool = False,
    seed: int = 0,
    risk_weight: float = 0.1,
    skew_weight: float = 0.5,
    turnover_weight: float = 0.01,
    f_min: float = 0.01,
    f_max: float = 0.2,
    min_assets: int = 3,
    max_assets: int = 10,
) -> Dataset:
    """Synthetic market from a three-factor model with per-instance drift.

    Returns follow r_t = B f_t + 0.05 eta_t. Features y are the flattened
    trailing obs_steps rows of the return history; z carries the future
    mean, the sample covariance of the history, and optionally the sample
    co-skewness tensor plus the combinatorial-portfolio parameters.
    """
    if k < 2 or n_instances < 1 or obs_steps < 1 or history_len < obs_steps:
        raise ConfigError("need k >= 2, n_instances >= 1, history_len >= obs_steps >= 1")
    if with_coskewness and history_len < k + 1:
        raise ConfigError("co-skewness needs history_len >= k + 1")
    rng = np.random.default_rng(seed)
    family = Family.PORTFOLIO_MINLP if with_coskewness else Family.PORTFOLIO_QP
    instances = []
    for _ in range(n_instances):
        history, mu = _sample_returns(rng, k, history_len)
        centered = history - history.mean(axis=0)
        cov = centered.T @ centered / history_len
        y = history[-obs_steps:].ravel()
        if with_coskewness:
            coskew = np.einsum("ti,tj,tk->ijk", centered, centered, centered) / history_len
            x0 = rng.uniform(0.0, 1.0, size=k)
            x0 = x0 / x0.sum()
            z = PortfolioMINLPDescriptor(
                mu=mu,
                cov=cov,
                coskew=coskew,
                x0=x0,
                risk_weight=risk_weight,
                skew_weight=skew_weight,
                turnover_weight=turnover_weight,
                f_min=f_min,
                f_max=f_max,
                min_assets=min_assets,
                max_assets=min(max_assets, k),
            )
        else:
            z = PortfolioQPDescriptor(mu=mu, cov=cov, risk_weight=risk_weight)
        instances.append(Instance(y=y, z=z))
    params = dict(
        k=k,
        n_instances=n_instances,
        history_len=history_len,
        obs_steps=obs_steps,
        with_coskewness=with_coskewness,
        risk_weight=risk_weight,
    )
    if with_coskewness:
        params.update(
            skew_weight=skew_weight,
            turnover_weight=turnover_weight,
            f_min=f_min,
            f_max=f_max,
            min_assets=min_assets,
            max_assets=min(max_assets, k),
        )
    return Dataset(family, seed, tuple(instances), {"name": "portfolio", **params})


GENERATORS = {
    "shortest_path": gen_shortest_path_dataset,
    "knapsack": gen_knapsack_dataset,
    "stochastic_sp": gen_stochastic_sp_dataset,
    "portfolio": gen_portfolio_dataset,
}
