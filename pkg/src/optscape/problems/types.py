"""Domain types: problem families, descriptors, instances, datasets, solutions.

Everything here is immutable after construction; numpy payloads are marked
read-only so instances can be shared freely across worker threads.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Union

import numpy as np

from .. import grids
from ..errors import ConfigError


class Sense(Enum):
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"


class Family(str, Enum):
    """The five supported benchmark problem families."""

    SHORTEST_PATH_LP = "shortest_path_lp"
    MULTI_KNAPSACK = "multi_knapsack"
    STOCHASTIC_SP = "stochastic_sp"
    PORTFOLIO_QP = "portfolio_qp"
    PORTFOLIO_MINLP = "portfolio_minlp"

    @property
    def sense(self) -> Sense:
        if self in (Family.STOCHASTIC_SP, Family.MULTI_KNAPSACK):
            return Sense.MAXIMIZE
        return Sense.MINIMIZE

    @property
    def fully_observed(self) -> bool:
        """True for families where features equal the full description (y = z)."""
        return self in (Family.STOCHASTIC_SP, Family.PORTFOLIO_MINLP)


def _ro(a, dtype=np.float64) -> np.ndarray:
    arr = np.array(a, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class ShortestPathDescriptor:
    """Edge costs on the directed n-by-n grid (canonical edge order)."""

    grid_n: int
    costs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "costs", _ro(self.costs))
        if self.costs.shape != (grids.n_edges(self.grid_n),):
            raise ConfigError(
                f"expected {grids.n_edges(self.grid_n)} edge costs for a "
                f"{self.grid_n}x{self.grid_n} grid, got {self.costs.shape}"
            )


@dataclass(frozen=True)
class KnapsackDescriptor:
    """Item values (k,), weights (d, k), capacities (d,)."""

    values: np.ndarray
    weights: np.ndarray
    capacities: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _ro(self.values))
        object.__setattr__(self, "weights", _ro(self.weights))
        object.__setattr__(self, "capacities", _ro(self.capacities))
        d, k = self.weights.shape
        if self.values.shape != (k,) or self.capacities.shape != (d,):
            raise ConfigError(
                f"inconsistent knapsack shapes: values {self.values.shape}, "
                f"weights {self.weights.shape}, capacities {self.capacities.shape}"
            )

    @property
    def n_items(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class StochasticSPDescriptor:
    """Per-edge mean and variance of Gaussian edge weights, plus a deadline.

    ``sigma`` is the per-edge *variance*: the path objective divides by the
    square root of the plain sum of selected sigma entries.
    """

    grid_n: int
    mu: np.ndarray
    sigma: np.ndarray
    deadline: float

    def __post_init__(self):
        object.__setattr__(self, "mu", _ro(self.mu))
        object.__setattr__(self, "sigma", _ro(self.sigma))
        m = grids.n_edges(self.grid_n)
        if self.mu.shape != (m,) or self.sigma.shape != (m,):
            raise ConfigError(
                f"expected {m} edge parameters, got mu {self.mu.shape}, "
                f"sigma {self.sigma.shape}"
            )
        if np.any(self.sigma < 0):
            raise ConfigError("edge variances must be nonnegative")


@dataclass(frozen=True)
class PortfolioQPDescriptor:
    """Expected returns mu (k,), covariance cov (k, k), risk weight alpha."""

    mu: np.ndarray
    cov: np.ndarray
    risk_weight: float = 0.1

    def __post_init__(self):
        object.__setattr__(self, "mu", _ro(self.mu))
        object.__setattr__(self, "cov", _ro(self.cov))
        k = self.mu.shape[0]
        if self.cov.shape != (k, k):
            raise ConfigError(f"cov must be ({k},{k}), got {self.cov.shape}")
        if not np.allclose(self.cov, self.cov.T, atol=1e-10):
            raise ConfigError("covariance matrix must be symmetric")
        if np.linalg.eigvalsh(self.cov).min() < -1e-8:
            raise ConfigError("covariance matrix must be positive semidefinite")

    @property
    def n_assets(self) -> int:
        return self.mu.shape[0]


@dataclass(frozen=True)
class PortfolioMINLPDescriptor:
    """Cubic-objective combinatorial portfolio description.

    Objective terms: risk (alpha, quadratic in cov), turnover penalty
    (gamma, L1 distance to the initial allocation x0), expected return (mu),
    and a co-skewness bonus (beta, cubic in the coskew tensor). Constraints:
    the allocation sums to one, each selected fraction lies in
    [f_min, f_max], and between min_assets and max_assets names are selected.
    """

    mu: np.ndarray
    cov: np.ndarray
    coskew: np.ndarray
    x0: np.ndarray
    risk_weight: float = 0.1
    skew_weight: float = 0.5
    turnover_weight: float = 0.01
    f_min: float = 0.01
    f_max: float = 0.2
    min_assets: int = 3
    max_assets: int = 10

    def __post_init__(self):
        object.__setattr__(self, "mu", _ro(self.mu))
        object.__setattr__(self, "cov", _ro(self.cov))
        object.__setattr__(self, "coskew", _ro(self.coskew))
        object.__setattr__(self, "x0", _ro(self.x0))
        k = self.mu.shape[0]
        if self.cov.shape != (k, k) or self.coskew.shape != (k, k, k):
            raise ConfigError("cov/coskew shapes inconsistent with mu")
        if self.x0.shape != (k,):
            raise ConfigError(f"x0 must have length {k}")
        if not np.allclose(self.cov, self.cov.T, atol=1e-10):
            raise ConfigError("covariance matrix must be symmetric")
        if np.linalg.eigvalsh(self.cov).min() < -1e-8:
            raise ConfigError("covariance matrix must be positive semidefinite")
        if not np.allclose(self.coskew, np.swapaxes(self.coskew, 1, 2), atol=1e-10):
            raise ConfigError("coskew must be symmetric in its last two indices")
        if np.any(self.x0 < 0) or abs(self.x0.sum() - 1.0) > 1e-9:
            raise ConfigError("x0 must be nonnegative and sum to one")
        if not (0.0 < self.f_min < self.f_max <= 1.0):
            raise ConfigError("need 0 < f_min < f_max <= 1")
        if not (1 <= self.min_assets <= self.max_assets <= k):
            raise ConfigError("need 1 <= min_assets <= max_assets <= n_assets")
        if self.min_assets * self.f_min > 1.0 + 1e-12:
            raise ConfigError("min_assets * f_min must not exceed 1")
        if self.max_assets * self.f_max < 1.0 - 1e-12:
            raise ConfigError("max_assets * f_max must reach 1")

    @property
    def n_assets(self) -> int:
        return self.mu.shape[0]


Descriptor = Union[
    ShortestPathDescriptor,
    KnapsackDescriptor,
    StochasticSPDescriptor,
    PortfolioQPDescriptor,
    PortfolioMINLPDescriptor,
]

DESCRIPTOR_CLS = {
    Family.SHORTEST_PATH_LP: ShortestPathDescriptor,
    Family.MULTI_KNAPSACK: KnapsackDescriptor,
    Family.STOCHASTIC_SP: StochasticSPDescriptor,
    Family.PORTFOLIO_QP: PortfolioQPDescriptor,
    Family.PORTFOLIO_MINLP: PortfolioMINLPDescriptor,
}


@dataclass(frozen=True)
class Instance:
    """Observable features y paired with the ground-truth description z."""

    y: np.ndarray
    z: Descriptor

    def __post_init__(self):
        object.__setattr__(self, "y", _ro(self.y))


@dataclass(frozen=True)
class Dataset:
    family: Family
    seed: int
    instances: tuple[Instance, ...]
    generator: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "instances", tuple(self.instances))
        if not self.instances:
            raise ConfigError("a dataset must contain at least one instance")
        y_dim = self.instances[0].y.shape
        for i, inst in enumerate(self.instances):
            if inst.y.shape != y_dim:
                raise ConfigError(f"instance {i} feature dim {inst.y.shape} != {y_dim}")
            if not isinstance(inst.z, DESCRIPTOR_CLS[self.family]):
                raise ConfigError(f"instance {i} descriptor does not match {self.family}")

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def feature_dim(self) -> int:
        return int(self.instances[0].y.shape[0])


@dataclass(frozen=True)
class Solution:
    """A decision: continuous part x, binary part v, surrogate objective value.

    ``objective_surrogate`` is the value of the (linear or quadratic)
    surrogate objective the solver optimized, not the true objective.
    Families without integer decisions leave v empty, and vice versa.
    For the combinatorial portfolio, x_i > 0 implies v_i = 1.
    """

    x: np.ndarray
    v: np.ndarray
    objective_surrogate: float

    def __post_init__(self):
        object.__setattr__(self, "x", _ro(self.x))
        object.__setattr__(self, "v", _ro(np.asarray(self.v), dtype=np.int8))
        if self.v.size and not np.all((self.v == 0) | (self.v == 1)):
            raise ConfigError("binary part v must be 0/1")
        if self.x.size and not np.all(np.isfinite(self.x)):
            raise ConfigError("continuous part x must be finite")
