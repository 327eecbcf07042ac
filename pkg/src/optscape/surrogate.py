"""Replay buffer of solver evaluations and the smooth landscape surrogate.

The surrogate is a tanh MLP mapping a concatenated (cost, context) vector
to one scalar approximating the composite objective-after-solve. Targets
are standardized over the whole buffer before fitting; the standardization
statistics are refreshed on every fit so the surrogate always trains
against the current buffer distribution. Optimizing the standardized
output is equivalent to optimizing the raw one (positive affine maps
preserve minimizers), so cost-side gradients are taken at the
standardized scale.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError
from .nets import AdamState, Mlp, fit_mse


@dataclass
class ReplayBuffer:
    """Accumulated (cost, context, value) triples across outer iterations.

    Entries are append-only and never mutated. ``capacity`` enables an
    optional FIFO bound for memory-limited runs; by default everything is
    kept and reused as-is by later surrogate fits.
    """

    cost_dim: int
    context_dim: int
    capacity: int | None = None
    _costs: list[np.ndarray] = field(default_factory=list)
    _contexts: list[np.ndarray] = field(default_factory=list)
    _values: list[float] = field(default_factory=list)

    def append(self, cost: np.ndarray, context: np.ndarray, value: float) -> None:
        cost = np.asarray(cost, dtype=np.float64)
        context = np.asarray(context, dtype=np.float64)
        if cost.shape != (self.cost_dim,):
            raise ConfigError(f"cost dim {cost.shape} != ({self.cost_dim},)")
        if context.shape != (self.context_dim,):
            raise ConfigError(f"context dim {context.shape} != ({self.context_dim},)")
        if not np.isfinite(value):
            raise ConfigError("buffer values must be finite")
        self._costs.append(cost.copy())
        self._contexts.append(context.copy())
        self._values.append(float(value))
        if self.capacity is not None and len(self._values) > self.capacity:
            del self._costs[0], self._contexts[0], self._values[0]

    def __len__(self) -> int:
        return len(self._values)

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        if not self._values:
            raise ConfigError("replay buffer is empty")
        costs = np.stack(self._costs)
        contexts = (
            np.stack(self._contexts) if self.context_dim else np.zeros((len(self), 0))
        )
        return costs, contexts, np.asarray(self._values)


@dataclass
class SurrogateModel:
    """Landscape surrogate: net over (cost || context) plus target scaling."""

    net: Mlp
    cost_dim: int
    context_dim: int
    target_mean: float = 0.0
    target_std: float = 1.0

    @classmethod
    def create(cls, cost_dim: int, context_dim: int, hidden, rng) -> "SurrogateModel":
        sizes = [cost_dim + context_dim, *hidden, 1]
        return cls(net=Mlp.create(sizes, rng), cost_dim=cost_dim, context_dim=context_dim)

    def _join(self, costs: np.ndarray, contexts: np.ndarray) -> np.ndarray:
        if self.context_dim == 0:
            return costs
        return np.concatenate([costs, contexts], axis=1)

    def refresh_standardization(self, values: np.ndarray) -> None:
        self.target_mean = float(np.mean(values))
        std = float(np.std(values))
        self.target_std = std if std > 1e-12 else 1.0

    def fit(
        self,
        buffer: ReplayBuffer,
        n_updates: int,
        state: AdamState,
        rng: np.random.Generator,
        batch: int | None = None,
    ) -> float:
        """Refresh standardization, run n_updates MSE steps on the whole
        buffer, and return the final loss in natural (de-standardized) units."""
        costs, contexts, values = buffer.arrays()
        self.refresh_standardization(values)
        targets = ((values - self.target_mean) / self.target_std)[:, None]
        loss_std = fit_mse(self.net, self._join(costs, contexts), targets,
                           n_updates, state, rng=rng, batch=batch)
        return loss_std * self.target_std**2

    def value_std_batch(self, costs: np.ndarray, contexts: np.ndarray) -> np.ndarray:
        return self.net.forward_batch(self._join(costs, contexts))[:, 0]

    def value(self, cost: np.ndarray, context: np.ndarray) -> float:
        """Surrogate prediction in natural units."""
        out = self.value_std_batch(
            np.asarray(cost)[None, :], np.asarray(context)[None, :]
        )[0]
        return float(out * self.target_std + self.target_mean)

    def grad_cost_batch(self, costs: np.ndarray, contexts: np.ndarray) -> np.ndarray:
        """d(standardized output)/d(cost) for each row."""
        X = self._join(costs, contexts)
        ones = np.ones((X.shape[0], 1))
        _, dX = self.net.backward_batch(X, ones, want_input_grad=True)
        return dX[:, : self.cost_dim]

    def grad_cost(self, cost: np.ndarray, context: np.ndarray) -> np.ndarray:
        return self.grad_cost_batch(
            np.asarray(cost)[None, :], np.asarray(context)[None, :]
        )[0]
