"""Minimal differentiable-model kernel: dense tanh MLPs with reverse-mode
gradients w.r.t. parameters and inputs, Adam, and mean-squared-error fitting.

Everything runs in double precision. A model with no hidden layers is a
plain affine map, which covers the linear target-mapping case. Parameters
flatten in a fixed layout (per layer: weight matrix row-major, then bias),
and gradients follow that layout exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, DataError


@dataclass
class Mlp:
    """Affine-tanh composition with an identity output layer."""

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def create(cls, layer_sizes, rng: np.random.Generator) -> "Mlp":
        """Glorot-uniform weights (std sqrt(2/(fan_in+fan_out))), zero biases."""
        sizes = [int(s) for s in layer_sizes]
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ConfigError(f"layer_sizes needs >= 2 positive entries, got {sizes}")
        weights, biases = [], []
        for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
            bound = np.sqrt(6.0 / (fan_in + fan_out))
            weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
            biases.append(np.zeros(fan_out))
        return cls(sizes, weights, biases)

    @property
    def in_dim(self) -> int:
        return self.layer_sizes[0]

    @property
    def out_dim(self) -> int:
        return self.layer_sizes[-1]

    @property
    def param_count(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))

    def params(self) -> np.ndarray:
        return np.concatenate([np.concatenate([w.ravel(), b]) for w, b in zip(self.weights, self.biases)])

    def set_params(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=np.float64)
        if flat.shape != (self.param_count,):
            raise ConfigError(f"expected {self.param_count} parameters, got {flat.shape}")
        offset = 0
        for w, b in zip(self.weights, self.biases):
            w[...] = flat[offset : offset + w.size].reshape(w.shape)
            offset += w.size
            b[...] = flat[offset : offset + b.size]
            offset += b.size

    def clone(self) -> "Mlp":
        return Mlp(
            list(self.layer_sizes),
            [w.copy() for w in self.weights],
            [b.copy() for b in self.biases],
        )

    def _check_input(self, X: np.ndarray) -> None:
        if X.shape[-1] != self.in_dim:
            raise ConfigError(f"input dim {X.shape[-1]} != model input {self.in_dim}")

    def forward_batch(self, X: np.ndarray) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        self._check_input(X)
        a = X
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.tanh(a @ w.T + b)
        return a @ self.weights[-1].T + self.biases[-1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        return self.forward_batch(np.asarray(x, dtype=np.float64)[None, :])[0]

    def backward_batch(self, X: np.ndarray, upstream: np.ndarray, want_input_grad: bool = False):
        """Reverse-mode pass for sum_b upstream[b] . forward(X[b]).

        Returns (flat parameter gradient summed over the batch, input
        gradient of shape X or None).
        """
        X = np.asarray(X, dtype=np.float64)
        upstream = np.asarray(upstream, dtype=np.float64)
        self._check_input(X)
        if upstream.shape != (X.shape[0], self.out_dim):
            raise ConfigError(
                f"upstream shape {upstream.shape} != (batch, {self.out_dim})"
            )
        acts = [X]
        a = X
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            a = np.tanh(a @ w.T + b)
            acts.append(a)
        grads_w = [None] * len(self.weights)
        grads_b = [None] * len(self.biases)
        delta = upstream
        for layer in range(len(self.weights) - 1, -1, -1):
            grads_w[layer] = delta.T @ acts[layer]
            grads_b[layer] = delta.sum(axis=0)
            if layer > 0:
                delta = (delta @ self.weights[layer]) * (1.0 - acts[layer] ** 2)
            elif want_input_grad:
                delta = delta @ self.weights[0]
        flat = np.concatenate(
            [np.concatenate([gw.ravel(), gb]) for gw, gb in zip(grads_w, grads_b)]
        )
        return flat, (delta if want_input_grad else None)


def forward(model: Mlp, x) -> np.ndarray:
    return model.forward(x)


def grad_params(model: Mlp, x, upstream) -> np.ndarray:
    """Exact gradient of upstream . forward(model, x) w.r.t. all parameters."""
    flat, _ = model.backward_batch(
        np.asarray(x, dtype=np.float64)[None, :],
        np.asarray(upstream, dtype=np.float64)[None, :],
    )
    return flat

def grad_input(model: Mlp, x, upstream) -> np.ndarray:
    """Exact gradient of upstream . forward(model, x) w.r.t. the input."""
    _, dx = model.backward_batch(
        np.asarray(x, dtype=np.float64)[None, :],
        np.asarray(upstream, dtype=np.float64)[None, :],
        want_input_grad=True,
    )
    return dx[0]


@dataclass
class AdamState:
    """Textbook Adam with bias correction."""

    m: np.ndarray
    v: np.ndarray
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = 0

    @classmethod
    def for_size(cls, n: int, learning_rate: float = 1e-3, **kw) -> "AdamState":
        return cls(m=np.zeros(n), v=np.zeros(n), learning_rate=learning_rate, **kw)

    @classmethod
    def for_model(cls, model: Mlp, learning_rate: float = 1e-3, **kw) -> "AdamState":
        return cls.for_size(model.param_count, learning_rate, **kw)


def adam_step(state: AdamState, params: np.ndarray, grads: np.ndarray) -> np.ndarray:
    """One Adam update; returns the new parameter vector, mutating state."""
    params = np.asarray(params, dtype=np.float64)
    grads = np.asarray(grads, dtype=np.float64)
    if params.shape != state.m.shape or grads.shape != state.m.shape:
        raise ConfigError(
            f"size mismatch: params {params.shape}, grads {grads.shape}, "
            f"state {state.m.shape}"
        )
    state.step_count += 1
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * grads
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * grads**2
    m_hat = state.m / (1.0 - state.beta1**state.step_count)
    v_hat = state.v / (1.0 - state.beta2**state.step_count)
    return params - state.learning_rate * m_hat / (np.sqrt(v_hat) + state.epsilon)


def mse_loss(model: Mlp, X: np.ndarray, Y: np.ndarray) -> float:
    """Mean over samples of the squared L2 error (summed over outputs)."""
    diff = model.forward_batch(X) - Y
    return float(np.mean(np.sum(diff**2, axis=1)))


def fit_mse(
    model: Mlp,
    X,
    Y,
    n_updates: int,
    state: AdamState,
    rng: np.random.Generator | None = None,
    batch: int | None = None,
) -> float:
    """Exactly n_updates mini-batch Adam steps on MSE; returns the final
    full-data loss. Full batch unless ``batch`` is given (then shuffling is
    driven by ``rng``)."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    Y = np.atleast_2d(np.asarray(Y, dtype=np.float64))
    if X.shape[0] == 0:
        raise ConfigError("cannot fit on empty data")
    if X.shape[0] != Y.shape[0]:
        raise ConfigError(f"inputs/targets length mismatch: {X.shape[0]} vs {Y.shape[0]}")
    if n_updates < 1:
        raise ConfigError("n_updates must be >= 1")
    n = X.shape[0]
    use_batch = batch is not None and batch < n
    if use_batch and rng is None:
        raise ConfigError("mini-batching requires an rng for shuffling")
    order = np.empty(0, dtype=np.int64)
    cursor = 0
    for _ in range(n_updates):
        if use_batch:
            if cursor + batch > order.size:
                order = rng.permutation(n)
                cursor = 0
            idx = order[cursor : cursor + batch]
            cursor += batch
            xb, yb = X[idx], Y[idx]
        else:
            xb, yb = X, Y
        pred = model.forward_batch(xb)
        upstream = 2.0 * (pred - yb) / xb.shape[0]
        grads, _ = model.backward_batch(xb, upstream)
        model.set_params(adam_step(state, model.params(), grads))
    return mse_loss(model, X, Y)


def save_mlp(path, model: Mlp) -> None:
    """Bit-exact binary checkpoint (npz: layer sizes + per-layer arrays)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    payload = {"layer_sizes": np.asarray(model.layer_sizes, dtype=np.int64)}
    for i, (w, b) in enumerate(zip(model.weights, model.biases)):
        payload[f"w{i}"] = w
        payload[f"b{i}"] = b
    np.savez(path, **payload)


def load_mlp(path) -> Mlp:
    path = Path(path)
    if not path.exists():
        raise DataError(f"checkpoint not found: {path}")
    with np.load(path) as data:
        sizes = data["layer_sizes"].tolist()
        weights = [data[f"w{i}"].astype(np.float64) for i in range(len(sizes) - 1)]
        biases = [data[f"b{i}"].astype(np.float64) for i in range(len(sizes) - 1)]
    return Mlp(sizes, weights, biases)
