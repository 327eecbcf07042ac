"""Alternating optimization of the landscape surrogate and the target model.

One outer iteration alternates two phases. The w-step freezes the target
mapping, runs the solver once per training instance on the mapped costs,
records (cost, context, objective) triples in the replay buffer, and fits
the surrogate to the whole buffer by a fixed number of MSE steps. The
theta-step freezes the surrogate and updates the target mapping by chaining
the surrogate's cost-side gradients into the target's parameter gradients,
consuming zero solver calls.

Four entry points cover the experiment modes: ``train_predict_optimize``
(partial information, two-stage warm start, optional prediction penalty),
``train_zero`` (one fully-observed instance, the cost vector itself is the
learnable object, exploration by perturbation sampling), ``train_prior``
(amortized cost mapping over fully-observed instances), and
``deploy_reused_m`` (theta-step only against a frozen pretrained surrogate,
exactly one solver call).

All internal losses are minimized: maximize families are negated when
objectives enter the buffer and un-negated in reports.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import ConfigError, OptscapeError
from .nets import AdamState, Mlp, adam_step, fit_mse, mse_loss
from .problems.objectives import (
    context_features,
    cost_dim,
    cost_vector,
    eval_objective,
    from_internal,
    observed_features,
    to_internal,
)
from .problems.types import Dataset, Family, Instance, Solution
from .solvers.dispatch import SolverStats, solve_family
from .surrogate import ReplayBuffer, SurrogateModel

HISTORY_FIELDS = (
    "iteration",
    "buffer_size",
    "surrogate_mse",
    "mean_decision_loss",
    "solver_calls",
    "wall_time",
)


@dataclass
class LoopConfig:
    """Hyperparameters of the alternating loop.

    ``w_updates`` / ``theta_updates`` are the fixed inner budgets per outer
    iteration; ``lambda_pred`` weighs the optional prediction penalty in
    the predict-optimize theta-step; ``n_perturb`` / ``perturb_scale``
    control exploration sampling in zero mode.
    """

    T: int = 10
    w_updates: int = 10
    theta_updates: int = 10
    lr_w: float = 1e-3
    lr_theta: float = 1e-3
    lambda_pred: float = 0.0
    n_perturb: int = 30
    perturb_scale: float = 0.1
    seed: int = 0
    surrogate_hidden: tuple = (100, 100)
    target_hidden: tuple = ()
    warmstart_updates: int = 500
    batch: int | None = None
    deploy_updates: int = 200
    workers: int = 1

    def validate(self) -> None:
        if self.T < 0:
            raise ConfigError("T must be >= 0")
        if self.w_updates < 1 or self.theta_updates < 1:
            raise ConfigError("inner budgets must be >= 1")
        if self.lambda_pred < 0:
            raise ConfigError("lambda_pred must be >= 0")
        if self.n_perturb < 1 or self.perturb_scale <= 0:
            raise ConfigError("need n_perturb >= 1 and perturb_scale > 0")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass
class TargetModel:
    """Learnable mapping from observable features to surrogate costs."""

    net: Mlp


@dataclass
class TrainResult:
    target: TargetModel
    history: list[dict]
    surrogate: SurrogateModel | None = None
    buffer: ReplayBuffer | None = None


@dataclass
class ZeroResult:
    best_costs: np.ndarray
    best_solution: Solution
    best_objective: float  # natural sense
    history: list[dict]
    surrogate: SurrogateModel
    buffer: ReplayBuffer


@dataclass
class DeployResult:
    costs: np.ndarray
    solution: Solution
    objective: float  # natural sense
    wall_time: float


def initial_costs(family: Family, z) -> np.ndarray:
    """Domain-heuristic initialization of the surrogate cost vector."""
    if family is Family.STOCHASTIC_SP:
        return np.asarray(z.mu).copy()
    if family is Family.PORTFOLIO_MINLP:
        return -np.asarray(z.mu)
    return cost_vector(family, z).copy()


def heuristic_costs(family: Family, z, gamma: float = 0.0) -> np.ndarray:
    """Mean-plus-gamma-variance edge weights (stochastic path heuristic)."""
    if family is Family.STOCHASTIC_SP:
        return np.asarray(z.mu) + gamma * np.asarray(z.sigma)
    return initial_costs(family, z)


def _map_ordered(fn, items, workers: int):
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


_STREAMS = ("target_init", "warm_fit", "surrogate_init", "w_fit", "perturb", "extra")


def _rng(seed: int, stream: str) -> np.random.Generator:
    """Named per-purpose RNG streams derived from one seed.

    The layout is shared across training modes so that, e.g., the warm
    start inside the predict-optimize loop reproduces the standalone
    two-stage baseline bit-for-bit under the same seed.
    """
    children = np.random.SeedSequence(seed).spawn(len(_STREAMS))
    return np.random.default_rng(children[_STREAMS.index(stream)])


def _evaluate_costs(
    family: Family, costs: np.ndarray, z, stats: SolverStats, index: int | None = None
) -> tuple[Solution, float]:
    """Solve + true-objective evaluation; returns (solution, internal value)."""
    try:
        sol = solve_family(family, costs, z, stats)
        f_nat = eval_objective(family, sol, z)
    except OptscapeError as exc:
        if index is not None:
            raise type(exc)(f"instance {index}: {exc}") from exc
        raise
    return sol, to_internal(family, f_nat)


def w_step(
    dataset: Dataset,
    target: TargetModel,
    family: Family,
    stats: SolverStats,
    buffer: ReplayBuffer,
    surrogate: SurrogateModel,
    cfg: LoopConfig,
    w_state: AdamState,
    rng: np.random.Generator,
    contexts: np.ndarray,
) -> tuple[float, float]:
    """One surrogate-refresh phase.

    Maps every instance through the target, solves once per instance,
    appends the fresh evaluations to the replay buffer (entries from all
    previous iterations stay), refits standardization, and runs
    ``cfg.w_updates`` MSE steps. Returns (surrogate loss in natural units,
    mean internal decision loss of the fresh evaluations).
    """
    Y = np.stack([inst.y for inst in dataset.instances])
    costs = target.net.forward_batch(Y)

    def run(args):
        i, inst = args
        _, f_int = _evaluate_costs(family, costs[i], inst.z, stats, index=i)
        return f_int

    values = _map_ordered(run, list(enumerate(dataset.instances)), cfg.workers)
    for i in range(len(dataset)):
        buffer.append(costs[i], contexts[i], values[i])
    loss = surrogate.fit(buffer, cfg.w_updates, w_state, rng, batch=cfg.batch)
    return loss, float(np.mean(values))


def theta_grad(
    target: TargetModel,
    surrogate: SurrogateModel,
    Y: np.ndarray,
    contexts: np.ndarray,
    lambda_pred: float = 0.0,
    cost_targets: np.ndarray | None = None,
) -> np.ndarray:
    """Gradient of mean_i [M(c(y_i), ctx_i) + lambda ||c(y_i) - z_i||^2] in theta.

    Assembled by chaining the surrogate's cost-side gradient (standardized
    scale) into the target's parameter gradient; no solver involved.
    """
    n = Y.shape[0]
    costs = target.net.forward_batch(Y)
    upstream = surrogate.grad_cost_batch(costs, contexts) / n
    if lambda_pred > 0.0:
        if cost_targets is None:
            raise ConfigError("lambda_pred > 0 requires cost targets")
        upstream = upstream + lambda_pred * 2.0 * (costs - cost_targets) / n
    grads, _ = target.net.backward_batch(Y, upstream)
    return grads


def theta_step(
    dataset_or_Y,
    surrogate: SurrogateModel,
    target: TargetModel,
    cfg: LoopConfig,
    theta_state: AdamState,
    contexts: np.ndarray,
    cost_targets: np.ndarray | None = None,
) -> None:
    """``cfg.theta_updates`` Adam steps on the target against the frozen
    surrogate. Consumes zero solver calls."""
    if isinstance(dataset_or_Y, Dataset):
        Y = np.stack([inst.y for inst in dataset_or_Y.instances])
    else:
        Y = np.asarray(dataset_or_Y)
    for _ in range(cfg.theta_updates):
        grads = theta_grad(target, surrogate, Y, contexts, cfg.lambda_pred, cost_targets)
        target.net.set_params(adam_step(theta_state, target.net.params(), grads))


def two_stage_fit(
    target: TargetModel,
    dataset: Dataset,
    family: Family,
    n_updates: int,
    state: AdamState,
    rng: np.random.Generator,
    batch: int | None = None,
) -> float:
    """Fit the target to the ground-truth cost block by MSE.

    This is both the warm start of the predict-optimize loop and the
    standalone two-stage baseline."""
    Y = np.stack([inst.y for inst in dataset.instances])
    Z = np.stack([cost_vector(family, inst.z) for inst in dataset.instances])
    return fit_mse(target.net, Y, Z, n_updates, state, rng=rng, batch=batch)


def _make_target(feature_dim: int, out_dim: int, hidden, rng) -> TargetModel:
    return TargetModel(net=Mlp.create([feature_dim, *hidden, out_dim], rng))


def train_two_stage(dataset: Dataset, family: Family, cfg: LoopConfig) -> TrainResult:
    cfg.validate()
    init_rng = _rng(cfg.seed, "target_init")
    fit_rng = _rng(cfg.seed, "warm_fit")
    out_dim = cost_dim(family, dataset.instances[0].z)
    target = _make_target(dataset.feature_dim, out_dim, cfg.target_hidden, init_rng)
    state = AdamState.for_model(target.net, cfg.lr_theta)
    t0 = time.perf_counter()
    loss = two_stage_fit(target, dataset, family, cfg.warmstart_updates, state, fit_rng, cfg.batch)
    row = dict(
        iteration=0,
        buffer_size=0,
        surrogate_mse=float("nan"),
        mean_decision_loss=float("nan"),
        solver_calls=0,
        wall_time=time.perf_counter() - t0,
    )
    row["prediction_mse"] = loss
    return TrainResult(target=target, history=[row])


def train_predict_optimize(
    dataset: Dataset,
    family: Family,
    cfg: LoopConfig,
    stats: SolverStats | None = None,
    on_iteration=None,
) -> TrainResult:
    """Partial-information training: two-stage warm start, then T
    alternations of the w-step and the theta-step (T*N solver calls)."""
    cfg.validate()
    if family.fully_observed:
        raise ConfigError(f"{family.value} is fully observed; use prior or zero modes")
    stats = stats if stats is not None else SolverStats()
    t_init = _rng(cfg.seed, "target_init")
    warm_rng = _rng(cfg.seed, "warm_fit")
    s_init = _rng(cfg.seed, "surrogate_init")
    w_rng = _rng(cfg.seed, "w_fit")
    z0 = dataset.instances[0].z
    out_dim = cost_dim(family, z0)
    contexts = np.stack([context_features(family, inst.z) for inst in dataset.instances])
    cost_targets = np.stack([cost_vector(family, inst.z) for inst in dataset.instances])

    target = _make_target(dataset.feature_dim, out_dim, cfg.target_hidden, t_init)
    theta_state = AdamState.for_model(target.net, cfg.lr_theta)
    two_stage_fit(target, dataset, family, cfg.warmstart_updates, theta_state, warm_rng, cfg.batch)

    surrogate = SurrogateModel.create(out_dim, contexts.shape[1], cfg.surrogate_hidden, s_init)
    w_state = AdamState.for_model(surrogate.net, cfg.lr_w)
    buffer = ReplayBuffer(cost_dim=out_dim, context_dim=contexts.shape[1])

    history: list[dict] = []
    start_calls = stats.call_count
    t0 = time.perf_counter()
    for t in range(1, cfg.T + 1):
        loss, mean_dl = w_step(
            dataset, target, family, stats, buffer, surrogate, cfg, w_state, w_rng, contexts
        )
        theta_step(dataset, surrogate, target, cfg, theta_state, contexts, cost_targets)
        history.append(
            dict(
                iteration=t,
                buffer_size=len(buffer),
                surrogate_mse=loss,
                mean_decision_loss=mean_dl,
                solver_calls=stats.call_count - start_calls,
                wall_time=time.perf_counter() - t0,
            )
        )
        if on_iteration is not None:
            on_iteration(t, target, history[-1])
    return TrainResult(target=target, history=history, surrogate=surrogate, buffer=buffer)


def _perturb(costs: np.ndarray, scale: float, rng: np.random.Generator) -> np.ndarray:
    """Scale-aware local exploration around the current cost vector."""
    return costs + scale * (1.0 + np.abs(costs)) * rng.standard_normal(costs.size)


def train_zero(
    instance: Instance,
    family: Family,
    cfg: LoopConfig,
    stats: SolverStats | None = None,
    init_c: np.ndarray | None = None,
    context: np.ndarray | None = None,
    surrogate: SurrogateModel | None = None,
) -> ZeroResult:
    """On-the-fly optimization of one fully-observed instance.

    Per outer iteration: evaluate the current cost vector, then
    ``n_perturb`` sampled neighbors (n_perturb + 1 solver calls), fit the
    surrogate on the growing buffer, then descend the surrogate in cost
    space. The best evaluated (cost, solution) pair is tracked across
    everything the solver ever saw, so the reported objective never
    worsens. When ``context``/``surrogate`` are provided the evaluations
    feed a shared context-aware surrogate (used for pretraining a reusable
    one); by default the surrogate sees costs alone.
    """
    cfg.validate()
    if not family.fully_observed:
        raise ConfigError(f"zero mode needs a fully-observed family, got {family.value}")
    stats = stats if stats is not None else SolverStats()
    s_init = _rng(cfg.seed, "surrogate_init")
    fit_rng = _rng(cfg.seed, "w_fit")
    perturb_rng = _rng(cfg.seed, "perturb")
    z = instance.z
    costs = np.asarray(init_c, dtype=np.float64).copy() if init_c is not None else initial_costs(family, z)
    ctx = np.zeros(0) if context is None else np.asarray(context, dtype=np.float64)
    if surrogate is None:
        surrogate = SurrogateModel.create(costs.size, ctx.size, cfg.surrogate_hidden, s_init)
    if surrogate.context_dim != ctx.size:
        raise ConfigError(
            f"surrogate context width {surrogate.context_dim} != context {ctx.size}"
        )
    buffer = ReplayBuffer(cost_dim=costs.size, context_dim=ctx.size)
    w_state = AdamState.for_model(surrogate.net, cfg.lr_w)
    c_state = AdamState.for_size(costs.size, cfg.lr_theta)

    best_internal = np.inf
    best_costs = costs.copy()
    best_solution: Solution | None = None
    history: list[dict] = []
    start_calls = stats.call_count
    t0 = time.perf_counter()
    for t in range(1, cfg.T + 1):
        trial_costs = [costs.copy()]
        for _ in range(cfg.n_perturb):
            trial_costs.append(_perturb(costs, cfg.perturb_scale, perturb_rng))
        results = _map_ordered(
            lambda c: _evaluate_costs(family, c, z, stats), trial_costs, cfg.workers
        )
        for c, (sol, f_int) in zip(trial_costs, results):
            buffer.append(c, ctx, f_int)
            if f_int < best_internal:
                best_internal = f_int
                best_costs = c.copy()
                best_solution = sol
        loss = surrogate.fit(buffer, cfg.w_updates, w_state, fit_rng, batch=cfg.batch)
        for _ in range(cfg.theta_updates):
            grad = surrogate.grad_cost(costs, ctx)
            costs = adam_step(c_state, costs, grad)
        history.append(
            dict(
                iteration=t,
                buffer_size=len(buffer),
                surrogate_mse=loss,
                mean_decision_loss=best_internal,
                solver_calls=stats.call_count - start_calls,
                wall_time=time.perf_counter() - t0,
            )
        )
    return ZeroResult(
        best_costs=best_costs,
        best_solution=best_solution,
        best_objective=from_internal(family, best_internal),
        history=history,
        surrogate=surrogate,
        buffer=buffer,
    )


def train_prior(
    dataset: Dataset,
    family: Family,
    cfg: LoopConfig,
    stats: SolverStats | None = None,
    on_iteration=None,
) -> TrainResult:
    """Amortized training of the cost mapping over fully-observed instances.

    Like the predict-optimize loop but without the two-stage warm start and
    the prediction penalty (the description is not a valid cost target
    here); the surrogate context is the observable feature vector."""
    cfg.validate()
    if not family.fully_observed:
        raise ConfigError(f"prior mode needs a fully-observed family, got {family.value}")
    stats = stats if stats is not None else SolverStats()
    t_init = _rng(cfg.seed, "target_init")
    s_init = _rng(cfg.seed, "surrogate_init")
    w_rng = _rng(cfg.seed, "w_fit")
    z0 = dataset.instances[0].z
    out_dim = cost_dim(family, z0)
    contexts = np.stack([inst.y for inst in dataset.instances])

    target = _make_target(dataset.feature_dim, out_dim, cfg.target_hidden, t_init)
    theta_state = AdamState.for_model(target.net, cfg.lr_theta)
    surrogate = SurrogateModel.create(out_dim, contexts.shape[1], cfg.surrogate_hidden, s_init)
    w_state = AdamState.for_model(surrogate.net, cfg.lr_w)
    buffer = ReplayBuffer(cost_dim=out_dim, context_dim=contexts.shape[1])

    cfg_no_pen = replace(cfg, lambda_pred=0.0)
    history: list[dict] = []
    start_calls = stats.call_count
    t0 = time.perf_counter()
    for t in range(1, cfg.T + 1):
        loss, mean_dl = w_step(
            dataset, target, family, stats, buffer, surrogate, cfg, w_state, w_rng, contexts
        )
        theta_step(dataset, surrogate, target, cfg_no_pen, theta_state, contexts)
        history.append(
            dict(
                iteration=t,
                buffer_size=len(buffer),
                surrogate_mse=loss,
                mean_decision_loss=mean_dl,
                solver_calls=stats.call_count - start_calls,
                wall_time=time.perf_counter() - t0,
            )
        )
        if on_iteration is not None:
            on_iteration(t, target, history[-1])
    return TrainResult(target=target, history=history, surrogate=surrogate, buffer=buffer)


def pretrain_reusable_surrogate(
    dataset: Dataset,
    family: Family,
    cfg: LoopConfig,
    stats: SolverStats | None = None,
) -> tuple[SurrogateModel, list[dict]]:
    """Train one shared surrogate over (cost || features) across instances.

    Runs the zero-mode exploration loop on every training instance with a
    shared replay buffer and shared surrogate, so the surrogate learns the
    composite objective as a function of both the cost vector and the
    instance features and can later be deployed without solver access."""
    cfg.validate()
    if not family.fully_observed:
        raise ConfigError(f"reusable pretraining needs a fully-observed family")
    stats = stats if stats is not None else SolverStats()
    s_init = _rng(cfg.seed, "surrogate_init")
    fit_rng = _rng(cfg.seed, "w_fit")
    perturb_rng = _rng(cfg.seed, "perturb")
    z0 = dataset.instances[0].z
    out_dim = cost_dim(family, z0)
    ctx_dim = dataset.feature_dim
    surrogate = SurrogateModel.create(out_dim, ctx_dim, cfg.surrogate_hidden, s_init)
    buffer = ReplayBuffer(cost_dim=out_dim, context_dim=ctx_dim)
    w_state = AdamState.for_model(surrogate.net, cfg.lr_w)

    n = len(dataset)
    costs = [initial_costs(family, inst.z) for inst in dataset.instances]
    c_states = [AdamState.for_size(out_dim, cfg.lr_theta) for _ in range(n)]
    history: list[dict] = []
    start_calls = stats.call_count
    t0 = time.perf_counter()
    for t in range(1, cfg.T + 1):
        mean_best = []
        for i, inst in enumerate(dataset.instances):
            trial_costs = [costs[i].copy()]
            for _ in range(cfg.n_perturb):
                trial_costs.append(_perturb(costs[i], cfg.perturb_scale, perturb_rng))
            results = _map_ordered(
                lambda c: _evaluate_costs(family, c, inst.z, stats), trial_costs, cfg.workers
            )
            for c, (_, f_int) in zip(trial_costs, results):
                buffer.append(c, inst.y, f_int)
            mean_best.append(min(r[1] for r in results))
        loss = surrogate.fit(buffer, cfg.w_updates, w_state, fit_rng, batch=cfg.batch)
        for i, inst in enumerate(dataset.instances):
            for _ in range(cfg.theta_updates):
                grad = surrogate.grad_cost(costs[i], inst.y)
                costs[i] = adam_step(c_states[i], costs[i], grad)
        history.append(
            dict(
                iteration=t,
                buffer_size=len(buffer),
                surrogate_mse=loss,
                mean_decision_loss=float(np.mean(mean_best)),
                solver_calls=stats.call_count - start_calls,
                wall_time=time.perf_counter() - t0,
            )
        )
    return surrogate, history


def deploy_reused_m(
    instance: Instance,
    surrogate: SurrogateModel,
    family: Family,
    cfg: LoopConfig,
    stats: SolverStats | None = None,
) -> DeployResult:
    """Optimize costs for a new instance against a frozen pretrained
    surrogate: theta-step only, then exactly one solver call for the
    reported solution."""
    cfg.validate()
    stats = stats if stats is not None else SolverStats()
    ctx = np.asarray(instance.y, dtype=np.float64)
    if surrogate.context_dim != ctx.size:
        raise ConfigError(
            f"surrogate expects context width {surrogate.context_dim}, "
            f"instance features have {ctx.size}"
        )
    t0 = time.perf_counter()
    costs = initial_costs(family, instance.z)
    c_state = AdamState.for_size(costs.size, cfg.lr_theta)
    for _ in range(cfg.deploy_updates):
        grad = surrogate.grad_cost(costs, ctx)
        costs = adam_step(c_state, costs, grad)
    sol, f_int = _evaluate_costs(family, costs, instance.z, stats)
    return DeployResult(
        costs=costs,
        solution=sol,
        objective=from_internal(family, f_int),
        wall_time=time.perf_counter() - t0,
    )


def predict_solve(
    target: TargetModel,
    y: np.ndarray,
    family: Family,
    z_for_eval,
    stats: SolverStats | None = None,
) -> tuple[Solution, float]:
    """Map features to costs, solve once, and evaluate the true objective."""
    costs = target.net.forward(np.asarray(y, dtype=np.float64))
    sol, f_int = _evaluate_costs(family, costs, z_for_eval, stats if stats is not None else SolverStats())
    return sol, from_internal(family, f_int)
