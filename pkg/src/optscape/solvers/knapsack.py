"""Exact multidimensional 0/1 knapsack via depth-first branch and bound.

The upper bound at each node is the minimum over dimensions of the
single-dimension fractional-knapsack bound on the undecided items; each
per-dimension bound relaxes away the other dimensions, so the minimum is
admissible and the search returns a provably exact optimum. Branching
follows the fractional item of the binding dimension; the include branch
is explored first (best-value incumbent).

Items with nonpositive value can never improve a maximization with
nonnegative weights and are excluded up front -- learned surrogate values
routinely go negative.
"""

from __future__ import annotations

import numpy as np

from ..errors import ConfigError
from ..problems.types import Solution


def _fractional_bound(order, values, weights_d, cap_d, undecided):
    """Greedy fractional bound in one dimension; (bound, fractional item)."""
    bound = 0.0
    remaining = cap_d
    frac_item = -1
    for i in order:
        if not undecided[i]:
            continue
        w = weights_d[i]
        if w <= remaining:
            remaining -= w
            bound += values[i]
        else:
            if remaining > 0.0 and w > 0.0:
                bound += values[i] * (remaining / w)
                frac_item = i
            break
    return bound, frac_item


def solve_multiknapsack(values, weights, capacities) -> Solution:
    """Maximize values @ v subject to weights @ v <= capacities, v binary."""
    values = np.asarray(values, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    capacities = np.asarray(capacities, dtype=np.float64)
    if weights.ndim != 2:
        raise ConfigError(f"weights must be a (dims, items) matrix, got ndim={weights.ndim}")
    d, k = weights.shape
    if values.shape != (k,) or capacities.shape != (d,):
        raise ConfigError(
            f"inconsistent shapes: values {values.shape}, weights {weights.shape}, "
            f"capacities {capacities.shape}"
        )
    if np.any(capacities < 0):
        raise ConfigError("capacities must be nonnegative")
    if np.any(weights < 0):
        raise ConfigError("weights must be nonnegative")

    candidates = np.flatnonzero(values > 0.0)
    v_best = np.zeros(k, dtype=np.int8)
    best_value = 0.0
    if candidates.size:
        # per-dimension ratio orders over candidate items, zero weights first
        orders = []
        for dd in range(d):
            w = weights[dd, candidates]
            ratio = np.where(w > 0, values[candidates] / np.where(w > 0, w, 1.0), np.inf)
            orders.append(candidates[np.argsort(-ratio, kind="stable")])

        undecided = np.zeros(k, dtype=bool)
        undecided[candidates] = True
        chosen = np.zeros(k, dtype=bool)
        best_chosen = np.zeros(k, dtype=bool)

        def visit(value: float, used: np.ndarray) -> None:
            nonlocal best_value
            bound = np.inf
            frac_item = -1
            for dd in range(d):
                b, fi = _fractional_bound(
                    orders[dd], values, weights[dd], capacities[dd] - used[dd], undecided
                )
                if value + b < bound:
                    bound = value + b
                    frac_item = fi
            if bound <= best_value:
                return
            if frac_item < 0:
                # integral greedy completion in the binding dimension may still
                # violate other dims; fall back to the first undecided fit
                frac_item = -1
                for i in np.flatnonzero(undecided):
                    if np.all(used + weights[:, i] <= capacities):
                        frac_item = int(i)
                        break
                if frac_item < 0:
                    if value > best_value:
                        best_value = value
                        best_chosen[:] = chosen
                    return
            i = frac_item
            undecided[i] = False
            if np.all(used + weights[:, i] <= capacities):
                chosen[i] = True
                new_value = value + values[i]
                if new_value > best_value:
                    best_value = new_value
                    best_chosen[:] = chosen
                visit(new_value, used + weights[:, i])
                chosen[i] = False
            visit(value, used)
            undecided[i] = True

        visit(0.0, np.zeros(d))
        v_best = best_chosen.astype(np.int8)

    objective = float(values @ v_best)
    return Solution(x=np.zeros(0), v=v_best, objective_surrogate=objective)
