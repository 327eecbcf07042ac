"""Evaluation metrics: normalized regret, normalized decision loss,
solver-call trade-off curves, and the per-asset risk-skewness decomposition."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .problems.types import Family, PortfolioMINLPDescriptor, Sense

REGRET_EPS = 1e-7
CURVE_FIELDS = ("method", "epoch", "solver_calls", "metric")


@dataclass
class EvalReport:
    """Per-instance objectives plus the aggregates recomputable from them."""

    family: str
    objectives: list[float]
    oracle_objectives: list[float]
    regrets: list[float]
    normalized_regret: float
    normalized_decision_loss: float | None
    solver_calls: int
    wall_time: float

    def to_dict(self, include_timing: bool = True) -> dict:
        doc = {
            "family": self.family,
            "objectives": list(self.objectives),
            "oracle_objectives": list(self.oracle_objectives),
            "regrets": list(self.regrets),
            "normalized_regret": self.normalized_regret,
            "normalized_decision_loss": self.normalized_decision_loss,
            "solver_calls": self.solver_calls,
        }
        if include_timing:
            doc["wall_time"] = self.wall_time
        return doc


def regret_terms(family: Family, objectives, oracle_objectives):
    """Per-instance nonnegative regrets in the family's natural sense."""
    obj = np.asarray(objectives, dtype=np.float64)
    ref = np.asarray(oracle_objectives, dtype=np.float64)
    if obj.shape != ref.shape:
        raise ConfigError(f"length mismatch: {obj.shape} vs {ref.shape}")
    if family.sense is Sense.MAXIMIZE:
        return ref - obj
    return obj - ref


def normalized_regret(family: Family, objectives, oracle_objectives) -> float:
    """Sum of sense-adjusted regrets over the sum of |optimal objectives|.

    Zero iff every decision is optimal; the epsilon guards near-zero
    optimal objectives."""
    terms = regret_terms(family, objectives, oracle_objectives)
    denom = float(np.abs(np.asarray(oracle_objectives, dtype=np.float64)).sum()) + REGRET_EPS
    return float(terms.sum()) / denom


def normalized_decision_loss(
    family: Family, objectives, oracle_objectives, random_objectives
) -> float:
    """Decision loss rescaled so the optimum maps to 0 and the random
    baseline to 1."""
    def total(vals):
        arr = np.asarray(vals, dtype=np.float64)
        return float(np.sum([_internal(family, v) for v in arr]))

    dl = total(objectives)
    dl_opt = total(oracle_objectives)
    dl_rand = total(random_objectives)
    spread = dl_rand - dl_opt
    if spread <= REGRET_EPS:
        raise ConfigError(
            "degenerate normalization: random baseline does not exceed the optimum"
        )
    return (dl - dl_opt) / (spread + REGRET_EPS)


def _internal(family: Family, value: float) -> float:
    return -value if family.sense is Sense.MAXIMIZE else value


def tradeoff_curve(histories: dict[str, list[dict]]) -> list[dict]:
    """Flatten per-method training histories into (method, epoch,
    solver_calls, metric) rows suitable for plotting."""
    if not histories:
        raise ConfigError("need at least one history")
    rows = []
    for method, history in histories.items():
        prev_calls = -1
        for row in history:
            calls = int(row["solver_calls"])
            if calls <= prev_calls:
                raise ConfigError(f"{method}: solver calls must strictly increase")
            prev_calls = calls
            rows.append(
                {
                    "method": method,
                    "epoch": int(row["iteration"]),
                    "solver_calls": calls,
                    "metric": float(row["mean_decision_loss"]),
                }
            )
    return rows


def write_curve_csv(rows: list[dict], path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(CURVE_FIELDS))
        writer.writeheader()
        for row in rows:
            writer.writerow({k: row[k] for k in CURVE_FIELDS})


def read_curve_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        return [
            {
                "method": row["method"],
                "epoch": int(row["epoch"]),
                "solver_calls": int(row["solver_calls"]),
                "metric": float(row["metric"]),
            }
            for row in csv.DictReader(fh)
        ]


def risk_skewness_scores(x, z: PortfolioMINLPDescriptor):
    """Per-asset decomposition of the combinatorial portfolio objective.

    Returns (scores, return_contributions): scores are
    alpha * x . (G x) - beta * x . (S : x (x) x) elementwise, and the
    return contributions are mu (x) x. Summing the scores, subtracting the
    summed return contributions, and adding the turnover penalty
    reconstructs the full objective."""
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (z.n_assets,):
        raise ConfigError(f"x must have length {z.n_assets}, got {x.shape}")
    quad = x * (z.cov @ x)
    cubic = x * np.einsum("ijk,j,k->i", z.coskew, x, x)
    scores = z.risk_weight * quad - z.skew_weight * cubic
    return scores, z.mu * x
