"""Dataset serialization: versioned JSON files and CSV descriptor export.

Floats are written with Python's shortest round-trip repr, so every value
reloads to the bit-identical float64. The JSON layout is documented in the
README (one file per dataset: family tag, seed, generator parameters, and
the instance array).
"""

from __future__ import annotations

import csv
import json
from pathlib import Path

import numpy as np

from ..errors import DataError
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

SCHEMA_VERSION = 1


def _z_payload(family: Family, z) -> dict:
    if family is Family.SHORTEST_PATH_LP:
        return {"grid_n": z.grid_n, "costs": z.costs.tolist()}
    if family is Family.MULTI_KNAPSACK:
        return {
            "values": z.values.tolist(),
            "weights": z.weights.tolist(),
            "capacities": z.capacities.tolist(),
        }
    if family is Family.STOCHASTIC_SP:
        return {
            "grid_n": z.grid_n,
            "mu": z.mu.tolist(),
            "sigma": z.sigma.tolist(),
            "deadline": z.deadline,
        }
    if family is Family.PORTFOLIO_QP:
        return {"mu": z.mu.tolist(), "cov": z.cov.tolist(), "risk_weight": z.risk_weight}
    return {
        "mu": z.mu.tolist(),
        "cov": z.cov.tolist(),
        "coskew": z.coskew.tolist(),
        "x0": z.x0.tolist(),
        "risk_weight": z.risk_weight,
        "skew_weight": z.skew_weight,
        "turnover_weight": z.turnover_weight,
        "f_min": z.f_min,
        "f_max": z.f_max,
        "min_assets": z.min_assets,
        "max_assets": z.max_assets,
    }


def _z_from_payload(family: Family, payload: dict):
    try:
        if family is Family.SHORTEST_PATH_LP:
            return ShortestPathDescriptor(grid_n=payload["grid_n"], costs=payload["costs"])
        if family is Family.MULTI_KNAPSACK:
            return KnapsackDescriptor(
                values=payload["values"],
                weights=payload["weights"],
                capacities=payload["capacities"],
            )
        if family is Family.STOCHASTIC_SP:
            return StochasticSPDescriptor(
                grid_n=payload["grid_n"],
                mu=payload["mu"],
                sigma=payload["sigma"],
                deadline=payload["deadline"],
            )
        if family is Family.PORTFOLIO_QP:
            return PortfolioQPDescriptor(
                mu=payload["mu"], cov=payload["cov"], risk_weight=payload["risk_weight"]
            )
        return PortfolioMINLPDescriptor(
            mu=payload["mu"],
            cov=payload["cov"],
            coskew=payload["coskew"],
            x0=payload["x0"],
            risk_weight=payload["risk_weight"],
            skew_weight=payload["skew_weight"],
            turnover_weight=payload["turnover_weight"],
            f_min=payload["f_min"],
            f_max=payload["f_max"],
            min_assets=payload["min_assets"],
            max_assets=payload["max_assets"],
        )
    except KeyError as exc:
        raise DataError(f"dataset payload missing field {exc}") from exc


def dataset_to_dict(dataset: Dataset) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "kind": "dataset",
        "family": dataset.family.value,
        "seed": dataset.seed,
        "generator": dataset.generator,
        "instances": [
            {"y": inst.y.tolist(), "z": _z_payload(dataset.family, inst.z)}
            for inst in dataset.instances
        ],
    }


def dataset_from_dict(doc: dict) -> Dataset:
    if doc.get("kind") != "dataset":
        raise DataError("not a dataset file")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise DataError(f"unsupported dataset schema_version {doc.get('schema_version')}")
    try:
        family = Family(doc["family"])
        instances = tuple(
            Instance(y=np.asarray(item["y"], dtype=np.float64), z=_z_from_payload(family, item["z"]))
            for item in doc["instances"]
        )
        return Dataset(family, int(doc["seed"]), instances, doc.get("generator", {}))
    except (KeyError, ValueError) as exc:
        raise DataError(f"malformed dataset file: {exc}") from exc


def save_dataset(dataset: Dataset, path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(dataset_to_dict(dataset), fh, sort_keys=True)
        fh.write("\n")


def load_dataset(path) -> Dataset:
    path = Path(path)
    if not path.exists():
        raise DataError(f"dataset file not found: {path}")
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DataError(f"dataset file is not valid JSON: {path}") from exc
    return dataset_from_dict(doc)


def export_descriptors_csv(dataset: Dataset, path) -> None:
    """Flat per-instance CSV of descriptor fields for external inspection."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = []
    for idx, inst in enumerate(dataset.instances):
        row: dict = {"instance": idx}
        for key, value in _z_payload(dataset.family, inst.z).items():
            arr = np.asarray(value)
            if arr.ndim == 0:
                row[key] = arr.item()
            else:
                for j, v in enumerate(arr.ravel()):
                    row[f"{key}_{j}"] = v
        rows.append(row)
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
