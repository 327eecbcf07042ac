"""Benchmark problem families: types, objectives, generators, serialization."""

from .types import (
    Dataset,
    Descriptor,
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
from .objectives import (
    context_features,
    cost_dim,
    cost_vector,
    eval_objective,
    from_internal,
    gaussian_cdf,
    is_feasible,
    observed_features,
    to_internal,
)
from .generators import (
    DEADLINE_FACTORS,
    gen_knapsack_dataset,
    gen_portfolio_dataset,
    gen_shortest_path_dataset,
    gen_stochastic_sp_dataset,
    gen_stochastic_sp_instance,
)
from .io import dataset_from_dict, dataset_to_dict, export_descriptors_csv, load_dataset, save_dataset

__all__ = [
    "Dataset",
    "Descriptor",
    "Family",
    "Instance",
    "KnapsackDescriptor",
    "PortfolioMINLPDescriptor",
    "PortfolioQPDescriptor",
    "Sense",
    "ShortestPathDescriptor",
    "Solution",
    "StochasticSPDescriptor",
    "context_features",
    "cost_dim",
    "cost_vector",
    "eval_objective",
    "from_internal",
    "gaussian_cdf",
    "is_feasible",
    "observed_features",
    "to_internal",
    "DEADLINE_FACTORS",
    "gen_knapsack_dataset",
    "gen_portfolio_dataset",
    "gen_shortest_path_dataset",
    "gen_stochastic_sp_dataset",
    "gen_stochastic_sp_instance",
    "dataset_from_dict",
    "dataset_to_dict",
    "export_descriptors_csv",
    "load_dataset",
    "save_dataset",
]
