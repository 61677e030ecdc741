"""Random multilinear cost functions over sign vectors, extreme-value
predictions for their minima, and crossover-style search algorithms."""

from .evt import (
    AsymptoticsError,
    GaussianSpec,
    MixturePrediction,
    NumericDomainError,
    TheoryParams,
    global_min_estimate,
    min_distribution,
    mixture_prediction,
    normal_cdf,
    offspring_distribution,
    offspring_min_distribution,
    predicted_offspring_variance,
    required_iterations,
    schema_strength,
    theory_params,
)
from .harness import (
    ConfigError,
    ExperimentConfig,
    ExperimentRow,
    load_config,
    read_rows,
    run_fig2,
    run_fig3,
    write_rows,
)
from .polycost import (
    CostFunction,
    coefficient_count,
    evaluate,
    evaluate_batch,
    exhaustive_min,
    flip_delta,
    load_cost_function,
    multilinear_extension,
    random_states,
    sample_cost_function,
    save_cost_function,
    uniform_order_variance,
    validate_state,
)
from .search import (
    CrossoverScheme,
    SearchResult,
    gradient_descent,
    gradient_descent_restarts,
    make_crossover_scheme,
    mean_field_search,
    offspring_statistics,
    random_search,
    sample_offspring,
    select_parents,
    selection_crossover,
)
from .seeding import split_seed, stream
from .svgplot import emit_plot

__version__ = "0.1.0"

__all__ = [
    "AsymptoticsError",
    "ConfigError",
    "CostFunction",
    "CrossoverScheme",
    "ExperimentConfig",
    "ExperimentRow",
    "GaussianSpec",
    "MixturePrediction",
    "NumericDomainError",
    "SearchResult",
    "TheoryParams",
    "__version__",
    "coefficient_count",
    "emit_plot",
    "evaluate",
    "evaluate_batch",
    "exhaustive_min",
    "flip_delta",
    "global_min_estimate",
    "gradient_descent",
    "gradient_descent_restarts",
    "load_config",
    "load_cost_function",
    "make_crossover_scheme",
    "mean_field_search",
    "min_distribution",
    "mixture_prediction",
    "multilinear_extension",
    "normal_cdf",
    "offspring_distribution",
    "offspring_min_distribution",
    "offspring_statistics",
    "predicted_offspring_variance",
    "random_search",
    "random_states",
    "read_rows",
    "required_iterations",
    "run_fig2",
    "run_fig3",
    "sample_cost_function",
    "sample_offspring",
    "save_cost_function",
    "schema_strength",
    "select_parents",
    "selection_crossover",
    "split_seed",
    "stream",
    "theory_params",
    "uniform_order_variance",
    "validate_state",
    "write_rows",
]
