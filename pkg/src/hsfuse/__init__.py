"""Bayesian fusion estimation of piecewise-constant signals under global-local
shrinkage, on 1-D chains and on arbitrary undirected graphs."""

from .distributions import (
    HsBoundConfig,
    InverseGammaParams,
    hs_density_bounds,
    hs_thickness,
    prior_mass_outside,
    sample_half_cauchy_sq,
    sample_inverse_gamma,
)
from .model import (
    ChainData,
    GibbsState,
    McmcConfig,
    PosteriorSamples,
    PriorConfig,
    adj_mse,
    mse,
    posterior_summary,
)
from .chain import (
    ConditionalNormalParams,
    IterationError,
    run_chain,
    theta_conditional,
)
from .graph import (
    DfsChain,
    GraphConnectivityError,
    GraphPosterior,
    UGraph,
    dfs_chain,
    read_edge_list,
    run_graph_fusion,
    tv_l0,
    tv_l1,
)
from .recovery import (
    BlockProjection,
    PairwiseBlocks,
    false_positive_count,
    false_positive_draws,
    practical_threshold,
    project_blocks,
    wb_metrics,
)
from .simulate import SignalSpec, add_noise, make_signal, monte_carlo
from .ingest import TimedSeries, interpolate_missing, read_signal_csv, window_average

__version__ = "0.1.0"

__all__ = [
    "HsBoundConfig",
    "InverseGammaParams",
    "hs_density_bounds",
    "hs_thickness",
    "prior_mass_outside",
    "sample_half_cauchy_sq",
    "sample_inverse_gamma",
    "ChainData",
    "GibbsState",
    "McmcConfig",
    "PosteriorSamples",
    "PriorConfig",
    "adj_mse",
    "mse",
    "posterior_summary",
    "ConditionalNormalParams",
    "IterationError",
    "run_chain",
    "theta_conditional",
    "DfsChain",
    "GraphConnectivityError",
    "GraphPosterior",
    "UGraph",
    "dfs_chain",
    "read_edge_list",
    "run_graph_fusion",
    "tv_l0",
    "tv_l1",
    "BlockProjection",
    "PairwiseBlocks",
    "false_positive_count",
    "false_positive_draws",
    "practical_threshold",
    "project_blocks",
    "wb_metrics",
    "SignalSpec",
    "add_noise",
    "make_signal",
    "monte_carlo",
    "TimedSeries",
    "interpolate_missing",
    "read_signal_csv",
    "window_average",
]
