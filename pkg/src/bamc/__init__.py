"""Anytime MAP estimation for probabilistic programs.

The engine repeatedly executes a program, steering every random choice with
per-site reward beliefs (probability matching with an always-present fresh
draw), and reports each improvement of the best assignment found so far.
Single-site Metropolis-Hastings and simulated annealing searchers provide
baselines over the same program protocol, and a benchmark harness runs
seeded comparison grids with CSV/figure output, exposed both as a Python
API and over HTTP.
"""

__version__ = "0.1.0"

from .baselines import (
    Schedule,
    exponential_schedule,
    lundy_mees_schedule,
    mh_map_search,
    sa_search,
    temperature,
)
from .bench import (
    ConfigError,
    DataError,
    ExperimentConfig,
    QuantileSummary,
    RunRecord,
    quantile_summary,
    read_records,
    rolling_median,
    run_experiment,
    run_search,
)
from .distributions import (
    Beta,
    Categorical,
    Dirichlet,
    Distribution,
    Gamma,
    Normal,
    Poisson,
    UniformContinuous,
    UniformDiscrete,
)
from .models import (
    GroundTruth,
    HmmSpec,
    MixtureSpec,
    gmm_program,
    gmm_spec,
    hmm16_program,
    hmm16_spec,
    load_hmm16_ground_truth,
    tiny_hmm_program,
    tiny_hmm_spec,
)
from .oracles import brute_force_map, enumerate_traces, viterbi_oracle
from .orpm import BeliefStore, RewardStats, SelectionPoint, select_value, update_stats
from .program import (
    Address,
    GeneratorProgram,
    GuideValueError,
    Observe,
    Output,
    Program,
    ProgramError,
    Sample,
    Trace,
    fixed_guide,
    prior_guide,
    run_program,
    trace_log_weight,
)
from .search import MapEstimate, SearchReport, bamc_search

__all__ = [
    "__version__",
    # protocol
    "Distribution", "Categorical", "UniformDiscrete", "Poisson", "Normal",
    "UniformContinuous", "Gamma", "Beta", "Dirichlet",
    "Sample", "Observe", "Output", "Address", "Trace", "Program",
    "GeneratorProgram", "ProgramError", "GuideValueError",
    "run_program", "trace_log_weight", "prior_guide", "fixed_guide",
    # beliefs and searchers
    "RewardStats", "SelectionPoint", "BeliefStore", "update_stats", "select_value",
    "MapEstimate", "SearchReport", "bamc_search",
    "Schedule", "exponential_schedule", "lundy_mees_schedule", "temperature",
    "mh_map_search", "sa_search",
    # models and oracles
    "HmmSpec", "MixtureSpec", "GroundTruth",
    "tiny_hmm_program", "hmm16_program", "gmm_program",
    "tiny_hmm_spec", "hmm16_spec", "gmm_spec", "load_hmm16_ground_truth",
    "brute_force_map", "viterbi_oracle", "enumerate_traces",
    # harness
    "ExperimentConfig", "RunRecord", "ConfigError", "DataError",
    "run_experiment", "run_search", "read_records",
    "QuantileSummary", "quantile_summary", "rolling_median",
]
