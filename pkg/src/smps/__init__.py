"""Stochastic matrix product states for classical many-site distributions.

Nonnegative tensor-train representations of probability tables, their cut
spectra and bond-probability normal form, certified truncation, two-sided
correlation-cost brackets, exact steady-state stacks for the open exclusion
chain (validated against a master-equation oracle), and a kinetic Monte
Carlo sampler with plug-in information estimates.
"""

__version__ = "0.1.0"

from .canonical import (
    ChannelPair,
    CutSpectrum,
    NaturalForm,
    channel_decomposition,
    cut_spectrum,
    to_natural_form,
    transfer_matrix,
    truncate,
)
from .core import (
    BipartiteFactorization,
    ProbabilityTable,
    StochasticMPS,
    config_index,
    contract_to_table,
    factorize_at_cut,
    index_config,
    l1_distance,
    marginal,
)
from .errors import (
    CapacityError,
    ConvergenceError,
    DegenerateInputError,
    InconsistencyError,
    NotNormalizedError,
    StructureError,
)
from .infotheory import (
    EntropyCostBracket,
    entropy_cost_bracket,
    mutual_information,
    pinsker_gap,
    shannon_entropy,
)
from .mcsim import (
    McConfig,
    MiEstimate,
    SampleRun,
    available_backends,
    default_backend,
    estimate_mutual_information,
    load_run,
    save_run,
    simulate,
    site_density_estimates,
)
from .models import (
    AsepParams,
    AsepRepresentation,
    IsingParams,
    asep_candidate_representations,
    asep_mps,
    asep_representation,
    asep_representation_for_regime,
    asep_scalar_mps,
    ising_entropy_cost_exact,
    ising_mps,
)
from .oracle import (
    MarkovGenerator,
    asep_generator,
    steady_state,
    steady_state_table,
)

__all__ = [
    "__version__",
    "BipartiteFactorization",
    "ProbabilityTable",
    "StochasticMPS",
    "config_index",
    "contract_to_table",
    "factorize_at_cut",
    "index_config",
    "l1_distance",
    "marginal",
    "ChannelPair",
    "CutSpectrum",
    "NaturalForm",
    "channel_decomposition",
    "cut_spectrum",
    "to_natural_form",
    "transfer_matrix",
    "truncate",
    "EntropyCostBracket",
    "entropy_cost_bracket",
    "mutual_information",
    "pinsker_gap",
    "shannon_entropy",
    "AsepParams",
    "AsepRepresentation",
    "IsingParams",
    "asep_candidate_representations",
    "asep_mps",
    "asep_representation",
    "asep_representation_for_regime",
    "asep_scalar_mps",
    "ising_entropy_cost_exact",
    "ising_mps",
    "MarkovGenerator",
    "asep_generator",
    "steady_state",
    "steady_state_table",
    "McConfig",
    "MiEstimate",
    "SampleRun",
    "available_backends",
    "default_backend",
    "estimate_mutual_information",
    "load_run",
    "save_run",
    "simulate",
    "site_density_estimates",
    "CapacityError",
    "ConvergenceError",
    "DegenerateInputError",
    "InconsistencyError",
    "NotNormalizedError",
    "StructureError",
]
