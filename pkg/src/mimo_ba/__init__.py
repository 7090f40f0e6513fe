"""Bit allocation for variable-resolution ADCs in hybrid mmWave MIMO receivers."""

from .bitalloc import BaResult, BSet, crlb_ba, enumerate_bset, es_ba, fixed_ba, kf_score, mmqse_ba
from .channel import (
    ArrayConfig,
    ChannelDecomposition,
    ChannelParams,
    generate_channel,
    load_channel,
    save_channel,
    svd_decompose,
    ula_response,
)
from .errors import (
    ConfigurationError,
    DimensionError,
    DomainError,
    InfeasibleBudgetError,
    MimoBaError,
    NumericalSingularityError,
    PreconditionError,
    UnsupportedResolutionError,
)
from .experiment import (
    ExperimentConfig,
    complexity_counts,
    emit_csv,
    load_config,
    parse_config,
    read_csv,
    run_experiment,
)
from .hybrid import HybridFactorization, factor, factor_combiner
from .metrics import (
    LinkModel,
    capacity,
    capacity_inf,
    crlb,
    empirical_mse,
    factored_link,
    ideal_link,
    mse_delta,
    mse_matrix,
    pseudo_covariance_check,
    simulate_rx,
    waterfill,
)
from .quantization import (
    AqnmModel,
    PowerModel,
    QuantTable,
    adc_power,
    build_aqnm,
    f_of_b,
    g_of_b,
    loading_terms,
)

__all__ = [
    "BaResult",
    "BSet",
    "crlb_ba",
    "enumerate_bset",
    "es_ba",
    "fixed_ba",
    "kf_score",
    "mmqse_ba",
    "ArrayConfig",
    "ChannelDecomposition",
    "ChannelParams",
    "generate_channel",
    "load_channel",
    "save_channel",
    "svd_decompose",
    "ula_response",
    "ConfigurationError",
    "DimensionError",
    "DomainError",
    "InfeasibleBudgetError",
    "MimoBaError",
    "NumericalSingularityError",
    "PreconditionError",
    "UnsupportedResolutionError",
    "ExperimentConfig",
    "complexity_counts",
    "emit_csv",
    "load_config",
    "parse_config",
    "read_csv",
    "run_experiment",
    "HybridFactorization",
    "factor",
    "factor_combiner",
    "LinkModel",
    "capacity",
    "capacity_inf",
    "crlb",
    "empirical_mse",
    "factored_link",
    "ideal_link",
    "mse_delta",
    "mse_matrix",
    "pseudo_covariance_check",
    "simulate_rx",
    "waterfill",
    "AqnmModel",
    "PowerModel",
    "QuantTable",
    "adc_power",
    "build_aqnm",
    "f_of_b",
    "g_of_b",
    "loading_terms",
]

__version__ = "0.1.0"
