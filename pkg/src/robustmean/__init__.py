"""Robust location estimation toolkit.

Submodules:
  distmodel    parametric families, moments, Sobol/pseudo sampling
  estimators   order-statistic location estimators
  kernels      U-statistic kernel sequences and Hodges-Lehmann means
  bounds       closed-form worst-case and concentration bounds
  orderliness  numerical orderliness and inequality certificates
  benchcli     Monte-Carlo benchmark harness (CSV)
  cli          command-line interface
"""

from .distmodel import DistributionSpec, MomentSummary, draw_sample, sobol_sequence
from .errors import (
    CapacityError,
    ConfigError,
    DomainError,
    RobustMeanError,
)
from .estimators import (
    SortedSample,
    TrimSpec,
    binomial_mean,
    block_winsorized_mean,
    median,
    quantile_average,
    stratified_mean,
    stratified_quantile_mean,
    trimmed_mean,
    winsorized_mean,
)
from .kernels import (
    KernelSpec,
    breakdown_mapping,
    gamma_median_of_means,
    kernel_sequence,
    median_of_randomized_means,
    weighted_hl_mean,
)

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "ConfigError",
    "DistributionSpec",
    "DomainError",
    "KernelSpec",
    "MomentSummary",
    "RobustMeanError",
    "SortedSample",
    "TrimSpec",
    "binomial_mean",
    "block_winsorized_mean",
    "breakdown_mapping",
    "draw_sample",
    "gamma_median_of_means",
    "kernel_sequence",
    "median",
    "median_of_randomized_means",
    "quantile_average",
    "sobol_sequence",
    "stratified_mean",
    "stratified_quantile_mean",
    "trimmed_mean",
    "weighted_hl_mean",
    "winsorized_mean",
]
