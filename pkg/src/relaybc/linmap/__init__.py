"""Linear mapping - optimal relay re-encoding matrices and their log-det validation."""

from .mapping import (
    EigenProfile,
    MappingMatrix,
    build_mapping_matrix,
    logdet_hpd,
    numeric_logdet_rate,
    optimal_eigenvalues,
    relay_gain_rate,
    stacked_channel_matrix,
)
from .search import brute_force_eigen_search

__all__ = [
    "EigenProfile",
    "MappingMatrix",
    "build_mapping_matrix",
    "logdet_hpd",
    "numeric_logdet_rate",
    "optimal_eigenvalues",
    "relay_gain_rate",
    "stacked_channel_matrix",
    "brute_force_eigen_search",
]
