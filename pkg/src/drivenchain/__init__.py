"""Oscillating steady states of a boundary-driven free-fermion chain.

Computes the complex amplitude matrix of two-point correlations for a
chain driven by a.c.-modulated boundary baths, and classifies the
transport regime (ballistic, anomalous, algebraic, insulating) from the
scaling of the midpoint current with chain length.
"""

from .chain import (
    OMEGA_C,
    ChainParams,
    ModeSpectrum,
    ResonanceTable,
    build_static_matrices,
    mode_energies,
    resonance_frequencies,
    resonance_frequency,
)
from .errors import (
    DefectiveMatrixError,
    DrivenChainError,
    NotConvergedError,
    SingularSystemError,
    SizeGuardError,
)
from .exact import CovarianceMatrix, residual_norm, solve_dense, solve_spectral
from .observables import (
    ObservableProfile,
    continuity_residual,
    current_profile,
    magnetization_profile,
    profiles,
)
from .weak import (
    covariance_element_weak,
    covariance_matrix_weak,
    midpoint_current_weak,
    pattern_overlap,
    resonance_pattern,
)
from .asymptotics import (
    critical_covariance_approx,
    evanescence_length,
    greens_covariance_approx,
    greens_critical,
    image_sum_critical,
    lattice_green,
    series_covariance,
)
from .oracle import extract_harmonic, integrate_covariance, random_antisymmetric
from .fits import (
    ScalingFit,
    SweepRecord,
    fit_exponential,
    fit_power_law,
    scaling_study,
    sweep_frequency,
    windowed_average,
)
from .export import export_heatmap, export_records, read_heatmap, read_records

__version__ = "0.1.0"

__all__ = [
    "OMEGA_C",
    "ChainParams",
    "ModeSpectrum",
    "ResonanceTable",
    "build_static_matrices",
    "mode_energies",
    "resonance_frequencies",
    "resonance_frequency",
    "DrivenChainError",
    "SizeGuardError",
    "SingularSystemError",
    "DefectiveMatrixError",
    "NotConvergedError",
    "CovarianceMatrix",
    "residual_norm",
    "solve_dense",
    "solve_spectral",
    "ObservableProfile",
    "profiles",
    "current_profile",
    "magnetization_profile",
    "continuity_residual",
    "covariance_matrix_weak",
    "covariance_element_weak",
    "midpoint_current_weak",
    "resonance_pattern",
    "pattern_overlap",
    "greens_critical",
    "critical_covariance_approx",
    "image_sum_critical",
    "series_covariance",
    "lattice_green",
    "greens_covariance_approx",
    "evanescence_length",
    "integrate_covariance",
    "extract_harmonic",
    "random_antisymmetric",
    "ScalingFit",
    "SweepRecord",
    "fit_power_law",
    "fit_exponential",
    "windowed_average",
    "scaling_study",
    "sweep_frequency",
    "export_records",
    "export_heatmap",
    "read_records",
    "read_heatmap",
    "__version__",
]
