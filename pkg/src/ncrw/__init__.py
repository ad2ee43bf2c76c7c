"""Noncolliding continuous-time simple random walks on Z.

Independent +-1 walks conditioned never to meet form a determinantal
process: every spatio-temporal correlation is a determinant of one
correlation kernel built from modified Bessel functions.  The package
evaluates the kernels for finite initial configurations, for the infinite
equidistant lattice, and for the stationary sine-kernel equilibrium;
computes determinantal correlations and finite Fredholm determinants;
cross-validates everything with two Monte Carlo estimators; and measures
the relaxation of the lattice process to equilibrium.
"""

from .bessel import (characteristic_function, scaled_bessel_i,
                     scaled_bessel_i_all, signed_bessel_i,
                     transition_probability, transition_probability_poisson,
                     transition_probability_quadrature, truncation_radius)
from .correlations import (CorrelationEntry, CorrelationTable,
                           MultiTimePointSet, TestFunctionSet,
                           correlation_from_points, correlation_function,
                           density_profile, fredholm_generating_function)
from .errors import ConvergenceError
from .kernels import (KernelSpec, SpaceTimePoint, StationarySpec,
                      equal_time_kernel_matrix, gauge_transform,
                      kernel_finite, kernel_lattice, kernel_stationary,
                      lattice_kernel_g, lattice_kernel_remainder, sine_kernel)
from .martingales import (FiniteConfiguration, LatticeSpec,
                          backward_transform, backward_transform_exp,
                          esscher_weight, lagrange_basis, lattice_basis,
                          lattice_martingale, martingale_coefficients,
                          martingale_polynomial, site_martingale,
                          site_martingale_row, vandermonde)
from .montecarlo import (EstimatorResult, OccupationProduct, One, WalkEnsemble,
                         WalkPath, absorbed_weight_mean, empirical_correlation,
                         estimate_many, exit_time, h_transform_estimator,
                         martingale_determinant_estimator, sample_ensemble,
                         sample_walk, vandermonde_ratio)
from .relaxation import (RelaxationReport, aliasing_remainder, principal_term,
                         relaxation_gap, relaxation_sweep,
                         remainder_damping_max)

__version__ = "0.1.0"

__all__ = [
    "ConvergenceError",
    "CorrelationEntry", "CorrelationTable", "MultiTimePointSet",
    "TestFunctionSet", "correlation_from_points", "correlation_function",
    "density_profile", "fredholm_generating_function",
    "characteristic_function", "scaled_bessel_i", "scaled_bessel_i_all",
    "signed_bessel_i", "transition_probability",
    "transition_probability_poisson", "transition_probability_quadrature",
    "truncation_radius",
    "KernelSpec", "SpaceTimePoint", "StationarySpec",
    "equal_time_kernel_matrix", "gauge_transform", "kernel_finite",
    "kernel_lattice", "kernel_stationary", "lattice_kernel_g",
    "lattice_kernel_remainder", "sine_kernel",
    "FiniteConfiguration", "LatticeSpec", "backward_transform",
    "backward_transform_exp", "esscher_weight", "lagrange_basis",
    "lattice_basis", "lattice_martingale", "martingale_coefficients",
    "martingale_polynomial", "site_martingale", "site_martingale_row",
    "vandermonde",
    "EstimatorResult", "OccupationProduct", "One", "WalkEnsemble", "WalkPath",
    "absorbed_weight_mean", "empirical_correlation", "estimate_many",
    "exit_time", "h_transform_estimator", "martingale_determinant_estimator",
    "sample_ensemble", "sample_walk", "vandermonde_ratio",
    "RelaxationReport", "aliasing_remainder", "principal_term",
    "relaxation_gap", "relaxation_sweep", "remainder_damping_max",
    "__version__",
]
