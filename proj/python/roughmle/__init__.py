"""Rough homogenization: fGN covariances, multiscale simulation and the sigma^2 MLE."""

from ._core import (
    AlignmentError,
    ConfigError,
    ConvergenceFailure,
    DomainError,
    Error,
    FactorizationFailure,
    QuadratureError,
    StabilityError,
    bound_ratio,
    c_H_constant,
    estimate,
    experiment_csv,
    fgn_autocovariance,
    h_inner_product,
    inverse_spectral_norm,
    marchaud_derivative,
    mle_sigma2,
    run_experiment,
    sample_fgn,
    simulate,
)

__all__ = [
    "AlignmentError",
    "ConfigError",
    "ConvergenceFailure",
    "DomainError",
    "Error",
    "FactorizationFailure",
    "QuadratureError",
    "StabilityError",
    "bound_ratio",
    "c_H_constant",
    "estimate",
    "experiment_csv",
    "fgn_autocovariance",
    "h_inner_product",
    "inverse_spectral_norm",
    "marchaud_derivative",
    "mle_sigma2",
    "run_experiment",
    "sample_fgn",
    "simulate",
]
