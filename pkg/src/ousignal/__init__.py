"""Numerical lab for signal transmission through a noisy spectral channel.

Simulate the exact solution of a linear evolution equation driven by scalar
Gaussian noise on the periodic interval [-l, l), verify the analytic noise
moments by Monte Carlo, and recover the transmitted signal from observed
samples with a sample-mean inverse-propagation estimator.
"""

from .config import RunConfig, load_config, parse_config_text
from .errors import (
    AliasingError,
    AmplificationError,
    ConfigError,
    GrowthOverflowError,
    KLDomainError,
    OusignalError,
)
from .estimation import (
    ConvergenceStudy,
    EstimateReport,
    convergence_study,
    error_report,
    estimate_signal,
    estimate_until_stable,
    run_estimate,
)
from .fourier import FourierSignal, GridSignal, extract_coefficients, sup_distance
from .model import (
    SampleSet,
    ScenarioConfig,
    analytic_mean,
    empirical_moments,
    evolve_frames,
    sample_batch,
    sample_source,
    sample_stream,
    sample_transformed,
)
from .noise import (
    NoiseParams,
    RandomSource,
    gaussian_inverse_cdf,
    noise_covariance,
    noise_variance,
    nth_prime,
    ou_integral_exact,
    ou_integral_series,
    ou_joint_pairs,
    quasi_gaussian,
    wiener_path_value,
)
from .spectral import (
    ModeSpectrum,
    OperatorSpec,
    StabilityReport,
    inverse_propagate,
    mode_spectrum,
    propagate,
    stability_report,
)

__version__ = "0.1.0"

__all__ = [
    "AliasingError",
    "AmplificationError",
    "ConfigError",
    "ConvergenceStudy",
    "EstimateReport",
    "FourierSignal",
    "GridSignal",
    "GrowthOverflowError",
    "KLDomainError",
    "ModeSpectrum",
    "NoiseParams",
    "OperatorSpec",
    "OusignalError",
    "RandomSource",
    "RunConfig",
    "SampleSet",
    "ScenarioConfig",
    "StabilityReport",
    "analytic_mean",
    "convergence_study",
    "empirical_moments",
    "error_report",
    "estimate_signal",
    "estimate_until_stable",
    "evolve_frames",
    "extract_coefficients",
    "gaussian_inverse_cdf",
    "inverse_propagate",
    "load_config",
    "mode_spectrum",
    "noise_covariance",
    "noise_variance",
    "nth_prime",
    "ou_integral_exact",
    "ou_integral_series",
    "ou_joint_pairs",
    "parse_config_text",
    "propagate",
    "quasi_gaussian",
    "run_estimate",
    "sample_batch",
    "sample_source",
    "sample_stream",
    "sample_transformed",
    "stability_report",
    "sup_distance",
    "wiener_path_value",
]
