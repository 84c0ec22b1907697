"""Momentum correlations of entangled Gaussian electron pairs."""

from .correlation import (
    CorrelationCurve,
    accidental_intensity,
    coincidence_intensity,
    correlation_R,
    correlation_R0,
    correlation_R1,
    correlation_curve,
)
from .data import (
    Dataset,
    load_dataset,
    save_curve,
    save_dataset,
    save_fit_result,
)
from .errors import (
    DataFormatError,
    DegenerateChannelError,
    InsufficientDataError,
    InsufficientSensitivityError,
    NonConvergenceError,
    PairCorrError,
    ToleranceNotMetError,
    UndefinedMetricError,
    UnsupportedMethodError,
)
from .fitting import (
    FitConfig,
    FitResult,
    approximation_error,
    fit,
    synthesize,
)
from .model import (
    ModelParams,
    SpinChannel,
    coordinate_uncertainty,
    mixture_density,
    mixture_marginal,
    overlap_j,
    pair_amplitude,
    rho_marginal,
    two_particle_density,
    wavepacket_amplitude,
)
from .oracle import (
    ChannelCrossSection,
    OracleResult,
    QuadratureSpec,
    general_channel_integral,
    intensity_cor_oracle,
    intensity_uncor_oracle,
    pair_norm_oracle,
    phi_differential,
    phi_norm_oracle,
    rho_single,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "ChannelCrossSection",
    "CorrelationCurve",
    "Dataset",
    "FitConfig",
    "FitResult",
    "ModelParams",
    "OracleResult",
    "QuadratureSpec",
    "SpinChannel",
    "accidental_intensity",
    "approximation_error",
    "coincidence_intensity",
    "coordinate_uncertainty",
    "correlation_R",
    "correlation_R0",
    "correlation_R1",
    "correlation_curve",
    "fit",
    "general_channel_integral",
    "intensity_cor_oracle",
    "intensity_uncor_oracle",
    "load_dataset",
    "mixture_density",
    "mixture_marginal",
    "overlap_j",
    "pair_amplitude",
    "pair_norm_oracle",
    "phi_differential",
    "phi_norm_oracle",
    "rho_marginal",
    "rho_single",
    "save_curve",
    "save_dataset",
    "save_fit_result",
    "synthesize",
    "two_particle_density",
    "wavepacket_amplitude",
    "PairCorrError",
    "DataFormatError",
    "DegenerateChannelError",
    "InsufficientDataError",
    "InsufficientSensitivityError",
    "NonConvergenceError",
    "ToleranceNotMetError",
    "UndefinedMetricError",
    "UnsupportedMethodError",
]
