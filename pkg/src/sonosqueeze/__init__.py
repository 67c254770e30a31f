"""Thermal versus two-mode-squeezed photon statistics for sonoluminescence models."""

__version__ = "0.1.0"

from .bogolubov import (  # noqa: E402
    RefractiveTransition,
    beta_squared_adiabatic,
    beta_squared_diagonal,
    build_spectrum,
    effective_temperature_adiabatic,
    fine_tuning_residual,
    squeeze_from_beta,
    tau,
)
from .kinematics import BubbleGeometry, form_factor, pair_weight, planewave_validity  # noqa: E402
from .montecarlo import DetectorConfig, SourceConfig, classify, run_ensemble  # noqa: E402
from .states import (  # noqa: E402
    effective_temperature,
    mean_occupation_squeezed,
    number_distribution_squeezed,
    number_distribution_thermal,
    pair_variance_squeezed,
    pair_variance_thermal,
    squeeze_from_temperature,
    thermal_mean_occupation,
)
