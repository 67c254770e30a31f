"""Pair creation by a homogeneous medium whose refractive index jumps in time.

The medium goes from index ``n_in`` to ``n_out`` over a timescale ``t_0``.
The comoving wavenumber ``k`` is conserved across the transition and the
frequency in each epoch is ``omega = c k / n``, so every hyperbolic argument
of the diagonal Bogolubov coefficient is a multiple of ``c k tau``.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import LOG_SPACE_THRESHOLD, log_coth, log_sinh
from .constants import SI
from .errors import DegenerateInputError, DomainError
from .states import check_positive, effective_temperature, squeeze_from_temperature

# c k tau separating the sudden plateau from the adiabatic Boltzmann tail.
REGIME_BOUNDARY = 1.0


@dataclass(frozen=True)
class RefractiveTransition:
    n_in: float
    n_out: float
    t_0: float

    def __post_init__(self):
        for name in ("n_in", "n_out"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 1.0:
                raise DomainError(f"{name} must be finite and >= 1, got {value!r}")
        check_positive(self.t_0, "t_0")

    @property
    def n_min(self):
        return min(self.n_in, self.n_out)


@dataclass(frozen=True)
class BetaSpectrum:
    omegas: np.ndarray
    beta_sq: np.ndarray
    zetas: np.ndarray
    temps: np.ndarray
    dn_domega: np.ndarray


@dataclass(frozen=True)
class FineTuningReport:
    omegas: np.ndarray
    kappas: np.ndarray
    coefficient_of_variation: float


@dataclass(frozen=True)
class AdiabaticTemperature:
    """Effective temperature of the adiabatic tail, computed two ways.

    ``verbatim`` is the closed form with ``8 pi`` in the denominator.
    ``composed`` chains the Boltzmann factor through the squeezing and
    temperature maps.  They differ by a constant factor, kept visible in
    ``ratio = composed / verbatim``.
    """

    verbatim: float
    composed: float
    reference_omega: float

    @property
    def ratio(self):
        return self.composed / self.verbatim


def tau(profile):
    return math.pi * profile.t_0 / (profile.n_in**2 + profile.n_out**2)


def _ck_tau(profile, k, units):
    k = np.asarray(k, dtype=float)
    if np.any(~np.isfinite(k)) or np.any(k <= 0):
        raise DomainError("wavenumber k must be finite and > 0")
    return units.c * k * tau(profile)


def _beta_sq_direct(x, n_in, n_out):
    with np.errstate(over="ignore", invalid="ignore"):
        return np.sinh(abs(n_in - n_out) * x) ** 2 / (
            np.sinh(2.0 * n_in * x) * np.sinh(2.0 * n_out * x)
        )


def _beta_sq_log(x, n_in, n_out):
    if n_in == n_out:
        return np.zeros_like(x)
    log_num = 2.0 * log_sinh(abs(n_in - n_out) * x)
    log_den = log_sinh(2.0 * n_in * x) + log_sinh(2.0 * n_out * x)
    return np.exp(log_num - log_den)


def beta_squared_from_ck_tau(profile, x, method="auto"):
    """Diagonal |beta|^2 as a function of the dimensionless ``x = c k tau``.

    ``method`` is ``"auto"`` (log space only where an argument exceeds the
    threshold), ``"direct"`` or ``"log"``.
    """
    x = np.asarray(x, dtype=float)
    n_in, n_out = profile.n_in, profile.n_out
    if method == "direct":
        out = _beta_sq_direct(x, n_in, n_out)
    elif method == "log":
        out = _beta_sq_log(x, n_in, n_out)
    elif method == "auto":
        big = 2.0 * max(n_in, n_out) * x > LOG_SPACE_THRESHOLD
        out = np.where(
            big,
            _beta_sq_log(np.where(big, x, 1.0), n_in, n_out),
            _beta_sq_direct(np.where(big, 1.0, x), n_in, n_out),
        )
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if out.ndim == 0 else out


def beta_squared_diagonal(profile, k, units=SI, method="auto"):
    """|beta_k|^2 for back-to-back modes of wavenumber ``k``.

    The momentum delta function and the volume factor are left out; the
    result is the dimensionless occupation per mode.
    """
    return beta_squared_from_ck_tau(profile, _ck_tau(profile, k, units), method)


def sudden_limit(profile):
    return (profile.n_in - profile.n_out) ** 2 / (4.0 * profile.n_in * profile.n_out)


def beta_squared_adiabatic(profile, omega_out):
    omega_out = np.asarray(omega_out, dtype=float)
    if np.any(omega_out < 0):
        raise DomainError("omega_out must be >= 0")
    out = np.exp(-4.0 * profile.n_min * profile.n_out * omega_out * tau(profile))
    return out[()] if out.ndim == 0 else out


def squeeze_from_beta(beta_sq):
    """zeta with sinh^2(zeta) = |beta|^2."""
    beta_sq = np.asarray(beta_sq, dtype=float)
    if np.any(~np.isfinite(beta_sq)) or np.any(beta_sq < 0):
        raise DomainError("|beta|^2 must be finite and >= 0")
    out = np.arcsinh(np.sqrt(beta_sq))
    return out[()] if out.ndim == 0 else out


def effective_temperature_adiabatic(profile, units=SI, reference_boltzmann_exponent=40.0):
    """Single temperature of the adiabatic tail.

    The composed value is evaluated at the frequency where the Boltzmann
    exponent equals ``reference_boltzmann_exponent``; deep in the tail the
    sinh/tanh difference is far below double precision.
    """
    n_sum = profile.n_in**2 + profile.n_out**2
    n_prod = profile.n_out * profile.n_min
    verbatim = units.hbar / (8.0 * math.pi * profile.t_0) * n_sum / n_prod / units.k_b

    omega_ref = reference_boltzmann_exponent / (4.0 * n_prod * tau(profile))
    zeta = squeeze_from_beta(beta_squared_adiabatic(profile, omega_ref))
    composed = effective_temperature(omega_ref, float(zeta), units)
    return AdiabaticTemperature(verbatim, composed, omega_ref)


def _temperatures(omegas, zetas, units):
    return np.array([effective_temperature(w, z, units) for w, z in zip(omegas, zetas)])


def build_spectrum(profile, omega_grid, units=SI):
    """Per-mode |beta|^2, squeezing and temperature on an out-medium frequency grid.

    ``dn_domega`` is the photon-number density up to an arbitrary
    (volume-dependent) constant, using the isotropic measure omega^2.
    """
    omegas = np.asarray(omega_grid, dtype=float)
    if omegas.ndim != 1 or omegas.size == 0:
        raise DomainError("omega grid must be a nonempty 1-d sequence")
    if np.any(~np.isfinite(omegas)) or np.any(omegas <= 0):
        raise DomainError("omega grid must be finite and positive")
    if np.any(np.diff(omegas) <= 0):
        raise DomainError("omega grid must be strictly increasing")
    k = profile.n_out * omegas / units.c
    beta_sq = np.atleast_1d(beta_squared_diagonal(profile, k, units))
    zetas = np.atleast_1d(squeeze_from_beta(beta_sq))
    temps = _temperatures(omegas, zetas, units)
    return BetaSpectrum(omegas, beta_sq, zetas, temps, omegas**2 * beta_sq)


def spectrum_from_temperature(omega_grid, T, units=SI):
    """Spectrum in which every mode shares the temperature ``T`` exactly."""
    omegas = np.asarray(omega_grid, dtype=float)
    zetas = np.array([squeeze_from_temperature(w, T, units) for w in omegas])
    beta_sq = np.sinh(zetas) ** 2
    temps = _temperatures(omegas, zetas, units)
    return BetaSpectrum(omegas, beta_sq, zetas, temps, omegas**2 * beta_sq)


def omega_window_from_ck_tau(profile, lo, hi):
    """Convert a window in ``c k tau`` into out-medium angular frequencies."""
    # k = n_out omega / c, so c k tau = n_out tau omega in any unit system.
    scale = profile.n_out * tau(profile)
    return lo / scale, hi / scale


def fine_tuning_residual(spectrum, omega_window):
    """Spread of kappa_k = ln coth(zeta_k) / omega_k over a frequency window.

    A single effective temperature for all modes in the window means kappa is
    constant; the coefficient of variation measures the departure from that.
    """
    lo, hi = omega_window
    sel = (spectrum.omegas >= lo) & (spectrum.omegas <= hi)
    if np.count_nonzero(sel) < 3:
        raise DegenerateInputError(
            f"window [{lo!r}, {hi!r}] contains fewer than 3 grid points"
        )
    omegas = spectrum.omegas[sel]
    zetas = spectrum.zetas[sel]
    if np.any(zetas <= 0):
        raise DegenerateInputError("window contains modes with zero squeezing")
    kappas = log_coth(zetas) / omegas
    mean = float(np.mean(kappas))
    cv = float(np.std(kappas)) / mean
    return FineTuningReport(omegas, kappas, cv)


def regime(profile, k, units=SI):
    """``"sudden"`` or ``"adiabatic"`` relative to the c k tau = 1 boundary."""
    x = float(_ck_tau(profile, k, units))
    return "sudden" if x < REGIME_BOUNDARY else "adiabatic"


__all__ = [
    "AdiabaticTemperature",
    "BetaSpectrum",
    "FineTuningReport",
    "RefractiveTransition",
    "beta_squared_adiabatic",
    "beta_squared_diagonal",
    "beta_squared_from_ck_tau",
    "build_spectrum",
    "effective_temperature_adiabatic",
    "fine_tuning_residual",
    "omega_window_from_ck_tau",
    "regime",
    "spectrum_from_temperature",
    "squeeze_from_beta",
    "sudden_limit",
    "tau",
]
