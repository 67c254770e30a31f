"""Photon-number statistics of two-mode squeezed vacua and thermal light.

Everything is expressed in the number basis.  A squeezed pair with real
squeezing ``zeta`` puts probability ``(1 - t**2) * t**(2n)`` (``t = tanh zeta``)
on the diagonal state ``|n, n>``; tracing out either partner leaves a
geometric (Bose-Einstein) law that is indistinguishable from a thermal mode.
The thermofield identification ``tanh zeta = exp(-hbar omega / 2 k_B T)``
maps between the two descriptions.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._numerics import artanh_exp_neg, log_coth, sinh_squared
from .constants import SI
from .errors import DomainError

THERMAL = "thermal"
SQUEEZED = "squeezed"

# Largest tanh(zeta) we accept before the squeezing parameter stops being
# representable; one ulp below 1.
_TANH_LIMIT = math.nextafter(1.0, 0.0)


def check_zeta(zeta):
    zeta = float(zeta)
    if not math.isfinite(zeta) or zeta < 0.0:
        raise DomainError(f"squeezing parameter must be finite and >= 0, got {zeta!r}")
    return zeta


def check_positive(value, name):
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise DomainError(f"{name} must be finite and > 0, got {value!r}")
    return value


def check_nonneg(value, name):
    value = float(value)
    if not math.isfinite(value) or value < 0.0:
        raise DomainError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def _check_n_max(n_max):
    if int(n_max) != n_max or n_max < 0:
        raise DomainError(f"n_max must be a nonnegative integer, got {n_max!r}")
    return int(n_max)


@dataclass(frozen=True)
class NumberDistribution:
    """Truncated geometric photon-number law.

    ``probs[n]`` holds P(n) for ``n <= n_max``; ``tail_mass`` is the exact
    probability of ``n > n_max``.  ``ratio`` is the geometric ratio
    P(n+1)/P(n) and ``nbar`` the mean of the untruncated law; together they
    give closed-form moments of the discarded tail.
    """

    probs: np.ndarray
    tail_mass: float
    ratio: float
    nbar: float

    @property
    def n_max(self):
        return len(self.probs) - 1

    def total(self):
        return float(np.sum(self.probs)) + self.tail_mass

    def _tail_moments(self):
        # Beyond n_max the law is n_max + 1 + Geometric(nbar).
        start = self.n_max + 1
        m = self.nbar
        first = self.tail_mass * (start + m)
        second = self.tail_mass * (start * start + 2 * start * m + m * (2 * m + 1))
        return first, second

    def mean(self):
        n = np.arange(len(self.probs))
        return float(np.dot(n, self.probs)) + self._tail_moments()[0]

    def variance(self):
        n = np.arange(len(self.probs), dtype=float)
        first, second = self._tail_moments()
        m1 = float(np.dot(n, self.probs)) + first
        m2 = float(np.dot(n * n, self.probs)) + second
        return m2 - m1 * m1


@dataclass(frozen=True)
class JointDistribution:
    """Joint law of (n_a, n_b) on the square ``0..n_max``.

    ``tail_mass`` is the probability of leaving the square.
    """

    probs: np.ndarray
    tail_mass: float

    def marginal_a(self):
        return self.probs.sum(axis=1)

    def marginal_b(self):
        return self.probs.sum(axis=0)

    def covariance(self):
        n = np.arange(self.probs.shape[0], dtype=float)
        pa, pb = self.marginal_a(), self.marginal_b()
        return float(n @ self.probs @ n) - float(n @ pa) * float(n @ pb)

    def variance_of_difference(self):
        """Var(n_a - n_b) by direct summation over the truncated square."""
        n = np.arange(self.probs.shape[0], dtype=float)
        d = n[:, None] - n[None, :]
        mass = self.probs.sum()
        mu = float(np.sum(d * self.probs)) / mass
        return float(np.sum((d - mu) ** 2 * self.probs)) / mass


@dataclass(frozen=True)
class PairVariancePrediction:
    value: float
    source_kind: str


def _geometric(ratio, p0, nbar, n_max):
    n = np.arange(n_max + 1)
    probs = p0 * np.power(ratio, n)
    tail = ratio ** (n_max + 1)
    return NumberDistribution(probs, float(tail), float(ratio), float(nbar))


def mean_occupation_squeezed(zeta):
    """<N_a> = sinh^2(zeta) on the two-mode squeezed vacuum."""
    return float(sinh_squared(check_zeta(zeta)))


def number_distribution_squeezed(zeta, n_max):
    zeta = check_zeta(zeta)
    n_max = _check_n_max(n_max)
    t2 = math.tanh(zeta) ** 2
    p0 = 1.0 / math.cosh(zeta) ** 2 if zeta < 300 else 0.0
    return _geometric(t2, p0, mean_occupation_squeezed(zeta), n_max)


def joint_number_distribution_squeezed(zeta, n_max):
    """Joint counts of the pair; only the diagonal ``n_a == n_b`` is populated."""
    single = number_distribution_squeezed(zeta, n_max)
    return JointDistribution(np.diag(single.probs), single.tail_mass)


def number_distribution_thermal(nbar, n_max):
    nbar = check_nonneg(nbar, "nbar")
    n_max = _check_n_max(n_max)
    return _geometric(nbar / (nbar + 1.0), 1.0 / (nbar + 1.0), nbar, n_max)


def joint_number_distribution_thermal(nbar_a, nbar_b, n_max):
    """Product law of two independent thermal modes."""
    a = number_distribution_thermal(nbar_a, n_max)
    b = number_distribution_thermal(nbar_b, n_max)
    inside = (1.0 - a.tail_mass) * (1.0 - b.tail_mass)
    return JointDistribution(np.outer(a.probs, b.probs), 1.0 - inside)


def squeeze_from_energy_ratio(x):
    """zeta with tanh(zeta) = exp(-x / 2), where x = hbar omega / (k_B T)."""
    x = check_positive(x, "hbar*omega/(k_B*T)")
    if math.exp(-0.5 * x) >= _TANH_LIMIT:
        raise OverflowError(
            f"hbar*omega/(k_B*T) = {x!r} is too small: tanh(zeta) rounds to 1"
        )
    return float(artanh_exp_neg(0.5 * x))


def energy_ratio_from_squeeze(zeta):
    """x = hbar omega / (k_B T) = 2 ln coth(zeta); ``inf`` for the vacuum."""
    zeta = check_zeta(zeta)
    if zeta == 0.0:
        return math.inf
    return float(2.0 * log_coth(zeta))


def squeeze_from_temperature(omega, T, units=SI):
    omega = check_positive(omega, "omega")
    T = check_positive(T, "temperature")
    return squeeze_from_energy_ratio(units.hbar * omega / (units.k_b * T))


def effective_temperature(omega, zeta, units=SI):
    """k_B T = hbar omega / (2 ln coth zeta).

    The vacuum (``zeta == 0``) returns exactly ``0.0``, the zero-temperature
    signal, rather than raising.
    """
    omega = check_positive(omega, "omega")
    zeta = check_zeta(zeta)
    if zeta == 0.0:
        return 0.0
    return units.hbar * omega / (units.k_b * 2.0 * float(log_coth(zeta)))


def thermal_occupation(x):
    """Bose-Einstein occupation 1/(e^x - 1), safe for very large x."""
    x = check_positive(x, "hbar*omega/(k_B*T)")
    return math.exp(-x) / -math.expm1(-x)


def thermal_mean_occupation(omega, T, units=SI):
    omega = check_positive(omega, "omega")
    T = check_positive(T, "temperature")
    return thermal_occupation(units.hbar * omega / (units.k_b * T))


def pair_variance_thermal(nbar_a, nbar_b):
    nbar_a = check_nonneg(nbar_a, "nbar_a")
    nbar_b = check_nonneg(nbar_b, "nbar_b")
    return PairVariancePrediction(nbar_a * (nbar_a + 1.0) + nbar_b * (nbar_b + 1.0), THERMAL)


def pair_variance_squeezed():
    return PairVariancePrediction(0.0, SQUEEZED)
