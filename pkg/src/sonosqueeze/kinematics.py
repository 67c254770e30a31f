"""Finite-bubble kinematics: the spherical form factor and pair angular spread.

Cutting the spatial integral off at the bubble radius ``R`` replaces the
momentum delta function by ``S(|k1 + k2| R)``, the Fourier transform of a
solid sphere.  For equal-magnitude partners ``|k1 + k2| = 2 k sin(theta/2)``
where ``theta`` is the deviation from exact back-to-back emission.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .bogolubov import beta_squared_diagonal
from .constants import SI
from .errors import DomainError
from .states import check_positive

SERIES_SWITCH = 1e-3
PLANEWAVE_THRESHOLD = 10.0
FIRST_ZERO = 4.493409457909064  # smallest positive root of tan x = x

# Taylor coefficients of (sin x - x cos x) / x^3 in powers of x^2.
_SERIES = (1.0 / 3.0, -1.0 / 30.0, 1.0 / 840.0, -1.0 / 45360.0, 1.0 / 3991680.0)


@dataclass(frozen=True)
class BubbleGeometry:
    radius_R: float

    def __post_init__(self):
        check_positive(self.radius_R, "radius_R")

    @property
    def volume(self):
        return 4.0 / 3.0 * math.pi * self.radius_R**3


@dataclass(frozen=True)
class AngularSample:
    deviation_angle: float

    def __post_init__(self):
        if not 0.0 <= self.deviation_angle <= math.pi:
            raise DomainError(f"deviation angle {self.deviation_angle!r} outside [0, pi]")


def _shape_series(x):
    x2 = x * x
    acc = np.zeros_like(x)
    for c in reversed(_SERIES):
        acc = acc * x2 + c
    return acc


def _shape_closed(x):
    # sin x - x cos x cancels catastrophically at small x; extended precision
    # keeps the closed form usable down to x ~ 1e-4.
    xl = np.asarray(x, dtype=np.longdouble)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = (np.sin(xl) - xl * np.cos(xl)) / xl**3
    return out.astype(float)


def sphere_shape(x, method="auto"):
    """Dimensionless (sin x - x cos x) / x^3, equal to 1/3 at x = 0."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("form-factor argument must be >= 0")
    if method == "series":
        out = _shape_series(x)
    elif method == "closed":
        out = _shape_closed(x)
    elif method == "auto":
        small = x < SERIES_SWITCH
        out = np.where(small, _shape_series(x), _shape_closed(np.where(small, 1.0, x)))
    else:
        raise ValueError(f"unknown method {method!r}")
    return out[()] if out.ndim == 0 else out


def form_factor(q, geometry, method="auto"):
    """S(q R) = 4 pi / q^3 [sin(qR) - qR cos(qR)], in units of volume."""
    R = geometry.radius_R
    return 4.0 * math.pi * R**3 * sphere_shape(np.asarray(q, dtype=float) * R, method)


def pair_weight(k1, k2, profile, geometry, units=SI):
    """Squared Bogolubov weight of the pair (k1, k2) inside a finite bubble.

    The dynamical factor is the diagonal |beta|^2 at the mean magnitude; the
    angular structure comes entirely from |S(|k1 + k2| R)|^2.
    """
    k1 = np.asarray(k1, dtype=float)
    k2 = np.asarray(k2, dtype=float)
    m1 = float(np.linalg.norm(k1))
    m2 = float(np.linalg.norm(k2))
    if m1 <= 0 or m2 <= 0:
        raise DomainError("pair momenta must be nonzero")
    dynamics = float(beta_squared_diagonal(profile, 0.5 * (m1 + m2), units))
    q = float(np.linalg.norm(k1 + k2))
    return dynamics * float(form_factor(q, geometry)) ** 2


def angular_density(theta, kR):
    """Unnormalised density of the deviation angle for equal magnitudes."""
    theta = np.asarray(theta, dtype=float)
    x = 2.0 * kR * np.sin(0.5 * theta)
    return sphere_shape(x) ** 2 * np.sin(theta)


@lru_cache(maxsize=32)
def _inverse_cdf_table(kR):
    # Work in x = q R = 2 kR sin(theta/2), where sin(theta) d(theta) is
    # proportional to x dx and the density is x * shape(x)^2.
    x_max = 2.0 * kR
    dense_end = min(x_max, 200.0)
    grid = np.linspace(0.0, dense_end, 40001)
    if x_max > dense_end:
        n_tail = int(math.ceil((x_max - dense_end) / 0.05)) + 1
        grid = np.concatenate([grid, np.linspace(dense_end, x_max, n_tail)[1:]])
    mid = 0.5 * (grid[1:] + grid[:-1])
    dens = lambda x: x * sphere_shape(x) ** 2  # noqa: E731
    f = dens(grid)
    cell = np.diff(grid) / 6.0 * (f[:-1] + 4.0 * dens(mid) + f[1:])
    cdf = np.concatenate([[0.0], np.cumsum(cell)])
    cdf /= cdf[-1]
    return grid, cdf


def _check_kR(k_mag, geometry):
    kR = check_positive(k_mag, "k_mag") * geometry.radius_R
    if not math.isfinite(kR):
        raise DomainError("k R must be finite")
    return kR


def deviation_quantile(u, k_mag, geometry):
    """Deviation angle at cumulative probability ``u`` (inverse CDF)."""
    kR = _check_kR(k_mag, geometry)
    grid, cdf = _inverse_cdf_table(kR)
    u = np.asarray(u, dtype=float)
    x = np.interp(u, cdf, grid)
    s = np.minimum(x / (2.0 * kR), 1.0)
    return 2.0 * np.arcsin(s)


def sample_pair_directions(k_mag, geometry, rng, size):
    """Draw ``size`` deviation angles from ``rng`` (a numpy Generator)."""
    return deviation_quantile(rng.random(size), k_mag, geometry)


def sample_pair_direction(k_mag, geometry, rng):
    return AngularSample(float(deviation_quantile(rng.random(), k_mag, geometry)))


def planewave_validity(omega, n, geometry, units=SI):
    """rho = omega n R / c; plane waves are trustworthy when rho >> 1."""
    omega = check_positive(omega, "omega")
    n = check_positive(n, "n")
    return omega * n * geometry.radius_R / units.c


def planewave_valid(rho, threshold=PLANEWAVE_THRESHOLD):
    return rho >= threshold
