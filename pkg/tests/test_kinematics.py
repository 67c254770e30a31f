import math

import mpmath as mp
import numpy as np
import pytest
from scipy.integrate import quad
from scipy.optimize import brentq

from sonosqueeze.bogolubov import RefractiveTransition, beta_squared_diagonal
from sonosqueeze.constants import C_LIGHT, NATURAL
from sonosqueeze.errors import DomainError
from sonosqueeze.kinematics import (
    AngularSample,
    BubbleGeometry,
    FIRST_ZERO,
    deviation_quantile,
    form_factor,
    pair_weight,
    planewave_valid,
    planewave_validity,
    sample_pair_direction,
    sample_pair_directions,
    sphere_shape,
)

UNIT = BubbleGeometry(1.0)
PROFILE = RefractiveTransition(1.0, 1.3, 1e-15)


def theta_density(theta, kR):
    """Independent deviation-angle density, written from the sphere integral."""
    x = 2.0 * kR * math.sin(0.5 * theta)
    if x < 1e-2:
        shape = 1.0 / 3.0 - x * x / 30.0
    else:
        shape = (math.sin(x) - x * math.cos(x)) / x**3
    return shape * shape * math.sin(theta)


def theta_cdf_oracle(kR, thetas):
    """Cumulative probability at each theta by adaptive quadrature."""
    edges = np.concatenate([[0.0], np.asarray(thetas, dtype=float)])
    pieces = [quad(theta_density, a, b, args=(kR,), limit=400)[0] for a, b in zip(edges[:-1], edges[1:])]
    total = quad(theta_density, 0.0, math.pi, args=(kR,), limit=800)[0]
    return np.cumsum(pieces) / total


def test_form_factor_at_zero_is_sphere_volume():
    for R in (1e-7, 1.0, 3.5):
        g = BubbleGeometry(R)
        assert form_factor(0.0, g) == pytest.approx(4 / 3 * math.pi * R**3, rel=1e-12)


def test_form_factor_first_zero_by_bisection():
    root = brentq(lambda x: math.tan(x) - x, 4.4, 4.6, xtol=1e-14)
    assert abs(root - 4.493409) < 1e-5
    assert FIRST_ZERO == pytest.approx(root, abs=1e-12)
    g = BubbleGeometry(2.0)
    assert abs(form_factor(root / 2.0, g)) < 1e-12 * form_factor(0.0, g)


def test_form_factor_at_pi():
    mp.mp.dps = 40
    exact = float(4 * mp.pi / mp.pi**3 * (mp.sin(mp.pi) - mp.pi * mp.cos(mp.pi)))
    assert form_factor(math.pi, UNIT) == pytest.approx(exact, rel=1e-14)
    assert exact == pytest.approx(4 / math.pi, rel=1e-15)


def test_form_factor_scales_with_radius_cubed():
    x = np.linspace(0, 30, 301)
    for R in (0.5, 2.0, 7.0):
        np.testing.assert_allclose(
            form_factor(x / R, BubbleGeometry(R)), R**3 * form_factor(x, UNIT), rtol=1e-12, atol=1e-14
        )


def test_series_and_closed_form_agree():
    x = np.geomspace(1e-4, 1e-2, 200)
    np.testing.assert_allclose(sphere_shape(x, "series"), sphere_shape(x, "closed"), rtol=1e-10)


@pytest.mark.parametrize("x", [1e-6, 1e-3, 0.3, 2.0, 17.0, 250.0])
def test_shape_matches_mpmath(x):
    mp.mp.dps = 50
    xm = mp.mpf(x)
    exact = float((mp.sin(xm) - xm * mp.cos(xm)) / xm**3)
    assert sphere_shape(x) == pytest.approx(exact, rel=1e-12, abs=1e-18)


def test_form_factor_global_maximum_at_zero():
    q = np.linspace(0, 500, 200001)
    S = form_factor(q, UNIT)
    assert np.all(S**2 <= S[0] ** 2)


def test_negative_argument_rejected():
    with pytest.raises(DomainError):
        form_factor(-1.0, UNIT)
    with pytest.raises(DomainError):
        BubbleGeometry(0.0)


def test_pair_weight_back_to_back():
    g = BubbleGeometry(2e-7)
    k1 = np.array([0.0, 0.0, 3e7])
    w = pair_weight(k1, -k1, PROFILE, g)
    F = float(beta_squared_diagonal(PROFILE, 3e7))
    assert w == pytest.approx(F * form_factor(0.0, g) ** 2, rel=1e-14)


def test_pair_weight_vanishes_at_form_factor_zero():
    g = BubbleGeometry(1e-6)
    k = 5e7
    # |k1 + k2| R = FIRST_ZERO with |k1| = |k2| = k
    half = math.asin(FIRST_ZERO / (2 * k * g.radius_R))
    k1 = k * np.array([0.0, 0.0, 1.0])
    k2 = -k * np.array([math.sin(2 * half), 0.0, math.cos(2 * half)])
    assert np.linalg.norm(k1 + k2) * g.radius_R == pytest.approx(FIRST_ZERO, rel=1e-12)
    w0 = pair_weight(k1, -k1, PROFILE, g)
    assert abs(pair_weight(k1, k2, PROFILE, g)) < 1e-20 * w0


def test_pair_weight_rotation_invariant():
    rng = np.random.default_rng(5)
    g = BubbleGeometry(1e-6)
    k1 = np.array([1e7, 2e6, -3e6])
    k2 = np.array([-9e6, -1e6, 2.5e6])
    a, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    assert pair_weight(a @ k1, a @ k2, PROFILE, g) == pytest.approx(
        pair_weight(k1, k2, PROFILE, g), rel=1e-10
    )


def test_pair_weight_peaks_back_to_back():
    g = BubbleGeometry(1e-6)
    k = 2e7
    k1 = np.array([0.0, 0.0, k])
    angles = np.linspace(0, math.pi, 400)
    w = [pair_weight(k1, -k * np.array([math.sin(t), 0, math.cos(t)]), PROFILE, g) for t in angles]
    assert int(np.argmax(w)) == 0


def test_sampler_large_kR_is_back_to_back():
    g = BubbleGeometry(1.0)
    theta = sample_pair_directions(1e4, g, np.random.default_rng(1), 200_000)
    assert np.median(theta) < 1e-3


def test_sampler_small_kR_is_isotropic():
    theta = sample_pair_directions(1e-3, UNIT, np.random.default_rng(2), 400_000)
    # median of a sin(theta) law is pi/2; stderr of the median ~ 1/(2 f(m) sqrt(n))
    stderr = 1.0 / (2 * 0.5 * math.sqrt(theta.size))
    assert abs(np.median(theta) - math.pi / 2) < 4 * stderr


def test_sampler_matches_quadrature_cdf():
    kR = 3.0
    theta = np.sort(sample_pair_directions(kR, UNIT, np.random.default_rng(3), 1_000_000))
    grid = np.linspace(0.01, math.pi, 200)
    oracle = theta_cdf_oracle(kR, grid)
    empirical = np.searchsorted(theta, grid, side="right") / theta.size
    assert np.max(np.abs(empirical - oracle)) < 0.002


@pytest.mark.parametrize("kR", [0.1, 1.0, 10.0, 100.0])
def test_quantile_function_matches_quadrature(kR):
    u = np.linspace(0.05, 0.95, 10)
    theta = deviation_quantile(u, kR, UNIT)
    np.testing.assert_allclose(theta_cdf_oracle(kR, theta), u, atol=2e-4)


def test_concentration_grows_with_kR():
    theta0 = 0.05
    kRs = [1.0, 3.0, 10.0, 30.0, 100.0, 300.0]
    fractions = [theta_cdf_oracle(kR, [theta0])[0] for kR in kRs]
    assert np.all(np.diff(fractions) > 0)


def test_sampling_is_reproducible_per_stream():
    a = sample_pair_directions(50.0, UNIT, np.random.default_rng(11), 1000)
    b = sample_pair_directions(50.0, UNIT, np.random.default_rng(11), 1000)
    assert np.array_equal(a, b)
    s = sample_pair_direction(50.0, UNIT, np.random.default_rng(11))
    assert isinstance(s, AngularSample) and 0 <= s.deviation_angle <= math.pi


def test_planewave_validity():
    g = BubbleGeometry(2e-6)
    n = 1.33
    assert planewave_validity(C_LIGHT / (n * g.radius_R), n, g) == pytest.approx(1.0)
    rho = planewave_validity(10 * C_LIGHT / (n * g.radius_R), n, g)
    assert rho == pytest.approx(10.0) and planewave_valid(rho)
    assert not planewave_valid(1.0)
    assert planewave_validity(3.0, 1.0, BubbleGeometry(4.0), NATURAL) == pytest.approx(
        2 * planewave_validity(3.0, 1.0, BubbleGeometry(2.0), NATURAL)
    )
