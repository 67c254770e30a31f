import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sonosqueeze.constants import HBAR, K_B, NATURAL
from sonosqueeze.errors import DomainError
from sonosqueeze.states import (
    effective_temperature,
    energy_ratio_from_squeeze,
    joint_number_distribution_squeezed,
    joint_number_distribution_thermal,
    mean_occupation_squeezed,
    number_distribution_squeezed,
    number_distribution_thermal,
    pair_variance_squeezed,
    pair_variance_thermal,
    squeeze_from_energy_ratio,
    squeeze_from_temperature,
    thermal_mean_occupation,
    thermal_occupation,
)

# Frozen from a 40-digit mpmath evaluation.
SINH2_ONE = 1.381097845541815729781
SINH2_HALF = 0.2715403174076218892390
ARTANH_INV_E = 0.3859684164526523625353

ZETA_HALF_RATIO = math.atanh(math.sqrt(0.5))  # tanh^2 zeta = 1/2


def test_mean_occupation_values():
    assert mean_occupation_squeezed(0.0) == 0.0
    assert mean_occupation_squeezed(1.0) == pytest.approx(SINH2_ONE, rel=1e-15)
    assert mean_occupation_squeezed(0.5) == pytest.approx(SINH2_HALF, rel=1e-15)


@pytest.mark.parametrize("zeta", [0.01, 0.3, 2.0, 12.0, 29.5, 30.5, 80.0])
def test_mean_occupation_matches_mpmath(zeta):
    mp.mp.dps = 40
    assert mean_occupation_squeezed(zeta) == pytest.approx(float(mp.sinh(zeta) ** 2), rel=1e-14)


@pytest.mark.parametrize("bad", [-1e-9, math.nan, math.inf])
def test_invalid_zeta_rejected(bad):
    with pytest.raises(DomainError):
        mean_occupation_squeezed(bad)


def test_squeezed_distribution_examples():
    d = number_distribution_squeezed(0.0, 5)
    assert d.probs.tolist() == [1.0, 0, 0, 0, 0, 0]
    assert d.tail_mass == 0.0

    d = number_distribution_squeezed(ZETA_HALF_RATIO, 3)
    np.testing.assert_allclose(d.probs, [0.5, 0.25, 0.125, 0.0625], rtol=1e-14)
    assert d.tail_mass == pytest.approx(0.0625, rel=1e-14)

    d = number_distribution_squeezed(1.0, 50)
    assert abs(d.mean() - SINH2_ONE) < 1e-10


def test_squeezed_distribution_is_non_increasing():
    d = number_distribution_squeezed(1.3, 100)
    assert np.all(np.diff(d.probs) <= 0)
    assert np.all((d.probs >= 0) & (d.probs <= 1))


def test_joint_squeezed_examples():
    assert joint_number_distribution_squeezed(0.0, 4).probs[0, 0] == 1.0
    j = joint_number_distribution_squeezed(0.9, 10)
    assert j.probs[1, 2] == 0.0
    assert joint_number_distribution_squeezed(ZETA_HALF_RATIO, 4).probs[1, 1] == pytest.approx(0.25)


@pytest.mark.parametrize("zeta", [0.0, 0.4, 1.0, 2.5])
def test_joint_marginals_match_single_mode(zeta):
    j = joint_number_distribution_squeezed(zeta, 60)
    single = number_distribution_squeezed(zeta, 60).probs
    np.testing.assert_allclose(j.marginal_a(), single, rtol=0, atol=1e-14)
    np.testing.assert_allclose(j.marginal_b(), single, rtol=0, atol=1e-14)


def test_joint_squeezed_difference_has_zero_variance():
    # brute-force sum over the full joint table
    j = joint_number_distribution_squeezed(1.0, 200)
    assert j.variance_of_difference() == 0.0


def test_thermal_joint_law_is_uncorrelated():
    j = joint_number_distribution_thermal(0.7, 2.0, 300)
    assert abs(j.covariance()) < 1e-12


def test_squeeze_from_temperature_examples():
    assert squeeze_from_energy_ratio(100.0) == pytest.approx(math.exp(-50), rel=1e-12, abs=0)
    assert squeeze_from_energy_ratio(2.0) == pytest.approx(ARTANH_INV_E, rel=1e-15)


def test_squeeze_from_temperature_units():
    omega = 2.0e15
    T = HBAR * omega / (2.0 * K_B)
    assert squeeze_from_temperature(omega, T) == pytest.approx(ARTANH_INV_E, rel=1e-14)
    assert squeeze_from_temperature(2.0, 1.0, NATURAL) == pytest.approx(ARTANH_INV_E, rel=1e-15)


def test_squeeze_from_temperature_errors():
    with pytest.raises(DomainError):
        squeeze_from_temperature(1e15, 0.0)
    with pytest.raises(DomainError):
        squeeze_from_temperature(1e15, -3.0)
    with pytest.raises(OverflowError):
        squeeze_from_energy_ratio(1e-17)


def test_squeeze_increases_with_temperature():
    temps = np.geomspace(1.0, 1e6, 50)
    zetas = [squeeze_from_temperature(1e14, T) for T in temps]
    assert np.all(np.diff(zetas) > 0)
    assert all(z > 0 for z in zetas)


def test_effective_temperature_examples():
    zeta = math.atanh(math.exp(-1.0))  # ln coth zeta = 1
    assert effective_temperature(1.0, zeta, NATURAL) == pytest.approx(0.5, rel=1e-14)
    omega = 3e14
    assert effective_temperature(2 * omega, zeta) == pytest.approx(
        2 * effective_temperature(omega, zeta), rel=1e-15
    )
    assert energy_ratio_from_squeeze(ARTANH_INV_E) == pytest.approx(2.0, rel=1e-14)


def test_effective_temperature_vacuum_signal():
    assert effective_temperature(1e15, 0.0) == 0.0
    assert energy_ratio_from_squeeze(0.0) == math.inf


def test_effective_temperature_monotone_in_zeta():
    zetas = np.linspace(0.01, 6, 200)
    temps = [effective_temperature(1.0, z, NATURAL) for z in zetas]
    assert np.all(np.diff(temps) > 0)


@given(st.floats(min_value=0.1, max_value=100.0))
def test_temperature_round_trip(x):
    zeta = squeeze_from_energy_ratio(x)
    assert energy_ratio_from_squeeze(zeta) == pytest.approx(x, rel=1e-12)


def test_thermal_occupation_examples():
    assert thermal_occupation(math.log(2.0)) == pytest.approx(1.0, rel=1e-15)
    assert thermal_occupation(100.0) == pytest.approx(math.exp(-100), rel=1e-14, abs=0)
    assert thermal_occupation(800.0) >= 0.0
    assert not math.isnan(thermal_occupation(800.0))


def test_thermal_occupation_matches_squeezed_identity():
    for x in np.linspace(0.01, 50.0, 300):
        via_squeeze = mean_occupation_squeezed(squeeze_from_energy_ratio(x))
        assert thermal_occupation(x) == pytest.approx(via_squeeze, rel=1e-12)


def test_thermal_mean_occupation_units():
    omega = 1e15
    T = HBAR * omega / (K_B * math.log(2.0))
    assert thermal_mean_occupation(omega, T) == pytest.approx(1.0, rel=1e-14)


def test_thermal_distribution_examples():
    assert number_distribution_thermal(0.0, 3).probs.tolist() == [1.0, 0.0, 0.0, 0.0]
    d = number_distribution_thermal(1.0, 4)
    np.testing.assert_allclose(d.probs, [0.5, 0.25, 0.125, 0.0625, 0.03125], rtol=1e-15)


@pytest.mark.parametrize("nbar", [0.1, 1.0, 10.0])
def test_thermal_distribution_variance(nbar):
    d = number_distribution_thermal(nbar, 40)
    assert d.mean() == pytest.approx(nbar, abs=1e-10)
    assert d.variance() == pytest.approx(nbar * (nbar + 1), abs=1e-10)


def test_tail_mass_matches_closed_form():
    d = number_distribution_squeezed(0.8, 7)
    assert d.tail_mass == pytest.approx(math.tanh(0.8) ** 16, rel=1e-14)
    d = number_distribution_thermal(3.0, 7)
    assert d.tail_mass == pytest.approx(0.75**8, rel=1e-14)


@pytest.mark.parametrize("zeta", np.linspace(0.0, 5.0, 100))
def test_distribution_identities_over_grid(zeta):
    sq = number_distribution_squeezed(zeta, 200)
    assert abs(sq.total() - 1.0) < 1e-12
    nbar = mean_occupation_squeezed(zeta)
    assert sq.mean() == pytest.approx(nbar, rel=1e-10, abs=1e-10)
    assert sq.variance() == pytest.approx(nbar * (nbar + 1), rel=1e-10, abs=1e-10)
    th = number_distribution_thermal(nbar, 200)
    assert abs(th.total() - 1.0) < 1e-12


def test_pair_variance_predictions():
    assert pair_variance_thermal(0.0, 0.0).value == 0.0
    assert pair_variance_thermal(1.0, 1.0).value == 4.0
    p = pair_variance_thermal(2.0, 0.5)
    assert p.value == 6.75 and p.source_kind == "thermal"
    s = pair_variance_squeezed()
    assert s.value == 0.0 and s.source_kind == "squeezed"
    with pytest.raises(DomainError):
        pair_variance_thermal(-1.0, 0.0)


@settings(max_examples=50)
@given(st.floats(min_value=0.0, max_value=3.0), st.integers(min_value=0, max_value=80))
def test_truncated_law_normalisation_property(zeta, n_max):
    d = number_distribution_squeezed(zeta, n_max)
    assert abs(d.total() - 1.0) < 1e-12
    assert d.n_max == n_max
