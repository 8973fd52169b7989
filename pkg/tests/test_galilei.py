import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boxmom.core import BoxState, PhysicalConfig, energy_level, well_eigenfunction
from boxmom.extensions import TWO_PI, sigma_eigenfunction, sigma_eigenvalue
from boxmom.galilei import (BoostParams, NotRepresentable, boost_phase, boosted_norm,
                            boosted_stationary_state, energy_expectation, moving_expansion,
                            moving_momentum, moving_momentum_eigenfunction,
                            plane_wave_decomposition, reconstruct_moving, sigma_of_velocity)
from boxmom.spectral import TruncationError

UNIT = PhysicalConfig()


def test_sigma_of_velocity_examples():
    assert sigma_of_velocity(UNIT, BoostParams(0.0)).sigma == 0.0
    assert sigma_of_velocity(UNIT, BoostParams(math.pi)).sigma == pytest.approx(math.pi, abs=1e-11)
    assert sigma_of_velocity(UNIT, BoostParams(2 * math.pi)).sigma == 0.0


def test_boost_phase_examples():
    assert np.all(boost_phase(UNIT, BoostParams(0.0), np.linspace(-1, 1, 5), 0.7) == 0)
    assert boost_phase(UNIT, BoostParams(1.0), 1.0, 0.0) == pytest.approx(-1.0)
    assert boost_phase(UNIT, BoostParams(2.0), 0.0, 1.0) == pytest.approx(-2.0)


def test_boosted_state_examples():
    z = np.linspace(0, 1, 11)
    assert np.allclose(boosted_stationary_state(UNIT, 1, BoostParams(0.0), z, 0.0),
                       well_eigenfunction(UNIT, BoxState(1), z))
    v = boosted_stationary_state(UNIT, 1, BoostParams(1.0), 0.0, 0.5)
    assert abs(v) == pytest.approx(math.sqrt(2))
    for V, tau in ((1.0, 0.5), (-2.0, 0.3)):
        assert boosted_stationary_state(UNIT, 3, BoostParams(V), -V * tau, tau) == 0
        assert boosted_stationary_state(UNIT, 3, BoostParams(V), 1 - V * tau, tau) == 0


def test_moving_eigenfunction_examples():
    x = np.linspace(0, 1, 9)
    for n in (-2, 0, 3):
        assert np.allclose(moving_momentum_eigenfunction(UNIT, BoostParams(0.0), n, x, 0.0),
                           sigma_eigenfunction(UNIT, 0.0, n, x))
    vals = moving_momentum_eigenfunction(UNIT, BoostParams(0.8), 2, x - 0.8 * 0.3, 0.3)
    assert np.allclose(np.abs(vals), 1.0)
    for V in (0.3, -1.7, 5.0):
        for n in (-3, 0, 2):
            diff = moving_momentum(UNIT, BoostParams(V), n) - sigma_eigenvalue(
                UNIT, sigma_of_velocity(UNIT, BoostParams(V)), n)
            k = diff / TWO_PI
            assert abs(k - round(k)) <= 1e-9


def test_moving_expansion_examples():
    exp = moving_expansion(UNIT, 2, BoostParams(1.3), 0.4, 10)
    assert len(exp.nonzero()) == 2
    assert all(abs(c) == pytest.approx(1 / math.sqrt(2)) for c in exp.nonzero().values())
    exp = moving_expansion(UNIT, 1, BoostParams(0.5), 0.0, 10)
    assert abs(exp.coefficients[0]) == pytest.approx(2 * math.sqrt(2) / math.pi)
    defects = [1 - moving_expansion(UNIT, 1, BoostParams(0.5), 0.0, M).parseval_sum()
               for M in (5, 50, 500)]
    assert defects[0] > defects[1] > defects[2] > 0
    with pytest.raises(TruncationError):
        moving_expansion(UNIT, 7, BoostParams(0.0), 0.0, 2)


def test_plane_wave_examples():
    terms = plane_wave_decomposition(UNIT, 2, BoostParams(0.0))
    assert [t.momentum for t in terms] == pytest.approx([2 * math.pi, -2 * math.pi])
    assert terms[0].amplitude == pytest.approx(math.sqrt(2) / 2j)
    assert terms[1].amplitude == pytest.approx(-math.sqrt(2) / 2j)
    terms = plane_wave_decomposition(UNIT, 2, BoostParams(1.0))
    assert [t.momentum for t in terms] == pytest.approx([2 * math.pi - 1, -(2 * math.pi + 1)])
    result = plane_wave_decomposition(UNIT, 1, BoostParams(0.3))
    assert isinstance(result, NotRepresentable) and not result


@pytest.mark.parametrize("V,tau", [(0.0, 0.0), (1.3, 0.4), (-0.6, 1.1)])
def test_plane_waves_reproduce_even_state(V, tau):
    cfg = PhysicalConfig(hbar=0.8, mass=1.4, width=1.7)
    z = np.linspace(0, cfg.width, 23) - V * tau
    state = BoxState(4)
    total = sum(t(cfg, z, tau) for t in plane_wave_decomposition(cfg, state, BoostParams(V)))
    assert np.allclose(total, boosted_stationary_state(cfg, state, BoostParams(V), z, tau),
                       atol=1e-12)


def test_energy_examples():
    assert energy_expectation(UNIT, 2, BoostParams(0.0)) == energy_level(UNIT, BoxState(2))
    assert energy_expectation(UNIT, 1, BoostParams(2.0)) == pytest.approx(math.pi ** 2 / 2 + 2)


def test_unitarity():
    for N in range(1, 5):
        for V in (0.0, 0.7, math.pi):
            for tau in (0.0, 0.4):
                assert abs(boosted_norm(UNIT, N, BoostParams(V), tau) - 1.0) <= 1e-9


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.floats(-5, 5), st.floats(0, 3), st.floats(0, 3))
def test_moduli_time_independent(N, V, t1, t2):
    e1 = moving_expansion(UNIT, N, BoostParams(V), t1, 12)
    e2 = moving_expansion(UNIT, N, BoostParams(V), t2, 12)
    for n in e1.indices():
        assert abs(e1.coefficients[n]) == pytest.approx(abs(e2.coefficients[n]), rel=4e-16)


@pytest.mark.parametrize("N,V,tau", [(1, 1.0, 0.3), (3, -0.4, 0.7), (2, 2.0, 0.1)])
def test_reconstruction_within_tail_bound(N, V, tau):
    exp = moving_expansion(UNIT, N, BoostParams(V), tau, 100)
    z = np.linspace(0, 1, 51) - V * tau
    err = np.max(np.abs(reconstruct_moving(UNIT, exp, z)
                        - boosted_stationary_state(UNIT, N, BoostParams(V), z, tau)))
    assert err <= exp.amplitude_tail_bound + 1e-12


@pytest.mark.parametrize("N", [1, 3, 5])
def test_odd_closed_form(N):
    # Closed form with prefactor 2N/pi: each term is a stationary plane wave
    # with momentum 2 pi hbar n / a - m V and a compensating phase.
    cfg = PhysicalConfig(hbar=1.0, mass=1.0, width=1.0)
    V, tau = 0.6, 0.25
    z = np.linspace(0.05, 0.95, 7) - V * tau
    n = np.arange(-4000, 4001)
    p = TWO_PI * n - V
    terms = (np.exp(-1j * math.pi ** 2 / 2 * (N * N - 4 * n * n) * tau) / (N * N - 4 * n * n)
             * np.exp(1j * np.multiply.outer(z, p)) * np.exp(-0.5j * p * p * tau))
    series = 2 * N / math.pi * math.sqrt(2) * terms.sum(axis=1)
    exact = boosted_stationary_state(cfg, N, BoostParams(V), z, tau)
    assert np.max(np.abs(series - exact)) <= 1e-3
