"""Galilei boosts of infinite-well states.

An observer moving with velocity ``V`` uses coordinates ``zeta = x - V tau``.
Wave functions pick up the phase ``exp(-i (m V zeta + m V^2 tau / 2) / hbar)``
(the additive constant is fixed to zero), the well walls move to
``zeta = -V tau`` and ``zeta = a - V tau``, and the momentum that observer
measures is the sigma-momentum with ``sigma = -m V a / hbar mod 2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import BoxState, PhysicalConfig, as_box_state, energy_level, well_eigenfunction
from .extensions import TWO_PI, SigmaExtension
from .numerics import QuadratureError, adaptive_quadrature, sum_symmetric_series
from .spectral import ROUNDOFF_ALLOWANCE, TruncationError, coefficient_envelope

__all__ = [
    "BoostParams",
    "PlaneWaveTerm",
    "NotRepresentable",
    "MovingExpansion",
    "sigma_of_velocity",
    "boost_phase",
    "boosted_stationary_state",
    "moving_momentum_eigenfunction",
    "moving_momentum",
    "moving_expansion",
    "reconstruct_moving",
    "plane_wave_decomposition",
    "energy_expectation",
    "energy_expectation_quadrature",
    "boosted_norm",
]

# sigma from velocity is stored on a lattice of 2^-40 turns so that
# velocities one period apart give bit-identical extensions.
_TURN_LATTICE = float(2 ** 40)


@dataclass(frozen=True)
class BoostParams:
    velocity: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.velocity):
            raise ValueError("velocity must be finite")


def _as_boost(boost) -> BoostParams:
    return boost if isinstance(boost, BoostParams) else BoostParams(float(boost))


@dataclass(frozen=True)
class PlaneWaveTerm:
    """``amplitude * exp(i p zeta / hbar) * exp(-i p^2 tau / (2 m hbar))``."""

    momentum: float
    amplitude: complex
    energy: float

    def __call__(self, cfg: PhysicalConfig, zeta, tau: float):
        z = np.asarray(zeta, dtype=float)
        phase = self.momentum * z / cfg.hbar - self.momentum ** 2 * tau / (2 * cfg.mass * cfg.hbar)
        return self.amplitude * np.exp(1j * phase)


@dataclass(frozen=True)
class NotRepresentable:
    """Marks a state with no expansion into stationary plane-wave states."""

    state: BoxState
    reason: str

    def __bool__(self):
        return False


@dataclass(frozen=True)
class MovingExpansion:
    state: BoxState
    boost: BoostParams
    coefficients: dict[int, complex] = field(repr=False)
    tau: float
    truncation: int
    tail_bound: float = 0.0
    amplitude_tail_bound: float = 0.0

    def parseval_sum(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.coefficients.values())

    def indices(self) -> list[int]:
        return sorted(self.coefficients)

    def nonzero(self) -> dict[int, complex]:
        return {n: c for n, c in self.coefficients.items() if c != 0}


def sigma_of_velocity(cfg: PhysicalConfig, boost: BoostParams) -> SigmaExtension:
    V = _as_boost(boost).velocity
    turns = (-cfg.mass * V * cfg.width / (TWO_PI * cfg.hbar)) % 1.0
    turns = round(turns * _TURN_LATTICE) / _TURN_LATTICE
    if turns >= 1.0:
        turns = 0.0
    return SigmaExtension(TWO_PI * turns)


def boost_phase(cfg: PhysicalConfig, boost: BoostParams, zeta, tau):
    """Phase ``u = -(m/hbar) V zeta - m V^2 tau / (2 hbar)``."""
    V = _as_boost(boost).velocity
    m, hbar = cfg.mass, cfg.hbar
    return -(m / hbar) * V * np.asarray(zeta, dtype=float) - m * V * V * tau / (2.0 * hbar)


def _total_energy(cfg: PhysicalConfig, state: BoxState, V: float) -> float:
    return energy_level(cfg, state) + 0.5 * cfg.mass * V * V


def boosted_stationary_state(cfg: PhysicalConfig, state: BoxState, boost: BoostParams, zeta, tau):
    """Well eigenstate as seen from the moving frame; zero off the moving support."""
    state = as_box_state(state)
    V = _as_boost(boost).velocity
    z = np.asarray(zeta, dtype=float)
    spatial = well_eigenfunction(cfg, state, z + V * tau)
    phase = -cfg.mass * V * z / cfg.hbar - _total_energy(cfg, state, V) * tau / cfg.hbar
    out = spatial * np.exp(1j * phase)
    return out if np.ndim(out) else complex(out)


def moving_momentum(cfg: PhysicalConfig, boost: BoostParams, n: int) -> float:
    return TWO_PI * n * cfg.hbar / cfg.width - cfg.mass * _as_boost(boost).velocity


def moving_momentum_eigenfunction(cfg: PhysicalConfig, boost: BoostParams, n: int, zeta, tau):
    V = _as_boost(boost).velocity
    a = cfg.width
    z = np.asarray(zeta, dtype=float)
    x = z + V * tau
    inside = (x >= 0.0) & (x <= a)
    phase = -cfg.mass * V * z / cfg.hbar + TWO_PI * n * x / a
    out = np.where(inside, np.exp(1j * phase) / math.sqrt(a), 0j)
    return out if out.ndim else complex(out)


def _odd_coefficient(N: int, n: int) -> float:
    return -2.0 * N * math.sqrt(2.0) / ((4 * n * n - N * N) * math.pi)


def moving_expansion(cfg: PhysicalConfig, state: BoxState, boost: BoostParams,
                     tau: float, M: int) -> MovingExpansion:
    """Coefficients of the boosted state on the moving observer's momentum eigenfunctions."""
    state = as_box_state(state)
    boost = _as_boost(boost)
    N = state.N
    if M < N / 2 + 1:
        raise TruncationError(f"truncation M={M} is below N/2 + 1 for N={N}")
    global_phase = np.exp(-1j * _total_energy(cfg, state, boost.velocity) * tau / cfg.hbar)
    if N % 2 == 0:
        plus = complex(0.0, -1.0 / math.sqrt(2.0)) * global_phase
        coeffs = {-(N // 2): -plus, N // 2: plus}
        return MovingExpansion(state, boost, coeffs, tau, M, ROUNDOFF_ALLOWANCE)

    coeffs = {n: _odd_coefficient(N, n) * global_phase for n in range(-M, M + 1)}
    mass = sum_symmetric_series(lambda n: abs(coeffs[n]) ** 2, M,
                                lambda n: coefficient_envelope(N, n) ** 2)
    amplitude = sum_symmetric_series(lambda n: abs(coeffs[n]), M,
                                     lambda n: coefficient_envelope(N, n))
    return MovingExpansion(state, boost, coeffs, tau, M, mass.tail_bound + ROUNDOFF_ALLOWANCE,
                           amplitude.tail_bound)


def reconstruct_moving(cfg: PhysicalConfig, exp: MovingExpansion, zeta):
    """Truncated series ``sum c_n(tau) f~_n(zeta, tau)``."""
    z = np.asarray(zeta, dtype=float)
    total = np.zeros(z.shape, dtype=complex)
    for n in exp.indices():
        total = total + exp.coefficients[n] * moving_momentum_eigenfunction(
            cfg, exp.boost, n, z, exp.tau)
    return total if total.ndim else complex(total)


def plane_wave_decomposition(cfg: PhysicalConfig, state: BoxState, boost: BoostParams):
    """Split the boosted state into two stationary plane waves when allowed.

    The two candidate momenta are ``N pi hbar / a - m V`` and
    ``-(N pi hbar / a + m V)``. They qualify only if both belong to the moving
    observer's momentum spectrum ``2 pi n hbar / a - m V``, which happens for
    even ``N`` alone.
    """
    state = as_box_state(state)
    V = _as_boost(boost).velocity
    N = state.N
    # (p + m V) a / (2 pi hbar) = +-N/2 must be an integer.
    if N % 2:
        return NotRepresentable(
            state, f"momenta +-{N}*pi*hbar/a - m*V are not eigenvalues of the moving "
                   f"momentum operator for odd N; the state needs infinitely many modes")
    base = N * math.pi * cfg.hbar / cfg.width
    amp = complex(0.0, -0.5) * math.sqrt(2.0 / cfg.width)  # 1/(2i) sqrt(2/a)
    terms = []
    for p, c in ((base - cfg.mass * V, amp), (-(base + cfg.mass * V), -amp)):
        terms.append(PlaneWaveTerm(p, c, p * p / (2.0 * cfg.mass)))
    return terms


def energy_expectation(cfg: PhysicalConfig, state: BoxState, boost: BoostParams) -> float:
    return _total_energy(cfg, as_box_state(state), _as_boost(boost).velocity)


def _support(cfg, V, tau):
    return -V * tau, cfg.width - V * tau


def boosted_norm(cfg: PhysicalConfig, state: BoxState, boost: BoostParams, tau: float,
                 rel_tol: float = 1e-12) -> float:
    V = _as_boost(boost).velocity
    lo, hi = _support(cfg, V, tau)
    res = adaptive_quadrature(
        lambda z: np.abs(boosted_stationary_state(cfg, state, boost, z, tau)) ** 2,
        lo, hi, rel_tol=rel_tol)
    if not res.converged:
        raise QuadratureError("norm quadrature did not converge", res)
    return float(np.real(res.value))


def energy_expectation_quadrature(cfg: PhysicalConfig, state: BoxState, boost: BoostParams,
                                  tau: float, step: float = 1e-5, rel_tol: float = 1e-12) -> float:
    """Evaluate ``i hbar <Psi|dPsi/dtau>`` numerically.

    The time derivative is a central difference with one Richardson
    refinement (steps ``h`` and ``h/2``); the spatial integral runs over the
    moving support with breakpoints where the shifted supports end.
    """
    state = as_box_state(state)
    boost = _as_boost(boost)
    V = boost.velocity
    lo, hi = _support(cfg, V, tau)

    def psi(z, t):
        return boosted_stationary_state(cfg, state, boost, z, t)

    def derivative(z, h):
        return (psi(z, tau + h) - psi(z, tau - h)) / (2.0 * h)

    def integrand(z):
        d = (4.0 * derivative(z, step / 2) - derivative(z, step)) / 3.0
        return 1j * cfg.hbar * np.conj(psi(z, tau)) * d

    shifted = [-V * (tau + s) + off for s in (step, -step, step / 2, -step / 2)
               for off in (0.0, cfg.width)]
    res = adaptive_quadrature(integrand, lo, hi, rel_tol=rel_tol, breakpoints=shifted)
    if not res.converged:
        raise QuadratureError("energy quadrature did not converge", res)
    return float(np.real(res.value))
