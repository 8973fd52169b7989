"""Expansion of infinite-well eigenstates in a sigma-momentum eigenbasis.

For a well state ``psi_N`` and a boundary phase ``sigma`` the coefficients

    c_n(sigma) = <f_n^(sigma), psi_N>
               = pi N sqrt(2) (exp(-i sigma) (-1)^N - 1) / ((sigma + 2 pi n)^2 - pi^2 N^2)

are dimensionless (independent of the well width). At the two resonant
combinations (N even, sigma = 0) and (N odd, sigma = pi) numerator and
denominator vanish together and the expansion collapses to two plane waves.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import BoxState, PhysicalConfig, as_box_state
from .extensions import TWO_PI, canonical_sigma
from .numerics import QuadratureError, adaptive_quadrature, sum_symmetric_series

__all__ = [
    "ResonanceCase",
    "SigmaExpansion",
    "TruncationError",
    "DegenerateDenominatorError",
    "resonance_case",
    "expansion_coefficient",
    "coefficient_envelope",
    "expand_state",
    "reconstruct",
    "coefficient_oracle",
]

_PI_LO = 1.2246467991473532e-16  # pi - float(pi)
_GUARD = 1e-12
# Allowance for rounding in |c_n|^2 and their sum; keeps the bracket
# 0 <= 1 - sum |c_n|^2 <= tail_bound honest in floating point.
ROUNDOFF_ALLOWANCE = 4.0 * np.finfo(float).eps
_INV_I_SQRT2 = complex(0.0, -1.0 / math.sqrt(2.0))  # 1 / (i sqrt 2)


class TruncationError(ValueError):
    """Truncation order too small for the requested state."""


class DegenerateDenominatorError(ArithmeticError):
    pass


class ResonanceCase(enum.Enum):
    NON_RESONANT = "non-resonant"
    EVEN_SIGMA_ZERO = "even-sigma-zero"
    ODD_SIGMA_PI = "odd-sigma-pi"


def resonance_case(state: BoxState, sigma: float) -> ResonanceCase:
    N = as_box_state(state).N
    s = canonical_sigma(sigma)
    if N % 2 == 0 and s == 0.0:
        return ResonanceCase.EVEN_SIGMA_ZERO
    if N % 2 == 1 and s == math.pi:
        return ResonanceCase.ODD_SIGMA_PI
    return ResonanceCase.NON_RESONANT


def _resonant_indices(N: int, case: ResonanceCase) -> tuple[int, int]:
    if case is ResonanceCase.EVEN_SIGMA_ZERO:
        return N // 2, -(N // 2)
    return (N - 1) // 2, -(N + 1) // 2


def _resonant_value(N: int, n: int, case: ResonanceCase) -> complex:
    plus, minus = _resonant_indices(N, case)
    if n == plus:
        return _INV_I_SQRT2
    if n == minus:
        return -_INV_I_SQRT2
    return 0j


def _shifted(sigma: float, j: int) -> float:
    """``sigma + j pi`` evaluated without cancellation when it is near zero."""
    k0 = int(round(sigma / math.pi))
    d = (sigma - k0 * math.pi) - k0 * _PI_LO
    k = j + k0
    return d + k * math.pi + k * _PI_LO


def _nearest_resonance(N: int, sigma: float) -> ResonanceCase:
    return ResonanceCase.EVEN_SIGMA_ZERO if N % 2 == 0 else ResonanceCase.ODD_SIGMA_PI


def expansion_coefficient(state: BoxState, n: int, sigma: float) -> complex:
    """Closed-form coefficient of ``psi_N`` on the sigma-eigenfunction ``f_n``."""
    N = as_box_state(state).N
    s = canonical_sigma(sigma)
    case = resonance_case(N, s)
    if case is not ResonanceCase.NON_RESONANT:
        return _resonant_value(N, n, case)

    half_phase = complex(math.cos(s / 2), -math.sin(s / 2))
    if N % 2 == 0:
        numerator = -2j * math.sin(s / 2) * half_phase
    else:
        numerator = -2.0 * math.cos(s / 2) * half_phase
    denominator = _shifted(s, 2 * n - N) * _shifted(s, 2 * n + N)
    if abs(denominator) < _GUARD:
        if abs(numerator) < math.sqrt(_GUARD):
            return _resonant_value(N, n, _nearest_resonance(N, s))
        raise DegenerateDenominatorError(
            f"denominator {denominator:.3e} vanishes with numerator {abs(numerator):.3e}"
            f" (N={N}, n={n}, sigma={s!r})")
    return math.pi * N * math.sqrt(2.0) * numerator / denominator


def coefficient_envelope(N: int, n):
    """Upper bound ``2 pi N sqrt 2 / (2 pi |n| - pi N - 2 pi)^2`` on ``|c_n|``.

    Valid for ``|n| > N/2 + 1`` and every sigma in ``[0, 2 pi)``.
    """
    gap = TWO_PI * np.abs(np.asarray(n, dtype=float)) - math.pi * N - TWO_PI
    with np.errstate(divide="ignore"):
        return TWO_PI * N * math.sqrt(2.0) / gap ** 2


@dataclass(frozen=True)
class SigmaExpansion:
    """Truncated coefficient table of a well state in one sigma-basis.

    ``tail_bound`` covers the probability mass carried by the omitted
    coefficients plus a few ulps of rounding; ``amplitude_tail_bound`` bounds ``sum |c_n|`` over them and
    hence (divided by ``sqrt a``) the pointwise reconstruction error.
    Resonant expansions store only their two nonzero entries.
    """

    sigma: float
    state: BoxState
    coefficients: dict[int, complex] = field(repr=False)
    truncation: int
    tail_bound: float
    amplitude_tail_bound: float = 0.0
    resonance: ResonanceCase = ResonanceCase.NON_RESONANT

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be non-negative")
        mass = self.parseval_sum()
        if mass > 1.0 + 1e-9:
            raise ValueError(f"coefficient mass {mass!r} exceeds 1")
        if self.tail_bound < 1.0 - mass - 1e-12:
            raise ValueError(f"tail bound {self.tail_bound!r} does not cover missing mass {1.0 - mass!r}")

    def parseval_sum(self) -> float:
        return math.fsum(abs(c) ** 2 for c in self.coefficients.values())

    def parseval_defect(self) -> float:
        return 1.0 - self.parseval_sum()

    def indices(self) -> list[int]:
        return sorted(self.coefficients)

    def nonzero(self) -> dict[int, complex]:
        return {n: c for n, c in self.coefficients.items() if c != 0}


def _check_truncation(N: int, M: int) -> None:
    if M < N / 2 + 1:
        raise TruncationError(f"truncation M={M} is below N/2 + 1 = {N / 2 + 1} for N={N}")


def expand_state(state: BoxState, sigma: float, M: int) -> SigmaExpansion:
    state = as_box_state(state)
    N = state.N
    _check_truncation(N, M)
    s = canonical_sigma(sigma)
    case = resonance_case(state, s)
    if case is not ResonanceCase.NON_RESONANT:
        plus, minus = _resonant_indices(N, case)
        coeffs = {minus: -_INV_I_SQRT2, plus: _INV_I_SQRT2}
        return SigmaExpansion(s, state, coeffs, M, ROUNDOFF_ALLOWANCE, 0.0, case)

    coeffs = {n: expansion_coefficient(state, n, s) for n in range(-M, M + 1)}
    mass = sum_symmetric_series(lambda n: abs(coeffs[n]) ** 2, M,
                                lambda n: coefficient_envelope(N, n) ** 2)
    amplitude = sum_symmetric_series(lambda n: abs(coeffs[n]), M,
                                     lambda n: coefficient_envelope(N, n))
    return SigmaExpansion(s, state, coeffs, M, mass.tail_bound + ROUNDOFF_ALLOWANCE,
                          amplitude.tail_bound, case)


def reconstruct(exp: SigmaExpansion, cfg: PhysicalConfig, x):
    """Evaluate the truncated series ``exp(i sigma x/a) a^-1/2 sum c_n exp(2 pi i n x/a)``."""
    a = cfg.width
    xs = np.asarray(x, dtype=float)
    if np.any((xs < 0.0) | (xs > a)):
        raise ValueError("reconstruction is defined on [0, a] only")
    ns = np.array(exp.indices(), dtype=float)
    cs = np.array([exp.coefficients[int(n)] for n in ns], dtype=complex)
    waves = np.exp(1j * TWO_PI * np.multiply.outer(xs, ns) / a)
    out = np.exp(1j * exp.sigma * xs / a) * (waves @ cs) / math.sqrt(a)
    return out if out.ndim else complex(out)


def coefficient_oracle(state: BoxState, n: int, sigma: float, rel_tol: float = 1e-10) -> complex:
    """Direct quadrature of the defining overlap integral (width scaled to 1)."""
    N = as_box_state(state).N
    wavenumber = float(sigma) + TWO_PI * n

    def integrand(y):
        return math.sqrt(2.0) * np.exp(-1j * wavenumber * y) * np.sin(N * math.pi * y)

    panels = abs(n) + N + 1
    res = adaptive_quadrature(integrand, 0.0, 1.0, rel_tol=rel_tol, abs_tol=1e-14,
                              period=1.0 / panels)
    if not res.converged:
        raise QuadratureError("overlap quadrature did not converge", res)
    return complex(res.value)
