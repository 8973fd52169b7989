"""Physical constants, infinite-well eigenstates and their energies."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["PhysicalConfig", "BoxState", "ComplexSample", "energy_level",
           "well_eigenfunction", "as_box_state"]


@dataclass(frozen=True)
class PhysicalConfig:
    """Constants every formula is parameterized by.

    ``width`` is the well length ``a``; ``omega`` only enters the
    two-dimensional oscillator (sling) calculations. Natural units by default.
    """

    hbar: float = 1.0
    mass: float = 1.0
    width: float = 1.0
    omega: float = 1.0

    def __post_init__(self):
        for name in ("hbar", "mass", "width", "omega"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class BoxState:
    quantum_number: int

    def __post_init__(self):
        n = self.quantum_number
        if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 1:
            raise ValueError(f"quantum number must be a positive integer, got {n!r}")

    @property
    def N(self) -> int:
        return int(self.quantum_number)

    @property
    def is_even(self) -> bool:
        return self.N % 2 == 0


@dataclass(frozen=True)
class ComplexSample:
    argument: float
    value: complex

    def __post_init__(self):
        if not (math.isfinite(self.argument) and math.isfinite(self.value.real)
                and math.isfinite(self.value.imag)):
            raise ValueError("sample components must be finite")


def as_box_state(state) -> BoxState:
    return state if isinstance(state, BoxState) else BoxState(state)


def energy_level(cfg: PhysicalConfig, state: BoxState) -> float:
    """E_N = pi^2 hbar^2 N^2 / (2 m a^2)."""
    N = as_box_state(state).N
    return math.pi ** 2 * cfg.hbar ** 2 * N ** 2 / (2.0 * cfg.mass * cfg.width ** 2)


def well_eigenfunction(cfg: PhysicalConfig, state: BoxState, x):
    """sqrt(2/a) sin(N pi x / a) inside ``[0, a]`` and exactly zero outside.

    Accepts scalars or arrays; the endpoints return an exact zero so the
    Dirichlet condition holds without rounding residue.
    """
    N = as_box_state(state).N
    a = cfg.width
    xs = np.asarray(x, dtype=float)
    inside = (xs > 0.0) & (xs < a)
    out = np.zeros(xs.shape, dtype=complex)
    out[inside] = math.sqrt(2.0 / a) * np.sin(N * math.pi * xs[inside] / a)
    return out if out.ndim else complex(out)
