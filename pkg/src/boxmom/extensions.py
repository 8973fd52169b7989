"""Self-adjoint extensions on a finite interval.

Two families are covered: the one-parameter family of momentum operators
``-i hbar d/dx`` with domains ``f(a) = exp(i sigma) f(0)``, and boundary
matrices ``(alpha, beta)`` defining extensions of ``d^2/dx^2``. For the
latter only the admissibility constraint is checked in general; spectra are
provided for the Dirichlet, periodic and antiperiodic presets.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .core import PhysicalConfig

__all__ = [
    "TWO_PI",
    "canonical_sigma",
    "SigmaExtension",
    "HamiltonianBC",
    "NamedBC",
    "SpectrumEntry",
    "sigma_eigenvalue",
    "sigma_eigenfunction",
    "sigma_boundary_check",
    "bc_residuals",
    "validate_hamiltonian_bc",
    "named_bc_matrices",
    "hamiltonian_spectrum",
    "dirichlet_domain_check",
]

TWO_PI = 2.0 * math.pi


def canonical_sigma(sigma: float) -> float:
    """Reduce an angle to ``[0, 2 pi)``."""
    sigma = float(sigma)
    if not math.isfinite(sigma):
        raise ValueError(f"sigma must be finite, got {sigma!r}")
    s = sigma % TWO_PI
    # x % 2pi can round up to exactly 2pi for tiny negative x.
    return 0.0 if s >= TWO_PI else s


@dataclass(frozen=True)
class SigmaExtension:
    """Momentum operator on the domain ``f(a) = exp(i sigma) f(0)``."""

    sigma: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "sigma", canonical_sigma(self.sigma))

    @property
    def boundary_phase(self) -> complex:
        return complex(math.cos(self.sigma), math.sin(self.sigma))


def _as_extension(ext) -> SigmaExtension:
    return ext if isinstance(ext, SigmaExtension) else SigmaExtension(ext)


def sigma_eigenvalue(cfg: PhysicalConfig, ext: SigmaExtension, n: int) -> float:
    """Momentum eigenvalue ``hbar (sigma + 2 pi n) / a`` (physical units)."""
    ext = _as_extension(ext)
    return cfg.hbar * (ext.sigma + TWO_PI * n) / cfg.width


def sigma_eigenfunction(cfg: PhysicalConfig, ext: SigmaExtension, n: int, x):
    ext = _as_extension(ext)
    a = cfg.width
    xs = np.asarray(x, dtype=float)
    inside = (xs >= 0.0) & (xs <= a)
    out = np.zeros(xs.shape, dtype=complex)
    phase = (ext.sigma + TWO_PI * n) * xs[inside] / a
    out[inside] = np.exp(1j * phase) / math.sqrt(a)
    return out if out.ndim else complex(out)


def sigma_boundary_check(ext: SigmaExtension, f0: complex, fa: complex, tol: float) -> bool:
    """True iff ``|f(a) - exp(i sigma) f(0)| <= tol * max(1, |f(0)|)``."""
    if tol < 0:
        raise ValueError("tol must be non-negative")
    ext = _as_extension(ext)
    return abs(fa - ext.boundary_phase * f0) <= tol * max(1.0, abs(f0))


def _matrix(entries) -> np.ndarray:
    m = np.array(entries, dtype=complex)
    if m.shape != (2, 2):
        raise ValueError(f"boundary matrix must be 2x2, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("boundary matrix entries must be finite")
    return m


@dataclass(frozen=True)
class HamiltonianBC:
    """Boundary rows ``alpha_i1 f(0) + beta_i1 f(a) - alpha_i2 f'(0) - beta_i2 f'(a) = 0``."""

    alpha: np.ndarray = field(compare=False)
    beta: np.ndarray = field(compare=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", _matrix(self.alpha))
        object.__setattr__(self, "beta", _matrix(self.beta))

    def __eq__(self, other):
        if not isinstance(other, HamiltonianBC):
            return NotImplemented
        return np.array_equal(self.alpha, other.alpha) and np.array_equal(self.beta, other.beta)

    def __hash__(self):
        return hash((self.alpha.tobytes(), self.beta.tobytes()))

    def entries(self) -> list[complex]:
        """Flattened ``[a11, a12, a21, a22, b11, b12, b21, b22]``."""
        return [complex(v) for v in np.concatenate([self.alpha.ravel(), self.beta.ravel()])]

    def boundary_form(self, f0, fa, df0, dfa) -> np.ndarray:
        """Left-hand sides of both boundary rows for given boundary data."""
        return (self.alpha[:, 0] * f0 + self.beta[:, 0] * fa
                - self.alpha[:, 1] * df0 - self.beta[:, 1] * dfa)


class NamedBC(enum.Enum):
    DIRICHLET = "dirichlet"
    PERIODIC = "periodic"
    ANTIPERIODIC = "antiperiodic"


def bc_residuals(bc: HamiltonianBC) -> np.ndarray:
    """Per-row residual ``lhs - rhs`` of the self-adjointness constraint."""
    al, be = bc.alpha, bc.beta
    lhs = al[:, 0] * np.conj(al[:, 1]) - al[:, 1] * np.conj(al[:, 0])
    rhs = be[:, 0] * np.conj(be[:, 1]) - be[:, 1] * np.conj(be[:, 0])
    return lhs - rhs


def validate_hamiltonian_bc(bc: HamiltonianBC, tol: float) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return bool(np.all(np.abs(bc_residuals(bc)) <= tol))


_PRESETS = {
    NamedBC.DIRICHLET: ([[1, 0], [1, 0]], [[-1, 0], [0, 0]]),
    NamedBC.PERIODIC: ([[1, 0], [0, 1]], [[-1, 0], [0, -1]]),
    NamedBC.ANTIPERIODIC: ([[1, 0], [0, 1]], [[1, 0], [0, 1]]),
}


def named_bc_matrices(name: NamedBC | str) -> HamiltonianBC:
    alpha, beta = _PRESETS[NamedBC(name)]
    return HamiltonianBC(alpha, beta)


@dataclass(frozen=True)
class SpectrumEntry:
    """One eigenfunction of a named Hamiltonian extension.

    ``kind`` is ``"sin"``, ``"cos"`` or ``"const"``; the function is
    ``amplitude * kind(frequency * x)`` on ``[0, a]``.
    """

    level: int
    energy: float
    kind: str
    frequency: float
    amplitude: float
    degeneracy: int

    def __call__(self, x):
        xs = np.asarray(x, dtype=float)
        if self.kind == "sin":
            vals = np.sin(self.frequency * xs)
        elif self.kind == "cos":
            vals = np.cos(self.frequency * xs)
        else:
            vals = np.ones_like(xs)
        return self.amplitude * vals


def hamiltonian_spectrum(cfg: PhysicalConfig, name: NamedBC | str, count: int) -> list[SpectrumEntry]:
    """Lowest ``count`` energy levels, degenerate partners listed as (sin, cos)."""
    if count < 1:
        raise ValueError("count must be at least 1")
    name = NamedBC(name)
    a = cfg.width
    kinetic = cfg.hbar ** 2 / (2.0 * cfg.mass)
    amp = math.sqrt(2.0 / a)
    entries: list[SpectrumEntry] = []
    for level in range(count):
        if name is NamedBC.DIRICHLET:
            k = (level + 1) * math.pi / a
            entries.append(SpectrumEntry(level, kinetic * k * k, "sin", k, amp, 1))
            continue
        if name is NamedBC.PERIODIC:
            k = 2.0 * level * math.pi / a
            if level == 0:
                entries.append(SpectrumEntry(0, 0.0, "const", 0.0, 1.0 / math.sqrt(a), 1))
                continue
        else:
            k = (2 * level + 1) * math.pi / a
        energy = kinetic * k * k
        entries.append(SpectrumEntry(level, energy, "sin", k, amp, 2))
        entries.append(SpectrumEntry(level, energy, "cos", k, amp, 2))
    return entries


def dirichlet_domain_check(f0: complex, fa: complex, tol: float) -> bool:
    """Membership test for functions vanishing at both ends.

    This domain is the common part of every sigma-domain and the one on
    which the canonical commutation relation holds.
    """
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return abs(f0) <= tol and abs(fa) <= tol
