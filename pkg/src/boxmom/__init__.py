"""Momentum observables for a particle confined to a finite interval."""

from .core import BoxState, ComplexSample, PhysicalConfig, energy_level, well_eigenfunction
from .extensions import (HamiltonianBC, NamedBC, SigmaExtension, SpectrumEntry, bc_residuals,
                         dirichlet_domain_check, hamiltonian_spectrum, named_bc_matrices,
                         sigma_boundary_check, sigma_eigenfunction, sigma_eigenvalue,
                         validate_hamiltonian_bc)
from .galilei import (BoostParams, MovingExpansion, NotRepresentable, PlaneWaveTerm,
                      boosted_stationary_state, energy_expectation,
                      energy_expectation_quadrature, moving_expansion, plane_wave_decomposition,
                      sigma_of_velocity)
from .numerics import QuadratureError, QuadratureResult, adaptive_quadrature
from .release import (MomentumPdf, OscillatorState, fourier_amplitude, free_evolution, free_norm,
                      momentum_pdf, pdf_moment, sling_impact_cdf, sling_momentum_pdf)
from .spectral import (ResonanceCase, SigmaExpansion, TruncationError, coefficient_oracle,
                       expand_state, expansion_coefficient, reconstruct)

__version__ = "0.1.0"
