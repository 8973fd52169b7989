"""Sudden release of a trapped particle.

When the confining potential is switched off at ``t = 0`` the particle
flies freely, and the Fourier transform of the trapped wave function becomes
the momentum amplitude of the *released* particle. The densities below are
therefore distributions of the freed projectile; they are not outcome
probabilities of a momentum measurement performed inside the well.

Conventions: ``psi~(k) = (2 pi)^-1/2 int psi(x) exp(-i k x) dx`` and
``P(p) = |psi~(p/hbar)|^2 / hbar``. The freed packet is
``Psi(r, t) = int g(p) exp(-i p^2 t / (2 m hbar)) exp(i p r / hbar) dp`` with
``g(p) = psi~(p/hbar) / (hbar sqrt(2 pi))``, which reproduces ``psi_N`` at
``t = 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .core import BoxState, PhysicalConfig, as_box_state, well_eigenfunction
from .numerics import (HERMITE_MAX_ORDER, QuadratureError, QuadratureResult,
                       adaptive_quadrature, hermite)

__all__ = [
    "MomentumAmplitude",
    "MomentumPdf",
    "OscillatorState",
    "fourier_amplitude",
    "momentum_pdf",
    "pdf_moment",
    "free_evolution",
    "free_norm",
    "sling_state",
    "sling_energy",
    "sling_momentum_pdf",
    "sling_impact_cdf",
]

_GUARD = 1e-4
_SQRT_2PI = math.sqrt(2.0 * math.pi)


@dataclass(frozen=True)
class MomentumAmplitude:
    wavenumber: float
    value: complex

    def __post_init__(self):
        if not (math.isfinite(self.wavenumber) and np.isfinite(self.value)):
            raise ValueError("momentum amplitude must be finite")


@dataclass(frozen=True)
class OscillatorState:
    n1: int = 0
    n2: int = 0

    def __post_init__(self):
        for q in (self.n1, self.n2):
            if isinstance(q, bool) or not isinstance(q, (int, np.integer)) or q < 0:
                raise ValueError(f"oscillator quanta must be non-negative integers, got {q!r}")
            if q > HERMITE_MAX_ORDER:
                raise ValueError(f"oscillator quanta above {HERMITE_MAX_ORDER} are not supported")


@dataclass(frozen=True)
class MomentumPdf:
    """Momentum density of a released state.

    ``normalization`` is the constant prefactor of the closed form. Box
    densities are one-dimensional, ``pdf(p)``; sling densities are
    two-dimensional, ``pdf(px, py)``.
    """

    state: BoxState | OscillatorState
    cfg: PhysicalConfig
    normalization: float
    evaluator: Callable = field(repr=False, compare=False)

    @property
    def dimension(self) -> int:
        return 2 if isinstance(self.state, OscillatorState) else 1

    def __call__(self, *p):
        return self.evaluator(*p)


# -- box states ---------------------------------------------------------------

def _overlap_quadrature(cfg: PhysicalConfig, N: int, k: float) -> complex:
    a = cfg.width

    def integrand(x):
        return math.sqrt(2.0 / a) * np.sin(N * math.pi * x / a) * np.exp(-1j * k * x)

    res = adaptive_quadrature(integrand, 0.0, a, rel_tol=1e-13, abs_tol=1e-15)
    if not res.converged:
        raise QuadratureError("Fourier overlap quadrature did not converge", res)
    return complex(res.value) / _SQRT_2PI


def fourier_amplitude(cfg: PhysicalConfig, state: BoxState, k):
    """Fourier amplitude of ``psi_N`` at wavenumber ``k`` (scalar or array)."""
    N = as_box_state(state).N
    a = cfg.width
    ks = np.asarray(k, dtype=float)
    x = a * ks
    c = N * math.pi
    near = np.abs(np.abs(x) - c) < _GUARD
    half = 0.5 * x
    trig = 1j * np.sin(half) if N % 2 == 0 else np.cos(half) + 0j
    with np.errstate(divide="ignore", invalid="ignore"):
        out = -math.sqrt(math.pi * a) * 2.0 * N / (x * x - c * c) * np.exp(-1j * half) * trig
    if np.any(near):
        out = np.array(out, dtype=complex, copy=True)
        flat = out.reshape(-1)
        for idx in np.flatnonzero(near.reshape(-1)):
            flat[idx] = _overlap_quadrature(cfg, N, float(ks.reshape(-1)[idx]))
    return out if np.ndim(out) else complex(out)


def _box_density(cfg: PhysicalConfig, N: int, prefactor: float):
    a, hbar = cfg.width, cfg.hbar
    c = hbar * N * math.pi

    def density(p):
        ps = np.asarray(p, dtype=float)
        arg = a * ps / (2.0 * hbar)
        trig2 = np.sin(arg) ** 2 if N % 2 == 0 else np.cos(arg) ** 2
        with np.errstate(divide="ignore", invalid="ignore"):
            out = prefactor / (a * a * ps * ps - c * c) ** 2 * trig2
        near = np.abs(a * np.abs(ps) / hbar - N * math.pi) < _GUARD
        if np.any(near):
            out = np.array(out, dtype=float, copy=True)
            amp = fourier_amplitude(cfg, N, ps[near] / hbar)
            out[near] = np.abs(amp) ** 2 / hbar
        return out if np.ndim(out) else float(out)

    return density


def momentum_pdf(cfg: PhysicalConfig, state: BoxState) -> MomentumPdf:
    """Momentum density ``4 pi a hbar^3 N^2 / (a^2 p^2 - hbar^2 N^2 pi^2)^2 * trig^2``."""
    state = as_box_state(state)
    N = state.N
    prefactor = 4.0 * math.pi * cfg.width * cfg.hbar ** 3 * N * N
    return MomentumPdf(state, cfg, prefactor, _box_density(cfg, N, prefactor))


def _box_tail(pdf: MomentumPdf, order: int, P: float):
    """Integral of ``p^order P(p)`` over ``[P, inf)`` and a remainder bound.

    With ``h(p) = A p^order / (a^2 p^2 - C^2)^2`` the density is
    ``h (1 -+ cos(b p)) / 2``, ``b = a / hbar``. The smooth half is integrated
    numerically on a compactified variable, the oscillating half by two
    integrations by parts; the remainder is bounded by ``|h'(P)| / (2 b^2)``.
    """
    cfg = pdf.cfg
    a, hbar = cfg.width, cfg.hbar
    N = pdf.state.N
    A = pdf.normalization
    C = hbar * N * math.pi
    b = a / hbar
    sign = -1.0 if N % 2 == 0 else 1.0

    def h(p):
        return A * p ** order / (a * a * p * p - C * C) ** 2

    def dh(p):
        D = a * a * p * p - C * C
        first = order * p ** (order - 1) / D ** 2 if order else 0.0
        return A * (first - 4.0 * a * a * p ** (order + 1) / D ** 3)

    smooth = adaptive_quadrature(lambda s: h(P / s) * P / (s * s), 0.0, 1.0,
                                 rel_tol=1e-13, abs_tol=1e-300)
    oscillating = -h(P) * math.sin(b * P) / b - dh(P) * math.cos(b * P) / (b * b)
    value = 0.5 * float(np.real(smooth.value)) + 0.5 * sign * oscillating
    bound = 0.5 * abs(dh(P)) / (b * b) + 0.5 * smooth.error_estimate
    return value, bound


def _box_moment(pdf: MomentumPdf, order: int) -> QuadratureResult:
    cfg = pdf.cfg
    a, hbar = cfg.width, cfg.hbar
    N = pdf.state.N
    scale = (hbar * N * math.pi / a) ** order
    period = 2.0 * math.pi * hbar / a
    singular = hbar * N * math.pi / a

    # Grow the cutoff until the oscillatory remainder is negligible.
    P = period * math.ceil(max(4.0 * singular, 20.0 * period) / period)
    for _ in range(40):
        tail, bound = _box_tail(pdf, order, P)
        if bound <= 1e-13 * max(scale, 1.0):
            break
        P *= 2.0
    else:
        raise QuadratureError("momentum tail cutoff did not settle",
                              QuadratureResult(tail, bound, 0, False))

    def integrand(p):
        return p ** order * pdf(p)

    if order % 2:
        body = adaptive_quadrature(integrand, -P, P, rel_tol=1e-12, abs_tol=1e-12 * scale,
                                   period=period, breakpoints=[-singular, 0.0, singular])
        value = float(np.real(body.value))  # tails cancel by symmetry
        error = body.error_estimate
    else:
        body = adaptive_quadrature(integrand, 0.0, P, rel_tol=1e-12, abs_tol=1e-14 * scale,
                                   period=period, breakpoints=[singular])
        value = 2.0 * (float(np.real(body.value)) + tail)
        error = 2.0 * (body.error_estimate + bound)
    result = QuadratureResult(value, error, body.panel_count, body.converged)
    if not body.converged:
        raise QuadratureError(f"order-{order} moment quadrature did not converge", result)
    return result


def _sling_moment(pdf: MomentumPdf, order: int) -> QuadratureResult:
    cfg = pdf.cfg
    st = pdf.state
    unit = math.sqrt(cfg.mass * cfg.omega * cfg.hbar)
    nodes, weights = np.polynomial.hermite.hermgauss(st.n1 + st.n2 + order + 8)
    u, v = np.meshgrid(nodes, nodes, indexing="ij")
    w = np.outer(weights, weights)
    base = (hermite(st.n1, u) ** 2 * hermite(st.n2, v) ** 2
            / (math.pi * 2.0 ** (st.n1 + st.n2) * math.factorial(st.n1) * math.factorial(st.n2)))
    if order == 0:
        g = np.ones_like(u)
    elif order == 1:
        g = u * unit  # mean of p_x; p_y vanishes by the same symmetry
    else:
        g = (u * u + v * v) * unit ** 2
    value = float(np.sum(w * base * g))
    return QuadratureResult(value, 1e-14 * max(1.0, abs(value)), nodes.size ** 2)


def pdf_moment(pdf: MomentumPdf, order: int, full_output: bool = False):
    """Moment ``int p^order pdf`` over all momenta (``order`` in 0, 1, 2).

    For the sling, order 1 is the mean of ``p_x`` and order 2 the mean of
    ``p_x^2 + p_y^2``.
    """
    if order not in (0, 1, 2):
        raise ValueError(f"order must be 0, 1 or 2, got {order!r}")
    if pdf.dimension == 2:
        res = _sling_moment(pdf, order)
    else:
        res = _box_moment(pdf, order)
    return res if full_output else res.value


# -- free evolution after release --------------------------------------------

def _cos_tail(omega: float, K: float, a: float, c: float) -> float:
    """Exact ``int_K^inf cos(omega k) / (a^2 k^2 - c^2) dk`` for ``a K > c``."""
    if omega == 0.0:
        return math.log((a * K + c) / (a * K - c)) / (2.0 * a * c)
    lam = abs(omega) / a
    theta = omega * c / a
    sgn = math.copysign(1.0, omega)
    si_m, ci_m = special.sici(lam * (a * K - c))
    si_p, ci_p = special.sici(lam * (a * K + c))
    j_minus = (-math.cos(theta) * ci_m - sgn * math.sin(theta) * (0.5 * math.pi - si_m)) / a
    j_plus = (-math.cos(theta) * ci_p + sgn * math.sin(theta) * (0.5 * math.pi - si_p)) / a
    return (j_minus - j_plus) / (2.0 * c)


def _chirp_tail(alpha: complex, omega: float, beta: float, K: float, a: float, c: float):
    """``int_K^inf alpha exp(i(k omega - beta k^2)) / (a^2 k^2 - c^2) dk``.

    Two integrations by parts; the returned bound covers the remainder.
    """
    D = a * a * K * K - c * c
    A = alpha / D
    dA = -2.0 * a * a * K * alpha / D ** 2
    dphi = omega - 2.0 * beta * K
    g0 = A / (1j * dphi)
    g1 = -(dA * dphi + 2.0 * beta * A) / dphi ** 3
    phase = np.exp(1j * (K * omega - beta * K * K))
    return (-g0 + g1) * phase, abs(g1)


def _momentum_route(cfg: PhysicalConfig, N: int, r: float, t: float) -> QuadratureResult:
    a = cfg.width
    c = N * math.pi
    beta = cfg.hbar * t / (2.0 * cfg.mass)
    s = 1.0 if N % 2 else -1.0
    alpha1 = -math.sqrt(math.pi * a) * N / _SQRT_2PI
    terms = ((alpha1, r), (s * alpha1, r - a))
    omega_max = max(abs(r), abs(r - a))

    K = (4.0 * c + 50.0) / a
    tail, tail_err = 0j, 0.0
    if beta == 0.0:
        for alpha, omega in terms:
            tail += 2.0 * alpha * _cos_tail(omega, K, a, c)
    else:
        K = max(K, 2.0 * omega_max / (2.0 * beta) + 10.0 / a)
        for _ in range(30):
            tail, tail_err = 0j, 0.0
            for alpha, omega in terms:
                for side in (1.0, -1.0):
                    v, e = _chirp_tail(alpha, side * omega, beta, K, a, c)
                    tail += v
                    tail_err += e
            if tail_err < 1e-11:
                break
            K *= 1.5

    def integrand(k):
        return fourier_amplitude(cfg, N, k) * np.exp(1j * (k * r - beta * k * k)) / _SQRT_2PI

    top_rate = omega_max + 2.0 * beta * K + a + 1.0
    res = adaptive_quadrature(integrand, -K, K, rel_tol=1e-11, abs_tol=1e-12,
                              period=math.pi / top_rate, breakpoints=[-c / a, c / a],
                              max_panels=400_000)
    total = QuadratureResult(complex(res.value + tail), res.error_estimate + tail_err,
                             res.panel_count, res.converged)
    if not res.converged:
        raise QuadratureError("free-evolution momentum integral did not converge", total)
    return total


def _erf_difference(u, v):
    """``erf(u) - erf(v)`` without cancellation when both lie far on one side."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    out = special.erf(u) - special.erf(v)
    right = (u.real > 0) & (v.real > 0)
    left = (u.real < 0) & (v.real < 0)
    out = np.where(right, special.erfc(v) - special.erfc(u), out)
    out = np.where(left, special.erfc(-u) - special.erfc(-v), out)
    return out


def _propagator_route(cfg: PhysicalConfig, N: int, r, t: float):
    """Closed-form free propagation of ``psi_N`` (Fresnel integrals)."""
    rs = np.asarray(r, dtype=float)
    if t == 0.0:
        return well_eigenfunction(cfg, N, rs)
    a = cfg.width
    alpha = cfg.mass / (2.0 * cfg.hbar * t)
    kappa = N * math.pi / a
    z = np.exp(-0.25j * math.pi) * math.sqrt(alpha)
    total = np.zeros(rs.shape, dtype=complex)
    for eps in (1.0, -1.0):
        x0 = rs - eps * kappa / (2.0 * alpha)
        total += eps * np.exp(1j * eps * kappa * rs) * _erf_difference(z * (a - x0), -z * x0)
    out = 0.5 * math.sqrt(2.0 / a) / 2j * np.exp(-1j * kappa ** 2 / (4.0 * alpha)) * total
    return out if out.ndim else complex(out)


def free_evolution(cfg: PhysicalConfig, state: BoxState, r, t: float,
                   method: str = "momentum", full_output: bool = False):
    """Wave function of the released particle at position ``r`` and time ``t``.

    ``method="momentum"`` integrates the free wave packet over momenta with
    an analytic tail beyond the cutoff; ``method="propagator"`` convolves
    ``psi_N`` with the free propagator in closed form and serves as an
    independent cross-check. With ``full_output`` a :class:`QuadratureResult`
    (or a list of them for array input) carries the error estimate.
    """
    if t < 0:
        raise ValueError("release evolution is defined for t >= 0 only")
    N = as_box_state(state).N
    if method == "propagator":
        value = _propagator_route(cfg, N, r, float(t))
        if not full_output:
            return value
        eps = 1e-13
        if np.ndim(value):
            return [QuadratureResult(complex(v), eps, 0) for v in np.ravel(value)]
        return QuadratureResult(value, eps, 0)
    if method != "momentum":
        raise ValueError(f"unknown method {method!r}")
    rs = np.asarray(r, dtype=float)
    results = [_momentum_route(cfg, N, float(x), float(t)) for x in rs.reshape(-1)]
    if full_output:
        return results if rs.ndim else results[0]
    values = np.array([complex(res.value) for res in results]).reshape(rs.shape)
    return values if rs.ndim else complex(values)


def free_norm(cfg: PhysicalConfig, state: BoxState, t: float,
              mass_cutoff: float = 1e-7) -> QuadratureResult:
    """Position-space norm of the released packet at time ``t``.

    The packet is integrated over ``[-R, a + R]``, where ``R`` is reached by
    momenta beyond which the momentum density carries less than
    ``mass_cutoff``; that far-field mass is added back as a correction and
    also counted in the error estimate.
    """
    state = as_box_state(state)
    a = cfg.width
    if t == 0:
        res = adaptive_quadrature(lambda x: np.abs(well_eigenfunction(cfg, state, x)) ** 2,
                                  0.0, a, rel_tol=1e-13)
        return res
    pdf = momentum_pdf(cfg, state)
    A = pdf.normalization
    # Both-sided far tail of the density is about A / (3 a^4 P^3).
    P = max((A / (3.0 * a ** 4 * mass_cutoff)) ** (1.0 / 3.0),
            4.0 * cfg.hbar * state.N * math.pi / a)
    R = P * t / cfg.mass
    far_mass = 2.0 * adaptive_quadrature(lambda s: pdf(P / s) * P / (s * s), 0.0, 1.0,
                                         rel_tol=1e-10, abs_tol=1e-300).value
    period = 2.0 * math.pi * cfg.hbar * t / (cfg.mass * (R + a))
    res = adaptive_quadrature(
        lambda x: np.abs(_propagator_route(cfg, state.N, x, t)) ** 2,
        -R, a + R, rel_tol=1e-11, period=period, max_panels=2_000_000)
    value = float(np.real(res.value)) + float(np.real(far_mass))
    result = QuadratureResult(value, res.error_estimate + abs(float(np.real(far_mass))),
                              res.panel_count, res.converged)
    if not res.converged:
        raise QuadratureError("norm quadrature did not converge", result)
    return result


# -- two-dimensional oscillator (sling) ----------------------------------------

def _as_osc(st) -> OscillatorState:
    return st if isinstance(st, OscillatorState) else OscillatorState(*st)


def sling_energy(cfg: PhysicalConfig, st: OscillatorState) -> float:
    st = _as_osc(st)
    return cfg.hbar * cfg.omega * (st.n1 + st.n2 + 1)


def sling_state(cfg: PhysicalConfig, st: OscillatorState, x, y):
    st = _as_osc(st)
    k = cfg.mass * cfg.omega / cfg.hbar
    norm = math.sqrt(k / math.pi) / math.sqrt(
        2.0 ** (st.n1 + st.n2) * math.factorial(st.n1) * math.factorial(st.n2))
    xs = np.asarray(x, dtype=float)
    ys = np.asarray(y, dtype=float)
    sk = math.sqrt(k)
    out = (norm * np.exp(-0.5 * k * (xs * xs + ys * ys))
           * hermite(st.n1, xs * sk) * hermite(st.n2, ys * sk)) + 0j
    return out if np.ndim(out) else complex(out)


def sling_momentum_pdf(cfg: PhysicalConfig, st: OscillatorState) -> MomentumPdf:
    """Density of ``(p_x, p_y)`` for the stone released from the sling."""
    st = _as_osc(st)
    scale = cfg.mass * cfg.omega * cfg.hbar
    unit = math.sqrt(scale)
    prefactor = 1.0 / (math.pi * scale * 2.0 ** (st.n1 + st.n2)
                       * math.factorial(st.n1) * math.factorial(st.n2))

    def density(px, py):
        u = np.asarray(px, dtype=float) / unit
        v = np.asarray(py, dtype=float) / unit
        out = prefactor * np.exp(-(u * u + v * v)) * hermite(st.n1, u) ** 2 * hermite(st.n2, v) ** 2
        return out if np.ndim(out) else float(out)

    return MomentumPdf(st, cfg, prefactor, density)


def sling_impact_cdf(cfg: PhysicalConfig, st: OscillatorState, E: float,
                     full_output: bool = False):
    """Probability that the released stone carries kinetic energy below ``E``."""
    st = _as_osc(st)
    if E < 0:
        raise ValueError("energy threshold must be non-negative")
    if E == 0:
        res = QuadratureResult(0.0, 0.0, 0)
        return res if full_output else 0.0
    rho_max = math.sqrt(2.0 * E / (cfg.hbar * cfg.omega)) if math.isfinite(E) else math.inf
    # Density is below e^-1600 relative beyond this radius.
    rho_max = min(rho_max, math.sqrt(2 * (st.n1 + st.n2) + 1.0) + 40.0)
    n_theta = 4 * (st.n1 + st.n2) + 8
    theta = 2.0 * math.pi * np.arange(n_theta) / n_theta
    cos_t, sin_t = np.cos(theta), np.sin(theta)
    norm = 1.0 / (math.pi * 2.0 ** (st.n1 + st.n2) * math.factorial(st.n1) * math.factorial(st.n2))

    def radial(rho):
        u = np.multiply.outer(rho, cos_t)
        v = np.multiply.outer(rho, sin_t)
        ang = (hermite(st.n1, u) ** 2 * hermite(st.n2, v) ** 2).mean(axis=-1) * 2.0 * math.pi
        return norm * rho * np.exp(-rho * rho) * ang

    res = adaptive_quadrature(radial, 0.0, rho_max, rel_tol=1e-12, abs_tol=1e-15)
    if not res.converged:
        raise QuadratureError("impact CDF quadrature did not converge", res)
    res = QuadratureResult(min(1.0, float(np.real(res.value))), res.error_estimate,
                           res.panel_count)
    return res if full_output else res.value
