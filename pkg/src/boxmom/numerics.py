"""Shared numerical kernels: adaptive Gauss-Kronrod quadrature, Hermite
polynomials and symmetric series summation with rigorous tail bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "QuadratureResult",
    "QuadratureError",
    "SeriesResult",
    "adaptive_quadrature",
    "hermite",
    "sum_symmetric_series",
    "HERMITE_MAX_ORDER",
]

HERMITE_MAX_ORDER = 30

# 15-point Kronrod extension of the 7-point Gauss-Legendre rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS_WEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5, 7 from the outside in).
for _i, _w in zip((1, 3, 5), _WG[:3]):
    _GAUSS_WEIGHTS[_i] = _w
    _GAUSS_WEIGHTS[14 - _i] = _w
_GAUSS_WEIGHTS[7] = _WG[3]


@dataclass(frozen=True)
class QuadratureResult:
    value: complex | float
    error_estimate: float
    panel_count: int
    converged: bool = True

    def __post_init__(self):
        if not self.error_estimate >= 0:
            raise ValueError("error_estimate must be non-negative")


class QuadratureError(RuntimeError):
    """Raised when a quadrature fails to reach its requested tolerance.

    The best available estimate is kept on ``result``.
    """

    def __init__(self, message: str, result: QuadratureResult):
        super().__init__(f"{message} (value={result.value!r}, "
                         f"error estimate={result.error_estimate:.3e})")
        self.result = result


@dataclass(frozen=True)
class SeriesResult:
    value: complex
    terms_used: int
    tail_bound: float


def _gk15(f, lo: np.ndarray, hi: np.ndarray):
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    y = np.asarray(f(x.ravel())).reshape(x.shape)
    kron = half * (y @ _KRONROD_WEIGHTS)
    gauss = half * (y @ _GAUSS_WEIGHTS)
    scale = np.abs(half) * (np.abs(y) @ _KRONROD_WEIGHTS)
    err = np.abs(kron - gauss)
    # Roundoff floor; tolerances below this cannot be met by any panel split.
    err = np.maximum(err, 50.0 * np.finfo(float).eps * scale)
    return kron, err


def _initial_edges(lo, hi, breakpoints, period):
    edges = [lo, hi]
    if breakpoints is not None:
        edges.extend(b for b in breakpoints if lo < b < hi)
    if period is not None and period > 0:
        count = int(math.floor((hi - lo) / period))
        if count > 200_000:
            raise ValueError("period hint would create more than 200000 panels")
        edges.extend(lo + period * np.arange(1, count + 1))
    edges = np.unique(np.asarray(edges, dtype=float))
    return edges[(edges >= lo) & (edges <= hi)]


def adaptive_quadrature(
    f: Callable[[np.ndarray], np.ndarray],
    lo: float,
    hi: float,
    rel_tol: float = 1e-10,
    abs_tol: float = 0.0,
    *,
    breakpoints: Sequence[float] | None = None,
    period: float | None = None,
    max_panels: int = 50_000,
) -> QuadratureResult:
    """Integrate ``f`` over ``[lo, hi]`` by globally adaptive GK15 bisection.

    ``f`` must be vectorized: it receives a 1-D array of abscissae and
    returns an array of the same length (real or complex). The interval is
    pre-split at ``breakpoints`` and at multiples of ``period`` when given,
    which keeps oscillatory integrands to a bounded number of cycles per
    panel. Iteration stops once the summed panel error estimates fall below
    ``max(abs_tol, rel_tol * |value|)``; if ``max_panels`` is exceeded the
    best estimate is returned with ``converged=False``.
    """
    lo = float(lo)
    hi = float(hi)
    if not lo < hi:
        raise ValueError(f"need lo < hi, got lo={lo}, hi={hi}")
    if not rel_tol > 0:
        raise ValueError("rel_tol must be positive")

    edges = _initial_edges(lo, hi, breakpoints, period)
    a, b = edges[:-1], edges[1:]
    vals, errs = _gk15(f, a, b)
    min_width = 1e-14 * (hi - lo)

    while True:
        total = vals.sum()
        err_total = float(errs.sum())
        target = max(abs_tol, rel_tol * abs(total))
        if err_total <= target:
            return QuadratureResult(total, err_total, a.size, True)
        splittable = (b - a) > min_width
        share = target / a.size
        pick = (errs > share) & splittable
        if not pick.any():
            pick = np.zeros_like(pick)
            if splittable.any():
                pick[np.argmax(np.where(splittable, errs, -1.0))] = True
            else:
                return QuadratureResult(total, err_total, a.size, False)
        if a.size + int(pick.sum()) > max_panels:
            return QuadratureResult(total, err_total, a.size, False)
        mid = 0.5 * (a[pick] + b[pick])
        new_a = np.concatenate([a[pick], mid])
        new_b = np.concatenate([mid, b[pick]])
        new_vals, new_errs = _gk15(f, new_a, new_b)
        keep = ~pick
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        vals = np.concatenate([vals[keep], new_vals])
        errs = np.concatenate([errs[keep], new_errs])


def hermite(n: int, u):
    """Physicists' Hermite polynomial H_n(u) by three-term recurrence."""
    if not 0 <= n <= HERMITE_MAX_ORDER:
        raise ValueError(f"Hermite order must lie in [0, {HERMITE_MAX_ORDER}], got {n}")
    u = np.asarray(u, dtype=float)
    prev = np.ones_like(u)
    if n == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * u
    for k in range(1, n):
        prev, cur = cur, 2.0 * u * cur - 2.0 * k * prev
    return cur if cur.ndim else float(cur)


def _one_sided_tail(envelope, start: int, sign: int) -> float:
    """Bound sum_{n > start} envelope(sign*n) by integral comparison."""
    def env(x):
        return np.abs(np.asarray(envelope(sign * x), dtype=float))

    with np.errstate(divide="ignore", invalid="ignore"):
        at_start = float(env(np.array([float(start)]))[0])
    if math.isfinite(at_start):
        first, lower = 0.0, float(start)
    else:
        first, lower = float(env(np.array([start + 1.0]))[0]), start + 1.0

    # x = lower / s maps [lower, inf) onto (0, 1].
    def mapped(s):
        return env(lower / s) * lower / (s * s)

    res = adaptive_quadrature(mapped, 0.0, 1.0, rel_tol=1e-10, abs_tol=1e-300)
    return first + float(np.real(res.value)) + res.error_estimate


def sum_symmetric_series(
    term: Callable[[int], complex],
    M: int,
    tail_envelope: Callable | None = None,
) -> SeriesResult:
    """Sum ``term(n)`` for ``n`` in ``[-M, M]`` and bound the omitted tail.

    ``tail_envelope`` must dominate ``|term(n)|`` for ``|n| > M``, decrease
    monotonically there and accept numpy arrays. Without it the tail bound is
    zero, which is only honest for finitely supported terms.
    """
    if M < 1:
        raise ValueError("M must be at least 1")
    value = sum((complex(term(n)) for n in range(-M, M + 1)), 0j)
    tail = 0.0
    if tail_envelope is not None:
        tail = _one_sided_tail(tail_envelope, M, +1) + _one_sided_tail(tail_envelope, M, -1)
    return SeriesResult(value=value, terms_used=2 * M + 1, tail_bound=tail)
