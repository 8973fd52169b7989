"""Command-line interface.

Every command prints one record to stdout, as CSV (default) or JSON:

* CSV: ``#``-prefixed lines for the command and its parameters, a header row,
  the result rows, then ``#``-prefixed diagnostics. Complex numbers are split
  into ``re_*``/``im_*`` columns; reals use 15 significant digits.
* JSON: one object ``{command, params, rows, diagnostics}``.

Exit codes: 0 success, 2 invalid arguments, 3 quadrature failure.
The environment variable ``BOXMOM_FORMAT`` sets the default format.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass, field

import numpy as np

from . import __version__
from .core import BoxState, PhysicalConfig, energy_level, well_eigenfunction
from .extensions import (NamedBC, HamiltonianBC, SigmaExtension, bc_residuals,
                         hamiltonian_spectrum, named_bc_matrices, sigma_eigenvalue)
from .galilei import BoostParams, moving_expansion, moving_momentum, sigma_of_velocity
from .numerics import HERMITE_MAX_ORDER, QuadratureError
from .release import (OscillatorState, fourier_amplitude, free_evolution, momentum_pdf,
                      pdf_moment, sling_energy, sling_impact_cdf, sling_momentum_pdf)
from .spectral import expand_state

FORMAT_ENV = "BOXMOM_FORMAT"
_MERGED_FLAGS = ("--grid", "--xgrid", "--alpha", "--beta")


class UsageError(ValueError):
    pass


@dataclass
class OutputRecord:
    command: str
    params: dict
    columns: list[str]
    rows: list[dict] = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)

    def add_row(self, **values):
        row = {}
        for key in self.columns:
            if key not in values:
                raise KeyError(f"row is missing column {key!r}")
            row[key] = _clean(values[key])
        self.rows.append(row)


def _clean(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            raise ValueError(f"non-finite value {value!r} in output")
        value = float(f"{value:.15g}")
        return 0.0 if value == 0 else value
    if isinstance(value, str):
        return value
    raise TypeError(f"unsupported output value {value!r}")


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.15g}"
    return str(value)


def render_csv(rec: OutputRecord) -> str:
    buf = io.StringIO()
    buf.write(f"# command: {rec.command}\n")
    for key in sorted(rec.params):
        buf.write(f"# param {key}={_fmt(rec.params[key])}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(rec.columns)
    for row in rec.rows:
        writer.writerow([_fmt(row[c]) for c in rec.columns])
    for key in sorted(rec.diagnostics):
        buf.write(f"# diag {key}={_fmt(rec.diagnostics[key])}\n")
    return buf.getvalue()


def render_json(rec: OutputRecord) -> str:
    doc = {"command": rec.command, "params": rec.params, "rows": rec.rows,
           "diagnostics": rec.diagnostics}
    return json.dumps(doc, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _finalize(rec: OutputRecord) -> OutputRecord:
    rec.params = {k: _clean(v) for k, v in rec.params.items()}
    rec.diagnostics = {k: _clean(v) for k, v in rec.diagnostics.items()}
    return rec


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:npoints`` with inclusive endpoints."""
    parts = text.split(":")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError(f"grid must look like lo:hi:npoints, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed grid {text!r}") from None
    if not (math.isfinite(lo) and math.isfinite(hi)) or n < 1 or (n > 1 and not lo < hi):
        raise argparse.ArgumentTypeError(f"grid needs finite lo < hi and npoints >= 1, got {text!r}")
    if n > 100_000:
        raise argparse.ArgumentTypeError("grid is limited to 100000 points")
    return np.linspace(lo, hi, n)


def _complex_entries(text: str) -> list[complex]:
    parts = [p.strip() for p in text.split(",")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError(f"expected 4 comma-separated entries, got {text!r}")
    try:
        values = [complex(p.replace("i", "j")) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed complex entry in {text!r}") from None
    if not all(math.isfinite(v.real) and math.isfinite(v.imag) for v in values):
        raise argparse.ArgumentTypeError("matrix entries must be finite")
    return values


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be a finite positive number, got {text!r}")
    return value


def _finite(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be finite, got {text!r}")
    return value


def _nonneg(text: str) -> float:
    value = _finite(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text!r}")
    return value


def _int_range(lo: int, hi: int | None = None):
    def convert(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < lo or (hi is not None and value > hi):
            bound = f"[{lo}, {hi}]" if hi is not None else f">= {lo}"
            raise argparse.ArgumentTypeError(f"must be an integer {bound}, got {text!r}")
        return value
    return convert


def _config(args) -> PhysicalConfig:
    return PhysicalConfig(hbar=args.hbar, mass=args.mass, width=args.width, omega=args.omega)


def _cfg_params(cfg: PhysicalConfig) -> dict:
    return {"hbar": cfg.hbar, "mass": cfg.mass, "width": cfg.width, "omega": cfg.omega}


# -- commands -------------------------------------------------------------------

def cmd_spectrum(args) -> OutputRecord:
    cfg = _config(args)
    params = _cfg_params(cfg) | {"count": args.count}
    if args.bc is not None:
        name = NamedBC(args.bc)
        params["bc"] = name.value
        rec = OutputRecord("spectrum", params,
                           ["index", "level", "eigenvalue", "degeneracy", "kind", "frequency"])
        for i, entry in enumerate(hamiltonian_spectrum(cfg, name, args.count)):
            rec.add_row(index=i, level=entry.level, eigenvalue=entry.energy,
                        degeneracy=entry.degeneracy, kind=entry.kind, frequency=entry.frequency)
        rec.diagnostics["quantity"] = "energy"
        return rec

    ext = SigmaExtension(args.sigma)
    params["sigma"] = ext.sigma
    rec = OutputRecord("spectrum", params, ["index", "eigenvalue", "degeneracy"])
    span = args.count // 2 + 2
    candidates = [(n, sigma_eigenvalue(cfg, ext, n)) for n in range(-span, span + 1)]
    candidates.sort(key=lambda item: (abs(item[1]), item[1]))
    for n, value in sorted(candidates[:args.count], key=lambda item: item[1]):
        rec.add_row(index=n, eigenvalue=value, degeneracy=1)
    rec.diagnostics["quantity"] = "momentum"
    return rec


def cmd_expand(args) -> OutputRecord:
    cfg = _config(args)
    state = BoxState(args.N)
    M = args.M if args.M is not None else max(50, math.ceil(args.N / 2) + 1)
    params = _cfg_params(cfg) | {"N": args.N, "M": M}
    columns = ["n", "momentum", "re_c", "im_c", "abs2"]
    if args.frame is not None:
        boost = BoostParams(args.frame)
        params |= {"frame": args.frame, "tau": args.tau}
        exp = moving_expansion(cfg, state, boost, args.tau, M)
        rec = OutputRecord("expand", params, columns)
        for n in exp.indices():
            c = exp.coefficients[n]
            rec.add_row(n=n, momentum=moving_momentum(cfg, boost, n), re_c=c.real, im_c=c.imag,
                        abs2=abs(c) ** 2)
        rec.diagnostics |= {"basis": "moving-frame", "sigma": sigma_of_velocity(cfg, boost).sigma,
                            "parseval_sum": exp.parseval_sum(), "tail_bound": exp.tail_bound}
        return rec

    exp = expand_state(state, args.sigma, M)
    params["sigma"] = exp.sigma
    rec = OutputRecord("expand", params, columns)
    ext = SigmaExtension(exp.sigma)
    for n in exp.indices():
        c = exp.coefficients[n]
        rec.add_row(n=n, momentum=sigma_eigenvalue(cfg, ext, n), re_c=c.real, im_c=c.imag,
                    abs2=abs(c) ** 2)
    rec.diagnostics |= {"basis": "sigma", "resonance": exp.resonance.value,
                        "parseval_sum": exp.parseval_sum(), "tail_bound": exp.tail_bound}
    return rec


def _trapezoid(y: np.ndarray, x: np.ndarray) -> float:
    if x.size < 2:
        return 0.0
    return float(np.sum(0.5 * (y[1:] + y[:-1]) * np.diff(x)))


def cmd_release(args) -> OutputRecord:
    cfg = _config(args)
    state = BoxState(args.N)
    grid = args.grid if args.grid is not None else np.linspace(-20.0, 20.0, 401)
    params = _cfg_params(cfg) | {"N": args.N, "grid_lo": grid[0], "grid_hi": grid[-1],
                                 "grid_n": grid.size}
    rec = OutputRecord("release", params,
                       ["series", "coordinate", "density", "re_amplitude", "im_amplitude"])
    pdf = momentum_pdf(cfg, state)
    dens = np.atleast_1d(pdf(grid))
    amp = np.atleast_1d(fourier_amplitude(cfg, state, grid / cfg.hbar)) / math.sqrt(cfg.hbar)
    for p, d, c in zip(grid, dens, amp):
        rec.add_row(series="momentum", coordinate=p, density=d, re_amplitude=c.real,
                    im_amplitude=c.imag)
    norm = pdf_moment(pdf, 0, full_output=True)
    first = pdf_moment(pdf, 1, full_output=True)
    second = pdf_moment(pdf, 2, full_output=True)
    rec.diagnostics |= {
        "trapezoid_integral": _trapezoid(dens, grid),
        "normalization": norm.value, "normalization_error": norm.error_estimate,
        "mean_momentum": first.value, "mean_momentum_error": first.error_estimate,
        "second_moment": second.value, "second_moment_error": second.error_estimate,
        "expected_second_moment": 2.0 * cfg.mass * energy_level(cfg, state),
        "interpretation": "momentum of the particle released at t=0",
    }
    if args.time is not None:
        a = cfg.width
        xgrid = args.xgrid if args.xgrid is not None else np.linspace(-a, 2 * a, 121)
        rec.params |= {"time": args.time, "method": args.method, "xgrid_lo": xgrid[0],
                       "xgrid_hi": xgrid[-1], "xgrid_n": xgrid.size}
        results = free_evolution(cfg, state, xgrid, args.time, method=args.method,
                                 full_output=True)
        values = np.array([complex(r.value) for r in results])
        for x, v in zip(xgrid, values):
            rec.add_row(series="position", coordinate=x, density=abs(v) ** 2,
                        re_amplitude=v.real, im_amplitude=v.imag)
        rec.diagnostics |= {
            "position_trapezoid": _trapezoid(np.abs(values) ** 2, xgrid),
            "evolution_error_estimate": max(r.error_estimate for r in results),
        }
        if args.time == 0:
            initial = np.atleast_1d(well_eigenfunction(cfg, state, xgrid))
            rec.diagnostics["max_deviation_from_initial"] = float(np.max(np.abs(values - initial)))
    return rec


def cmd_sling(args) -> OutputRecord:
    cfg = _config(args)
    st = OscillatorState(args.n1, args.n2)
    own = sling_energy(cfg, st)
    E = own if args.energy is None else args.energy
    unit = math.sqrt(cfg.mass * cfg.omega * cfg.hbar)
    grid = args.grid if args.grid is not None else np.linspace(-4.0 * unit, 4.0 * unit, 17)
    params = _cfg_params(cfg) | {"n1": args.n1, "n2": args.n2, "energy": E,
                                 "grid_lo": grid[0], "grid_hi": grid[-1], "grid_n": grid.size}
    rec = OutputRecord("sling", params, ["px", "py", "density"])
    pdf = sling_momentum_pdf(cfg, st)
    for px in grid:
        for py in grid:
            rec.add_row(px=px, py=py, density=pdf(px, py))
    cdf = sling_impact_cdf(cfg, st, E, full_output=True)
    own_cdf = sling_impact_cdf(cfg, st, own)
    rec.diagnostics |= {
        "impact_cdf": cdf.value, "impact_cdf_error": cdf.error_estimate,
        "bound_energy": own, "impact_cdf_at_bound_energy": own_cdf,
        "lower_impact_more_probable": own_cdf > 0.5,
        "normalization": pdf_moment(pdf, 0),
    }
    return rec


def cmd_validate_bc(args) -> OutputRecord:
    if args.preset is not None:
        if args.alpha is not None or args.beta is not None:
            raise UsageError("--preset cannot be combined with --alpha/--beta")
        bc = named_bc_matrices(args.preset)
        params = {"preset": args.preset}
    else:
        if args.alpha is None or args.beta is None:
            raise UsageError("give --preset or both --alpha and --beta")
        bc = HamiltonianBC(np.reshape(args.alpha, (2, 2)), np.reshape(args.beta, (2, 2)))
        params = {}
    names = ["a11", "a12", "a21", "a22", "b11", "b12", "b21", "b22"]
    for key, value in zip(names, bc.entries()):
        params[f"re_{key}"] = value.real
        params[f"im_{key}"] = value.imag
    params["tol"] = args.tol
    rec = OutputRecord("validate-bc", params, ["row", "re_residual", "im_residual", "abs_residual", "pass"])
    residuals = bc_residuals(bc)
    for i, r in enumerate(residuals, start=1):
        rec.add_row(row=i, re_residual=r.real, im_residual=r.imag, abs_residual=abs(r),
                    **{"pass": bool(abs(r) <= args.tol)})
    rec.diagnostics["valid"] = bool(np.all(np.abs(residuals) <= args.tol))
    return rec


# -- parser -----------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hbar", type=_positive, default=1.0)
    common.add_argument("--mass", type=_positive, default=1.0)
    common.add_argument("--width", type=_positive, default=1.0, help="well width a")
    common.add_argument("--omega", type=_positive, default=1.0, help="sling frequency")
    default_format = os.environ.get(FORMAT_ENV, "csv").strip().lower() or "csv"
    common.add_argument("--format", choices=("csv", "json"),
                        default=default_format if default_format in ("csv", "json") else "csv")

    parser = argparse.ArgumentParser(
        prog="boxmom",
        description="Momentum observables of a particle in a box: sigma-momentum "
                    "spectra and expansions, moving frames, and sudden release.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", parents=[common],
                       help="sigma-momentum eigenvalues or named Hamiltonian spectra")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sigma", type=_finite)
    group.add_argument("--bc", choices=[b.value for b in NamedBC])
    p.add_argument("--count", type=_int_range(1, 10_000), default=5)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("expand", parents=[common],
                       help="coefficients of a well state in a sigma or moving-frame basis")
    p.add_argument("--N", type=_int_range(1, 10_000), required=True)
    p.add_argument("--sigma", type=_finite, default=0.0)
    p.add_argument("--M", type=_int_range(1, 100_000), default=None)
    p.add_argument("--frame", type=_finite, default=None, help="observer velocity V")
    p.add_argument("--tau", type=_finite, default=0.0)
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("release", parents=[common],
                       help="momentum density of the particle released at t=0")
    p.add_argument("--N", type=_int_range(1, 10_000), required=True)
    p.add_argument("--grid", type=parse_grid, default=None, help="momentum grid lo:hi:n")
    p.add_argument("--time", type=_nonneg, default=None)
    p.add_argument("--xgrid", type=parse_grid, default=None, help="position grid lo:hi:n")
    p.add_argument("--method", choices=("momentum", "propagator"), default="momentum")
    p.set_defaults(func=cmd_release)

    p = sub.add_parser("sling", parents=[common],
                       help="momentum density and impact-energy CDF of a released oscillator")
    p.add_argument("--n1", type=_int_range(0, HERMITE_MAX_ORDER), required=True)
    p.add_argument("--n2", type=_int_range(0, HERMITE_MAX_ORDER), required=True)
    p.add_argument("--energy", type=_nonneg, default=None)
    p.add_argument("--grid", type=parse_grid, default=None, help="momentum grid lo:hi:n per axis")
    p.set_defaults(func=cmd_sling)

    p = sub.add_parser("validate-bc", parents=[common],
                       help="check the self-adjointness constraint of boundary matrices")
    p.add_argument("--preset", choices=[b.value for b in NamedBC])
    p.add_argument("--alpha", type=_complex_entries, help="a11,a12,a21,a22")
    p.add_argument("--beta", type=_complex_entries, help="b11,b12,b21,b22")
    p.add_argument("--tol", type=_nonneg, default=1e-12)
    p.set_defaults(func=cmd_validate_bc)
    return parser


def _merge_values(argv: list[str]) -> list[str]:
    # Values such as "-20:20:401" would otherwise be mistaken for options.
    out = []
    it = iter(range(len(argv)))
    skip = False
    for i in it:
        if skip:
            skip = False
            continue
        token = argv[i]
        if token in _MERGED_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            skip = True
        else:
            out.append(token)
    return out


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(_merge_values(argv))
    try:
        rec = _finalize(args.func(args))
    except QuadratureError as exc:
        print(f"boxmom: quadrature failure: {exc}", file=sys.stderr)
        print(f"boxmom: error estimate {exc.result.error_estimate:.6e}", file=sys.stderr)
        return 3
    except (UsageError, ValueError) as exc:
        print(f"boxmom: error: {exc}", file=sys.stderr)
        return 2
    text = render_json(rec) if args.format == "json" else render_csv(rec)
    sys.stdout.write(text)
    return 0
