"""Command-line surface for reproduction runs.

Subcommands map one-to-one onto the library: curve-info, orbit, spectrum,
expansion, radon, deform.  Outputs are deterministic for a fixed
configuration: per-q tasks may run on a worker pool but results are
assembled in sorted order, and delimited output uses 17-digit round-trip
decimals.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace

import numpy as np

from . import deformation, expansion, orbits, spectrum
from .curve import (ConvexityError, CurveSpec, affine_perimeter,
                    build_affine_curve, normalize_unit_perimeter)
from .deformation import DomainFamily

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_NUMERICAL = 3

THREADS_ENV = "SYMPBIL_THREADS"


def _fmt(value):
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _render_table(headers, rows):
    cells = [[_fmt(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[i]) for r in cells)) if cells else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(headers, widths)).rstrip()]
    for row in cells:
        lines.append("  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _render_csv(headers, rows):
    lines = [",".join(headers)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    return "\n".join(lines)


class _Section:
    def __init__(self, title, headers, rows, notes=()):
        self.title = title
        self.headers = headers
        self.rows = rows
        self.notes = list(notes)

    def render(self, fmt):
        body = (_render_csv if fmt == "csv" else _render_table)(
            self.headers, self.rows)
        out = [f"# {self.title}"]
        out.extend(f"# {n}" for n in self.notes)
        out.append(body)
        return "\n".join(out)


def _parse_q_range(text):
    parts = text.split(":")
    try:
        if len(parts) == 1:
            lo = hi = int(parts[0])
        elif len(parts) == 2:
            lo, hi = int(parts[0]), int(parts[1])
        else:
            raise ValueError
    except ValueError:
        raise ValueError(f"bad q range {text!r}; expected A:B") from None
    if not (3 <= lo <= hi <= 512):
        raise ValueError("q range must lie within [3, 512]")
    return lo, hi


def _check_samples(n):
    if not (256 <= n <= 65536 and n & (n - 1) == 0):
        raise ValueError("samples must be a power of two in [256, 65536]")
    return n


def _load_json(path):
    if not os.path.exists(path):
        raise ValueError(f"no such file: {path}")
    with open(path, encoding="utf-8") as fh:
        try:
            return json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValueError(f"malformed spec file {path}: {exc}") from None


def _load_curve(args, normalize=True):
    spec = CurveSpec.from_dict(_load_json(args.spec))
    raw_perimeter = affine_perimeter(spec)
    if normalize:
        spec = normalize_unit_perimeter(spec)
    return spec, raw_perimeter, build_affine_curve(spec, args.samples)


def _pool_map(func, items, threads):
    if threads <= 1:
        return [func(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))


# -- subcommand handlers ----------------------------------------------------


def _cmd_curve_info(args):
    spec, raw_perimeter, curve = _load_curve(args)
    rows = [
        ("affine_perimeter", raw_perimeter),
        ("area", curve.enclosed_area),
        ("k_min", float(np.min(curve.k_values))),
        ("k_max", float(np.max(curve.k_values))),
        ("circle_distance", curve.circle_distance()),
    ]
    return [_Section("curve-info", ["quantity", "value"], rows)], None


def _cmd_orbit(args):
    _, _, curve = _load_curve(args)
    lo, hi = _parse_q_range(args.q)
    qs = [q for q in range(lo, hi + 1)]
    if args.symmetry == "central":
        qs = [q for q in qs if q % 2 == 0 and q >= 4]

    def solve(q):
        if args.symmetry == "axial":
            return orbits.maximize_axial(curve, q)
        if args.symmetry == "central":
            return orbits.maximize_central(curve, q)
        return orbits.maximize_free(curve, q)

    results = _pool_map(solve, qs, args.threads)
    rows = []
    for orbit in results:
        if orbit.max_residual > args.tol:
            raise orbits.OrbitError(
                f"orbit q={orbit.q} residual {orbit.max_residual:.3e} "
                f"exceeds tolerance {args.tol:g}")
        rows.append((orbit.q, orbit.symmetry, orbit.action,
                     orbit.max_residual, orbit.iterations))
    headers = ["q", "symmetry", "action", "max_residual", "iterations"]
    return [_Section("orbit", headers, rows)], None


def _cmd_spectrum(args):
    _, _, curve = _load_curve(args)
    lo, hi = _parse_q_range(args.q)
    fit = spectrum.fit_beta_coeffs(curve, lo, hi, symmetry=args.symmetry)
    qs = list(range(lo, hi + 1))
    deltas = _pool_map(lambda q: spectrum.delta_q(curve, q, args.symmetry),
                       qs, args.threads)
    rows = []
    for q, dq in zip(qs, deltas):
        beta = -dq / q
        rows.append((q, dq, beta, beta - fit.model(q) / q))
    coeff_rows = [
        ("beta1", fit.beta1), ("beta3", fit.beta3),
        ("beta5", fit.beta5), ("beta7", fit.beta7),
        ("residual_norm", fit.residual_norm),
        ("condition", fit.condition),
    ]
    notes = ["ill-conditioned fit"] if fit.ill_conditioned else []
    sections = [
        _Section("spectrum", ["q", "delta_q", "beta", "residual"], rows),
        _Section("beta-fit", ["coefficient", "value"], coeff_rows, notes),
    ]
    figure = None
    if args.format == "svg":
        def figure(path):
            import matplotlib
            matplotlib.use("svg")
            import matplotlib.pyplot as plt
            fig, ax = plt.subplots(figsize=(5, 4))
            qa = np.array(qs, dtype=float)
            ya = np.array([-d for d in deltas])
            ax.plot(1 / qa**2, ya, "o", ms=3, label="q beta(1/q)")
            ax.plot(1 / qa**2, fit.model(qa), "-", lw=1, label="fit")
            ax.set_xlabel("1/q^2")
            ax.set_ylabel("q beta(1/q)")
            ax.legend()
            fig.savefig(path, format="svg")
            plt.close(fig)
    return sections, figure


def _geometric_qs(lo, hi):
    qs = []
    q = lo
    while q <= hi:
        qs.append(q)
        q *= 2
    if len(qs) < 2:
        raise ValueError("expansion needs a q range spanning at least a doubling")
    return qs


def _cmd_expansion(args):
    _, _, curve = _load_curve(args)
    lo, hi = _parse_q_range(args.q)
    qs = _geometric_qs(lo, hi)
    which_list = ["lambda", "s", "chord"]
    reports = _pool_map(lambda w: expansion.residual_order(curve, w, qs),
                        which_list, args.threads)
    rows = []
    slope_rows = []
    for rep in reports:
        for q, res, used in zip(rep.q_values, rep.max_residuals, rep.used):
            rows.append((rep.which, q, res, "" if used else "noise-floor"))
        slope_rows.append((rep.which, rep.slope, rep.slope_halfwidth,
                           "unreliable" if rep.floor_limited else ""))
    sections = [
        _Section("expansion", ["which", "q", "max_residual", "flag"], rows),
        _Section("slopes", ["which", "slope", "halfwidth", "flag"], slope_rows),
    ]
    figure = None
    if args.format == "svg":
        def figure(path):
            import matplotlib
            matplotlib.use("svg")
            import matplotlib.pyplot as plt
            fig, ax = plt.subplots(figsize=(5, 4))
            for rep in reports:
                ax.loglog(rep.q_values, rep.max_residuals, "o-", ms=3,
                          label=rep.which)
            ax.set_xlabel("q")
            ax.set_ylabel("max residual")
            ax.legend()
            fig.savefig(path, format="svg")
            plt.close(fig)
    return sections, figure


def _cmd_radon(args):
    _, _, curve = _load_curve(args)
    lo, hi = _parse_q_range(args.q)
    anchor = orbits.radon_anchor(curve)
    grid = np.arange(64) / 64
    phi_rows = []
    for s in grid:
        phi = orbits.four_orbit_map(curve, float(s))
        defect = (phi - s - 0.25 + 0.5) % 1.0 - 0.5
        phi_rows.append((float(s), phi, defect))
    probe_qs = [q for q in range(lo, hi + 1) if q % 2 == 0 and q >= 4]
    probes = _pool_map(lambda q: orbits.integrability_probe(curve, q),
                       probe_qs, args.threads)
    sections = [
        _Section("radon", ["anchor"], [(anchor,)]),
        _Section("four-orbit-map", ["s", "phi", "phi_defect"], phi_rows),
        _Section("integrability-probe", ["q", "probe"],
                 list(zip(probe_qs, probes))),
    ]
    return sections, None


def _cmd_deform(args):
    family = DomainFamily.from_dict(_load_json(args.family))
    family = replace(family, n_samples=args.samples)
    lo, hi = _parse_q_range(args.q)
    curve = family.curve_at(0.0)
    grid = np.arange(64) / 64
    n_vals = deformation.deformation_function(family, 0.0, grid)
    u_vals = deformation.weight_u(family, 0.0, grid)
    n_rows = list(zip(grid.tolist(), n_vals.tolist(), u_vals.tolist()))
    u_grid = deformation.weight_u_grid(family, 0.0)
    coeffs = deformation.fourier_coeffs(u_grid, 32)
    fourier_rows = [(k, coeffs.coeff(k).real, coeffs.coeff(k).imag)
                    for k in range(0, 33)]
    qs = [q for q in range(lo, hi + 1)]
    if family.symmetry == "central":
        qs = [q for q in qs if q % 2 == 0 and q >= 4]

    def row_for(q):
        row = deformation.rigidity_row(family, q)
        env = deformation.isospectral_residual(family, q)
        return (q, row.fourier_side, row.direct_side, row.gap, env)

    rows = _pool_map(row_for, qs, args.threads)
    sections = [
        _Section("deformation-function", ["s", "n", "u"], n_rows),
        _Section("fourier", ["k", "re_u_hat", "im_u_hat"], fourier_rows,
                 notes=[f"real_symmetric={coeffs.real_symmetric} "
                        f"half_periodic={coeffs.half_periodic}"]),
        _Section("rigidity-rows",
                 ["q", "fourier_side", "direct_side", "gap", "envelope_residual"],
                 rows),
    ]
    return sections, None


# -- entry point ------------------------------------------------------------


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="sympbil",
        description="numerical laboratory for symplectic billiards")
    sub = parser.add_subparsers(dest="command", required=True)
    defs = {
        "curve-info": (_cmd_curve_info, "perimeter, area, curvature, distance"),
        "orbit": (_cmd_orbit, "maximizing periodic orbits and residuals"),
        "spectrum": (_cmd_spectrum, "Delta_q table and beta-coefficient fit"),
        "expansion": (_cmd_expansion, "expansion residual orders"),
        "radon": (_cmd_radon, "anchor, 4-orbit map, integrability probes"),
        "deform": (_cmd_deform, "deformation function and rigidity rows"),
    }
    default_threads = int(os.environ.get(THREADS_ENV, "1"))
    for name, (func, help_text) in defs.items():
        p = sub.add_parser(name, help=help_text)
        if name == "deform":
            p.add_argument("--family", required=True, help="family spec file")
        else:
            p.add_argument("--spec", required=True, help="curve spec file")
        p.add_argument("--q", default="3:12", help="period range A:B")
        p.add_argument("--samples", type=int, default=4096,
                       help="curve sample count (power of two)")
        p.add_argument("--tol", type=float, default=1e-10,
                       help="orbit residual tolerance")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--format", choices=("table", "csv", "svg"),
                       default="table")
        p.add_argument("--threads", type=int, default=default_threads)
        if name in ("orbit", "spectrum"):
            p.add_argument("--symmetry", choices=("axial", "central", "free"),
                           default="axial")
        p.set_defaults(func=func)
    return parser


def _emit(args, sections, figure):
    fmt = "csv" if args.format == "svg" else args.format
    text = "\n\n".join(sec.render(fmt) for sec in sections)
    print(text)
    if args.out:
        os.makedirs(args.out, exist_ok=True)
        ext = "csv" if fmt == "csv" else "txt"
        path = os.path.join(args.out, f"{args.command}.{ext}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
        if figure is not None:
            figure(os.path.join(args.out, f"{args.command}.svg"))
    elif figure is not None:
        figure(f"{args.command}.svg")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        _check_samples(args.samples)
        sections, figure = args.func(args)
        _emit(args, sections, figure)
    except (ValueError, ConvexityError, KeyError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc),
                  "exit": EXIT_INVALID}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_INVALID
    except (orbits.OrbitError, orbits.RadonError, RuntimeError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc),
                  "exit": EXIT_NUMERICAL}
        print(json.dumps(record), file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
