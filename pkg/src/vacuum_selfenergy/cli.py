"""Command-line front end: density profiles, consistency checks and convergence studies.

Every subcommand emits one table, as CSV (``#`` metadata lines, a header row,
17 significant digits) or as JSON (``{"metadata": ..., "rows": [...]}``).
Exit statuses: 0 check passed, 1 check failed numerically, 2 invalid input,
3 numerical non-convergence. Invalid input is reported as a single
``error: <reason>`` line on standard error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import platform
import sys
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import numpy as np

from . import __version__, extsource, pointlike
from ._validation import DomainError
from .quadrature import ConvergenceError, QuadratureConfig

EXIT_PASS = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_NOT_CONVERGED = 3

_STATUS_LABEL = {EXIT_PASS: "PASS", EXIT_FAILED: "FAIL", EXIT_NOT_CONVERGED: "NOT CONVERGED"}
_DEFAULT_GAMMAS = (0.4, 0.2, 0.1, 0.05)


class InputError(ValueError):
    """Invalid command-line input; the message is the one-line reason."""


@dataclass
class Table:
    """Output of a subcommand: ordered columns, rows, metadata and exit status."""

    columns: List[str]
    rows: List[Sequence]
    metadata: Dict[str, object] = field(default_factory=dict)
    status: int = EXIT_PASS
    diagnostics: str = ""


# ---------------------------------------------------------------------------
# argument parsing

def parse_source(text):
    """``point``, ``gaussian:<a>`` or ``lorentzian2:<a>`` to a :class:`FormFactor`."""
    kind, _, size = text.partition(":")
    if kind == "point":
        if size:
            raise InputError("point source takes no size")
        return extsource.FormFactor("point")
    if kind not in ("gaussian", "lorentzian2"):
        raise InputError(f"unknown source {text!r}; expected point, gaussian:<a> or lorentzian2:<a>")
    try:
        return extsource.FormFactor(kind, float(size))
    except ValueError:
        raise InputError(f"source {text!r} needs a positive size, e.g. {kind}:0.5") from None


def parse_alpha(text):
    """``static:<a0>`` or ``rational:<a0>:<k0>`` to a :class:`Polarizability`."""
    parts = text.split(":")
    try:
        if parts[0] == "static" and len(parts) == 2:
            return extsource.Polarizability("static", float(parts[1]))
        if parts[0] == "rational" and len(parts) == 3:
            return extsource.Polarizability("rational", float(parts[1]), float(parts[2]))
    except ValueError:
        pass
    raise InputError(f"invalid polarizability {text!r}; expected static:<a0> or rational:<a0>:<k0>")


def parse_grid(text):
    """``<min>:<max>:<points>:<linear|log>`` to an array of distances."""
    parts = text.split(":")
    if len(parts) != 4:
        raise InputError(f"invalid grid {text!r}; expected <min>:<max>:<points>:<linear|log>")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise InputError(f"invalid grid {text!r}; bounds must be numbers and points an integer") from None
    spacing = parts[3]
    if spacing not in ("linear", "log"):
        raise InputError(f"grid spacing must be linear or log, got {spacing!r}")
    if not lo < hi:
        raise InputError("grid lower bound must be below the upper bound")
    if n < 2:
        raise InputError("grid needs at least 2 points")
    if spacing == "log":
        if lo <= 0:
            raise InputError("grid lower bound must be positive for log spacing")
        return np.geomspace(lo, hi, n)
    return np.linspace(lo, hi, n)


def parse_list(text):
    """Comma-separated numbers."""
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise InputError(f"invalid number list {text!r}") from None
    if not values:
        raise InputError("empty number list")
    return values


def _common_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--source", help="point, gaussian:<a> or lorentzian2:<a>")
    common.add_argument("--alpha", default="static:1", help="static:<a0> or rational:<a0>:<k0>")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--abs-tol", type=float, help="absolute quadrature tolerance")
    common.add_argument("--rel-tol", type=float, help="relative quadrature tolerance")
    common.add_argument("--max-evaluations", type=int, help="integrand evaluation budget")
    common.add_argument("--check-tol", type=float, help="tolerance of the pass/fail check")
    common.add_argument("--config", help="key=value file; command-line flags take precedence")
    return common


def build_parser():
    common = _common_parser()
    parser = argparse.ArgumentParser(
        prog="vacuum-selfenergy",
        description="Vacuum electric and magnetic energy densities around polarizable sources.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("profile", parents=[common], help="densities on a distance grid")
    p.add_argument("--grid", required=True, help="<min>:<max>:<points>:<linear|log>")
    p.add_argument("--gamma", help="frequency cutoff for a point source")

    p = sub.add_parser("check-global", parents=[common], help="space-integrated energy cancellation")
    p.add_argument("--eta-m", type=float, help="lower eta limit regulating a point source")
    p.add_argument("--gamma", help="frequency cutoffs for a point source")

    p = sub.add_parser("check-coefficients", parents=[common],
                       help="numerical eta integrals against the closed coefficients")
    p.add_argument("--grid", default="0.5:4:4:log", help="<min>:<max>:<points>:<linear|log>")

    p = sub.add_parser("singular", parents=[common],
                       help="cutoff-regularised global integrals and singular coefficient tables")
    p.add_argument("--gamma", help="decreasing frequency cutoffs (default 0.4,0.2,0.1,0.05)")

    p = sub.add_parser("limit", parents=[common], help="shrinking-source limit at fixed distance")
    p.add_argument("--R", type=float, default=1.0, help="distance from the source centre")
    p.add_argument("--a", required=True, help="decreasing source sizes")
    p.add_argument("--component", choices=("electric", "magnetic", "total"), default="electric")
    return parser


def read_config_file(path):
    """``key = value`` lines as command-line tokens; ``#`` starts a comment."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise InputError(f"cannot read config file {path!r}: {exc.strerror}") from None
    tokens = []
    for number, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        key = key.strip().replace("_", "-")
        if not sep or not key:
            raise InputError(f"config file {path!r} line {number}: expected key=value")
        if key == "config":
            raise InputError(f"config file {path!r} line {number}: config files do not nest")
        tokens += [f"--{key}", value.strip()]
    return tokens


def _config_path(argv):
    for token in argv:
        if token.startswith("--config="):
            return token.split("=", 1)[1]
    return None


_VALUE_FLAGS = {"--source", "--alpha", "--format", "--out", "--abs-tol", "--rel-tol",
                "--max-evaluations", "--check-tol", "--config", "--grid", "--gamma", "--eta-m",
                "--R", "--a", "--component"}


def _attach_values(argv):
    # values such as "-1:2:5:linear" would otherwise be taken for options
    out, i = [], 0
    while i < len(argv):
        token = argv[i]
        if token in _VALUE_FLAGS and i + 1 < len(argv):
            out.append(f"{token}={argv[i + 1]}")
            i += 2
        else:
            out.append(token)
            i += 1
    return out


def parse_args(argv):
    """Parse ``argv``, splicing in the config file so later flags override it."""
    parser = build_parser()
    argv = _attach_values(list(argv))
    path = _config_path(argv)
    if path is not None and argv and not argv[0].startswith("-"):
        argv = argv[:1] + _attach_values(read_config_file(path)) + argv[1:]
    return parser.parse_args(argv)


# ---------------------------------------------------------------------------
# subcommands

def _quadrature_config(args, base):
    changes = {}
    if args.abs_tol is not None:
        changes["abs_tol"] = args.abs_tol
    if args.rel_tol is not None:
        changes["rel_tol"] = args.rel_tol
    if args.max_evaluations is not None:
        changes["max_evaluations"] = args.max_evaluations
    try:
        return base.replace(**changes) if changes else base
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _tolerances(config):
    return {"abs_tol": config.abs_tol, "rel_tol": config.rel_tol,
            "max_evaluations": config.max_evaluations}


def _static_alpha0(pol, what):
    if pol.kind != "static":
        raise InputError(f"{what} needs a static polarizability")
    return pol.alpha0


def cmd_profile(args):
    ff = parse_source(args.source or "point")
    pol = parse_alpha(args.alpha)
    grid = parse_grid(args.grid)
    config = _quadrature_config(args, pointlike.DENSITY_CONFIG)
    meta = {"source": ff.describe(), "polarizability": pol.describe()}
    if ff.kind == "point":
        alpha0 = _static_alpha0(pol, "a point source")
        if args.gamma is not None:
            gamma = _single(parse_list(args.gamma), "--gamma")
            if grid[0] < 0:
                raise InputError("grid lower bound must be non-negative")
            meta["regulator"] = {"gamma": gamma}
            u = alpha0 * np.array([[pointlike.regularized_density(r, gamma, c)
                                    for c in ("electric", "magnetic")] for r in grid])
        else:
            if grid[0] <= 0:
                raise InputError("grid lower bound must be positive for point source")
            u = alpha0 * np.array([[pointlike.eta_repr_density(r, c, config)
                                    for c in ("electric", "magnetic")] for r in grid])
    else:
        if grid[0] < 0:
            raise InputError("grid lower bound must be non-negative")
        source = extsource.ExtendedSource(ff, pol)
        u = extsource.extended_profile(source, grid, config)
    meta["tolerances"] = _tolerances(config)
    r7 = grid**7
    rows = [(r, el, mag, el + mag, el * s, mag * s) for r, (el, mag), s in zip(grid, u, r7)]
    return Table(["r", "u_electric", "u_magnetic", "u_total", "u_electric_r7", "u_magnetic_r7"],
                 rows, meta)


def _single(values, flag):
    if len(values) != 1:
        raise InputError(f"{flag} takes a single value here")
    return values[0]


def cmd_check_global(args):
    ff = parse_source(args.source or "point")
    pol = parse_alpha(args.alpha)
    if ff.kind == "point":
        alpha0 = _static_alpha0(pol, "a point source")
        if args.gamma is not None:
            return _check_gamma_route(args, parse_list(args.gamma), alpha0)
        return _check_eta_m(args, alpha0)
    if args.eta_m is not None or args.gamma is not None:
        raise InputError("an extended source needs no regulator")
    source = extsource.ExtendedSource(ff, pol)
    config = _quadrature_config(args, QuadratureConfig(abs_tol=1e-13, rel_tol=1e-9))
    tol = 1e-6 if args.check_tol is None else args.check_tol
    rep = extsource.extended_global_energy(source, config=config)
    meta = {"source": ff.describe(), "polarizability": pol.describe(),
            "tolerances": _tolerances(config), "check_tolerance": tol,
            "electric_total": rep.electric_total, "magnetic_total": rep.magnetic_total,
            "total": rep.total, "relative_total": rep.relative_total,
            "electric_error": rep.electric_error, "magnetic_error": rep.magnetic_error,
            "total_error": rep.total_error}
    table = Table(["eps", "electric", "magnetic", "total"], list(rep.rows), meta)
    if not rep.converged:
        table.status = EXIT_NOT_CONVERGED
        table.diagnostics = rep.message
    else:
        table.status = EXIT_PASS if rep.passed(tol) else EXIT_FAILED
    return table


def _check_eta_m(args, alpha0):
    if args.eta_m is None:
        raise InputError("regulator must be positive: pass --eta-m or --gamma")
    if not args.eta_m > 0:
        raise InputError("regulator must be positive: eta_m > 0 (the totals diverge otherwise)")
    regulator = pointlike.CutoffParams(eta_m=args.eta_m)
    config = _quadrature_config(args, QuadratureConfig())
    tol = 1e-8 if args.check_tol is None else args.check_tol
    closed = pointlike.global_energy(regulator)
    rep = pointlike.global_energy(regulator, method="quadrature", config=config)
    err = alpha0 * rep.abs_error_estimate
    rows = [("electric_total", alpha0 * rep.electric_total, alpha0 * closed.electric_total, err),
            ("magnetic_total", alpha0 * rep.magnetic_total, alpha0 * closed.magnetic_total, err),
            ("sum_total", alpha0 * rep.sum_total, 0.0, err)]
    ok = (abs(rep.electric_total / closed.electric_total - 1) <= tol
          and abs(alpha0 * rep.sum_total) <= tol)
    meta = {"source": "point", "polarizability": f"static:{alpha0:g}",
            "regulator": {"eta_m": args.eta_m}, "tolerances": _tolerances(config),
            "check_tolerance": tol}
    return Table(["quantity", "value", "expected", "abs_error_estimate"], rows, meta,
                 EXIT_PASS if ok else EXIT_FAILED)


def _singular_rows(args, gammas, alpha0=1.0):
    for g in gammas:
        if not g > 0:
            raise InputError("regulator must be positive: every gamma must be > 0")
    rows, configs = [], []
    for g in gammas:
        config = _quadrature_config(args, pointlike.radial_config(g))
        configs.append(config)
        row = pointlike.singular_row(g, config)
        rows.append((g, alpha0 * row.electric, alpha0 * row.magnetic, alpha0 * row.total,
                     alpha0 * row.electric_gamma4, alpha0 * row.electric_expected * g**4,
                     alpha0 * row.abs_error_estimate, row.converged, row.message))
    return rows, configs


def _singular_status(rows, tol):
    if not all(row[7] for row in rows):
        return EXIT_NOT_CONVERGED
    ok = all(abs(row[3]) <= tol and abs(row[4] / row[5] - 1) <= tol for row in rows)
    return EXIT_PASS if ok else EXIT_FAILED


_SINGULAR_COLUMNS = ["gamma", "electric", "magnetic", "total", "electric_gamma4",
                     "expected_gamma4", "abs_error_estimate", "converged", "message"]


def _check_gamma_route(args, gammas, alpha0):
    if args.eta_m is not None:
        raise InputError("pass either --eta-m or --gamma, not both")
    tol = 1e-8 if args.check_tol is None else args.check_tol
    rows, configs = _singular_rows(args, gammas, alpha0)
    meta = {"source": "point", "polarizability": f"static:{alpha0:g}",
            "regulator": {"gamma": gammas}, "tolerances": _tolerances(configs[-1]),
            "check_tolerance": tol}
    table = Table(_SINGULAR_COLUMNS, rows, meta, _singular_status(rows, tol))
    table.diagnostics = _failures(rows)
    return table


def _failures(rows):
    return "; ".join(f"gamma={row[0]:g}: {row[8]}" for row in rows if not row[7])


def cmd_singular(args):
    if args.source not in (None, "point"):
        raise InputError("singular applies to the point source only")
    gammas = _DEFAULT_GAMMAS if args.gamma is None else parse_list(args.gamma)
    alpha0 = _static_alpha0(parse_alpha(args.alpha), "singular")
    tol = 1e-8 if args.check_tol is None else args.check_tol
    rows, configs = _singular_rows(args, gammas, alpha0)
    ok = [row for row in rows if row[7] and row[1] > 0]
    slope = None
    if len(ok) >= 2:
        slope = float(np.polyfit(np.log([r[0] for r in ok]), np.log([r[1] for r in ok]), 1)[0])
    tables = {}
    for name, exp in (("electric", pointlike.singular_expansion("electric")),
                      ("magnetic", pointlike.singular_expansion("magnetic")),
                      ("I", pointlike.regularized_I_expansion())):
        tables[name] = {"prefactor": exp.prefactor_label,
                        "terms": [{"delta_order": n, "inverse_power": m, "coefficient": str(c)}
                                  for n, m, c in exp.rows()]}
    meta = {"source": "point", "polarizability": f"static:{alpha0:g}",
            "tolerances": _tolerances(configs[-1]), "check_tolerance": tol,
            "gamma_slope": slope, "expected_slope": -4.0, "coefficient_tables": tables}
    table = Table(_SINGULAR_COLUMNS, rows, meta, _singular_status(rows, tol))
    table.diagnostics = _failures(rows)
    return table


def cmd_check_coefficients(args):
    if args.source not in (None, "point"):
        raise InputError("check-coefficients applies to the point source only")
    alpha0 = _static_alpha0(parse_alpha(args.alpha), "check-coefficients")
    grid = parse_grid(args.grid)
    if grid[0] <= 0:
        raise InputError("grid lower bound must be positive for point source")
    config = _quadrature_config(args, pointlike.DENSITY_CONFIG)
    tol = 1e-9 if args.check_tol is None else args.check_tol
    expected = {"electric": pointlike.ELECTRIC_COEFFICIENT,
                "magnetic": pointlike.MAGNETIC_COEFFICIENT}
    expected["total"] = expected["electric"] + expected["magnetic"]
    rows, worst = [], 0.0
    for r in grid:
        el = pointlike.eta_repr_density(r, "electric", config) * r**7
        mag = pointlike.eta_repr_density(r, "magnetic", config) * r**7
        values = {"electric": el, "magnetic": mag, "total": el + mag}
        devs = [values[c] / expected[c] - 1 for c in ("electric", "magnetic", "total")]
        worst = max(worst, *map(abs, devs))
        rows.append((r, alpha0 * el, alpha0 * mag, alpha0 * (el + mag), *devs))
    meta = {"source": "point", "polarizability": f"static:{alpha0:g}",
            "tolerances": _tolerances(config), "check_tolerance": tol,
            "electric_expected": alpha0 * expected["electric"],
            "magnetic_expected": alpha0 * expected["magnetic"],
            "total_expected": alpha0 * expected["total"], "max_relative_deviation": worst}
    return Table(["r", "electric_r7", "magnetic_r7", "total_r7", "electric_rel_dev",
                  "magnetic_rel_dev", "total_rel_dev"], rows, meta,
                 EXIT_PASS if worst <= tol else EXIT_FAILED)


def cmd_limit(args):
    kind = "gaussian" if args.source is None else args.source
    if kind not in ("gaussian", "lorentzian2"):
        raise InputError("limit takes --source gaussian or lorentzian2; sizes come from --a")
    sizes = parse_list(args.a)
    if len(sizes) < 3:
        raise InputError("need ≥ 3 sizes")
    if any(b >= a for a, b in zip(sizes, sizes[1:])):
        raise InputError("sizes must be strictly decreasing")
    pol = parse_alpha(args.alpha)
    _static_alpha0(pol, "the point-like limit")
    config = _quadrature_config(args, pointlike.DENSITY_CONFIG)
    tol = 1e-4 if args.check_tol is None else args.check_tol
    study = extsource.point_limit_study(args.R, sizes, args.component, form=kind,
                                        polarizability=pol, config=config)
    rows = [(a, v, v - study.target) for a, v in zip(study.sizes, study.values)]
    meta = {"source": kind, "polarizability": pol.describe(), "R": study.R,
            "component": study.component, "tolerances": _tolerances(config),
            "check_tolerance": tol, "limit": study.limit.value,
            "limit_error_estimate": study.limit.error_estimate, "target": study.target,
            "deviation": study.deviation, "empirical_order": study.empirical_order}
    return Table(["a", "density", "difference_from_point"], rows, meta,
                 EXIT_PASS if abs(study.deviation) <= tol else EXIT_FAILED)


COMMANDS = {
    "profile": cmd_profile,
    "check-global": cmd_check_global,
    "check-coefficients": cmd_check_coefficients,
    "singular": cmd_singular,
    "limit": cmd_limit,
}


# ---------------------------------------------------------------------------
# output

def _plain(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def _cell(value, digits=".17g"):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return format(float(value), digits)
    if value is None:
        return ""
    return str(value)


def _meta(value):
    # shortest round-trip form; the data rows keep 17 digits
    return _cell(value, "")


def _flatten(meta, prefix=""):
    for key, value in meta.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, name + ".")
        elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
            yield name, "; ".join(" ".join(f"{k}={_meta(v)}" for k, v in item.items())
                                  for item in value)
        elif isinstance(value, (list, tuple)):
            yield name, ",".join(_meta(v) for v in value)
        else:
            yield name, _meta(value)


def render_csv(table):
    out = io.StringIO()
    for key, value in _flatten(table.metadata):
        out.write(f"# {key}: {value}\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_cell(v) for v in row])
    return out.getvalue()


def render_json(table):
    rows = [dict(zip(table.columns, _plain(list(row)))) for row in table.rows]
    return json.dumps({"metadata": _plain(table.metadata), "rows": rows}, indent=2) + "\n"


def _finish(args, table):
    table.metadata = {"command": args.command, "units": pointlike.UNITS, **table.metadata,
                      "status": _STATUS_LABEL[table.status],
                      "versions": {"vacuum_selfenergy": __version__, "numpy": np.__version__,
                                   "python": platform.python_version()}}
    if table.diagnostics:
        table.metadata["diagnostics"] = table.diagnostics
    return render_json(table) if args.format == "json" else render_csv(table)


def _emit(args, text):
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _fail(status, reason):
    print(f"error: {' '.join(str(reason).split())}", file=sys.stderr)
    return status


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line; returns the exit status."""
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parse_args(argv)
        table = COMMANDS[args.command](args)
        _emit(args, _finish(args, table))
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_INPUT
    except (InputError, DomainError) as exc:
        return _fail(EXIT_INPUT, exc)
    except ConvergenceError as exc:
        return _fail(EXIT_NOT_CONVERGED, f"did not converge: {exc}")
    except ValueError as exc:
        return _fail(EXIT_INPUT, exc)
    except OSError as exc:
        return _fail(EXIT_INPUT, f"cannot write output: {exc}")
    if table.diagnostics and table.status == EXIT_NOT_CONVERGED:
        _fail(EXIT_NOT_CONVERGED, f"did not converge: {table.diagnostics}")
    return table.status


if __name__ == "__main__":
    sys.exit(main())
