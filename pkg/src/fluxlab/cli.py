"""Command-line front end for tunneling-gap computations on the circle.

Exit codes: 0 success, 2 validation failure, 3 precision failure,
4 configuration error.
"""

import argparse
import json
import sys

import numpy as np

from .agmon import agmon_constants
from .errors import (
    ConfigError,
    DegenerateWellError,
    ParameterError,
    PrecisionError,
    QuadratureError,
    RefinementError,
    ValidationError,
)
from .potential import validate_double_well
from .spectral import circle_gap, richardson_ground_energy
from .sweep import (
    crossings,
    fit_decay,
    load_config,
    make_potential,
    parse_config,
    read_results,
    route_log_gap,
    run_sweep,
    write_results,
)
from .wkb import wkb_residual, wkb_vs_numeric

EXIT_OK, EXIT_VALIDATION, EXIT_PRECISION, EXIT_CONFIG = 0, 2, 3, 4


def _emit(obj, path=None):
    text = json.dumps(obj, indent=2, default=_json_default) + "\n"
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, (np.floating, np.integer, np.bool_)):
        return o.item()
    raise TypeError(f"cannot serialize {type(o).__name__}")


def _config(args):
    overrides = {
        "potential": args.potential,
        "params": args.params,
        "potential_csv": args.potential_csv,
        "h_grid": args.h_grid if args.h_grid is not None else args.h,
        "xi0_grid": args.xi0_grid if args.xi0_grid is not None else args.xi0,
        "routes": args.routes,
        "K": args.K,
        "n": args.n,
        "eta": args.eta,
        "quad_tol": args.quad_tol,
        "jobs": args.jobs,
        "out": args.out,
        "format": args.format,
    }
    if args.config:
        return load_config(args.config, overrides)
    return parse_config(None, overrides)


def _single(grid, name):
    pts = grid.points()
    if pts.size != 1:
        raise ConfigError(f"{name} must be a single value for this command")
    return float(pts[0])


def cmd_validate(args):
    cfg = _config(args)
    report = validate_double_well(make_potential(cfg))
    _emit(report.to_dict(), cfg.out)
    return EXIT_OK if report.passed else EXIT_VALIDATION


def _validated_potential(cfg):
    spec = make_potential(cfg)
    report = validate_double_well(spec)
    if not report.passed:
        raise ValidationError(report)
    return spec


def cmd_constants(args):
    cfg = _config(args)
    const = agmon_constants(_validated_potential(cfg), cfg.quad_tol)
    _emit(const.to_dict(), cfg.out)
    return EXIT_OK


def cmd_spectrum(args):
    cfg = _config(args)
    spec = _validated_potential(cfg)
    h = _single(cfg.h_grid, "h")
    xi0 = _single(cfg.xi0_grid, "xi0")
    cg = circle_gap(spec, h, xi0, cfg.K)
    out = {
        "h": h, "xi0": xi0, "K": cg.K,
        "lambda1": cg.lambda1, "lambda2": cg.lambda2, "lambda3": cg.lambda3,
        "gap": None if cg.below_floor else cg.gap,
        "below_floor": cg.below_floor, "norm": cg.norm,
        "dirichlet_ground": richardson_ground_energy(spec, h, cfg.eta, cfg.n),
    }
    _emit(out, cfg.out)
    return EXIT_OK


def cmd_sweep(args):
    cfg = _config(args)
    _validated_potential(cfg)
    rows = run_sweep(cfg)
    text = write_results(rows, cfg.format, cfg.out)
    if not cfg.out:
        sys.stdout.write(text)
    return EXIT_OK


def _filter_xi0(table, xi0):
    mask = np.abs(table["xi0"] - xi0) <= 1e-12 * max(1.0, abs(xi0))
    if not np.any(mask):
        raise ConfigError(f"no rows with xi0 = {xi0:g}")
    return {k: (np.asarray(v)[mask] if k != "flags" else [f for f, m in zip(v, mask) if m])
            for k, v in table.items()}


def cmd_fit_decay(args):
    table = _filter_xi0(read_results(args.csv_in), args.xi0 if args.xi0 is not None else 0.0)
    out = {}
    for route in args.routes.split(",") if args.routes else ("direct", "wronskian", "leading"):
        lg = route_log_gap(table, route)
        if not np.any(np.isfinite(lg)):
            continue
        out[route] = fit_decay(table["h"], lg, args.prefactor_power).to_dict()
    if not out:
        raise PrecisionError("no finite gaps to fit")
    _emit(out, args.out)
    return EXIT_OK


def cmd_crossings(args):
    table = read_results(args.csv_in)
    hs = np.unique(table["h"])
    if args.h is None:
        if hs.size != 1:
            raise ConfigError("CSV holds several h values; pass --h")
        h = float(hs[0])
    else:
        h = float(args.h)
    mask = np.abs(table["h"] - h) <= 1e-12 * h
    if not np.any(mask):
        raise ConfigError(f"no rows with h = {h:g}")
    gaps = {"direct": table["gap_direct"][mask], "wronskian": table["gap_wronskian"][mask]}
    gaps = {k: v for k, v in gaps.items() if not np.all(np.isnan(v))
            or (k == "direct" and any("below_floor" in f for f, m in zip(table["flags"], mask) if m))}
    rep = crossings(table["xi0"][mask], gaps, h, table["log10_gap_leading"][mask] * np.log(10.0))
    _emit(rep.to_dict(), args.out)
    return EXIT_OK


def cmd_wkb_compare(args):
    cfg = _config(args)
    spec = _validated_potential(cfg)
    compact = tuple(float(v) for v in args.compact.split(":"))
    out = []
    for h in cfg.h_grid.points():
        c = wkb_vs_numeric(spec, float(h), compact, cfg.eta)
        out.append({"h": float(h), "residual": wkb_residual(spec, float(h), K_compact=compact),
                    "err_value": c.err_value, "err_deriv": c.err_deriv, "err_at_zero": c.err_at_zero})
    _emit(out, cfg.out)
    return EXIT_OK


def _add_common(p):
    p.add_argument("--config", help="flat TOML config file; flags override it")
    p.add_argument("--potential", help="built-in potential: sin2, scaled_sin2, tilted_sin2")
    p.add_argument("--params", help="comma-separated potential parameters")
    p.add_argument("--potential-csv", dest="potential_csv", help="tabulated potential (s, V) CSV")
    p.add_argument("--h", help="single h value")
    p.add_argument("--xi0", help="single xi0 value")
    p.add_argument("--h-grid", dest="h_grid", help="min:max:count[:log] or a comma list")
    p.add_argument("--xi0-grid", dest="xi0_grid", help="min:max:count[:log] or a comma list")
    p.add_argument("--routes", help="comma-separated subset of direct,wronskian,leading")
    p.add_argument("--K", type=int, help="Fourier truncation (modes -K..K)")
    p.add_argument("--n", type=int, help="Dirichlet grid points")
    p.add_argument("--eta", type=float, help="cut-off width")
    p.add_argument("--quad-tol", dest="quad_tol", type=float, help="quadrature tolerance")
    p.add_argument("--jobs", type=int, help="worker processes for sweeps")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("csv", "json"))


def build_parser():
    parser = argparse.ArgumentParser(prog="fluxlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, helptext in (
        ("validate", cmd_validate, "check the double-well assumptions"),
        ("constants", cmd_constants, "Agmon actions and amplitude constants as JSON"),
        ("spectrum", cmd_spectrum, "lowest circle eigenvalues at one (h, xi0)"),
        ("sweep", cmd_sweep, "gap routes over an (h, xi0) grid"),
        ("wkb-compare", cmd_wkb_compare, "WKB residual and errors against the numeric state"),
    ):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        if name == "wkb-compare":
            p.add_argument("--compact", default="-1.5:1.5", help="comparison interval a:b")
        p.set_defaults(func=func)
    p = sub.add_parser("fit-decay", help="regress log gap against 1/h")
    p.add_argument("csv_in")
    p.add_argument("--routes")
    p.add_argument("--xi0", type=float)
    p.add_argument("--prefactor-power", dest="prefactor_power", type=float, default=0.5,
                   help="power p of h removed before the fit (0 for the raw log gap)")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fit_decay)
    p = sub.add_parser("crossings", help="locate gap minima of a flux sweep")
    p.add_argument("csv_in")
    p.add_argument("--h", type=float)
    p.add_argument("--out")
    p.set_defaults(func=cmd_crossings)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, DegenerateWellError) as exc:
        print(f"fluxlab: validation failed: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (PrecisionError, QuadratureError, RefinementError) as exc:
        print(f"fluxlab: precision failure: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    except (ConfigError, ParameterError) as exc:
        print(f"fluxlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
