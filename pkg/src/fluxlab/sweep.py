"""Parameter sweeps over ``(h, xi0)``, decay-rate fits and gap-minimum location."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
import csv
import io
import json
import os

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .errors import ConfigError
from .interaction import CSV_COLUMNS, ROUTES, SplittingConfig, splitting_estimate
from .potential import builtin_potential, load_potential_csv

__all__ = [
    "Grid",
    "SweepConfig",
    "parse_grid",
    "parse_config",
    "load_config",
    "serialize_config",
    "make_potential",
    "run_sweep",
    "write_results",
    "read_results",
    "DecayFit",
    "fit_decay",
    "Crossing",
    "CrossingReport",
    "crossings",
]

QUAD_TOL_ENV = "FLUXLAB_QUAD_TOL"


@dataclass(frozen=True)
class Grid:
    """A sweep axis: explicit ``values`` or a ``(lo, hi, count, log)`` range."""

    values: tuple = None
    lo: float = None
    hi: float = None
    count: int = None
    log: bool = False

    def points(self):
        if self.values is not None:
            return np.array(self.values, dtype=float)
        if self.log:
            return np.geomspace(self.lo, self.hi, self.count)
        return np.linspace(self.lo, self.hi, self.count)

    def to_text(self):
        if self.values is not None:
            return "[" + ", ".join(repr(float(v)) for v in self.values) + "]"
        tail = ":log" if self.log else ""
        return f'"{self.lo!r}:{self.hi!r}:{self.count}{tail}"'


def parse_grid(text):
    """Parse ``"min:max:count[:log]"``, a single number, a comma list or a list.

    >>> parse_grid("0.1:0.2:3").points().tolist()
    [0.1, 0.15000000000000002, 0.2]
    """
    if isinstance(text, Grid):
        return text
    if isinstance(text, (int, float)):
        return Grid(values=(float(text),))
    if isinstance(text, (list, tuple)):
        try:
            return Grid(values=tuple(float(v) for v in text))
        except (TypeError, ValueError):
            raise ConfigError(f"grid list must be numeric: {text!r}") from None
    text = str(text).strip()
    try:
        if ":" in text:
            parts = text.split(":")
            if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] not in ("log", "lin")):
                raise ValueError
            lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
            if count < 1 or (count > 1 and not hi >= lo):
                raise ValueError
            return Grid(lo=lo, hi=hi, count=count, log=len(parts) == 4 and parts[3] == "log")
        return Grid(values=tuple(float(v) for v in text.strip("[]").split(",") if v.strip()))
    except ValueError:
        raise ConfigError(f"malformed grid {text!r}; expected min:max:count[:log]") from None


@dataclass(frozen=True)
class SweepConfig:
    """Flat sweep configuration.

    ``potential`` names a built-in (with ``params``) or, when
    ``potential_csv`` is set, a tabulated file.
    """

    potential: str = "sin2"
    params: tuple = ()
    potential_csv: str = None
    h_grid: Grid = field(default_factory=lambda: Grid(values=(0.1,)))
    xi0_grid: Grid = field(default_factory=lambda: Grid(values=(0.0,)))
    routes: tuple = ROUTES
    K: int = None
    n: int = 4096
    eta: float = 0.3
    quad_tol: float = 1e-12
    profile: str = "exp_bump"
    jobs: int = 1
    out: str = None
    format: str = "csv"

    def __post_init__(self):
        h = self.h_grid.points()
        xi = self.xi0_grid.points()
        if h.size == 0 or xi.size == 0:
            raise ConfigError("h and xi0 grids must be nonempty")
        if np.any((h <= 0) | (h >= 1)):
            raise ConfigError("h values must lie in (0, 1)")
        if not self.routes or any(r not in ROUTES for r in self.routes):
            raise ConfigError(f"routes must be a nonempty subset of {ROUTES}")
        if self.format not in ("csv", "json"):
            raise ConfigError("format must be csv or json")
        if not 0 < self.eta < np.pi / 4:
            raise ConfigError("eta must lie in (0, pi/4)")
        if self.n < 512:
            raise ConfigError("n must be at least 512")
        if not self.quad_tol > 0:
            raise ConfigError("quad_tol must be positive")
        if int(self.jobs) < 1:
            raise ConfigError("jobs must be at least 1")

    def solver(self):
        return SplittingConfig(routes=self.routes, K=self.K, n=self.n, eta=self.eta,
                               quad_tol=self.quad_tol, profile=self.profile)


_KEYS = {f.name for f in fields(SweepConfig)}


def _coerce(key, value):
    try:
        if key in ("h_grid", "xi0_grid"):
            return parse_grid(value)
        if key == "params":
            if isinstance(value, str):
                value = [v for v in value.split(",") if v.strip()]
            if isinstance(value, (int, float)):
                value = [value]
            return tuple(float(v) for v in value)
        if key == "routes":
            if isinstance(value, str):
                value = [v.strip() for v in value.split(",") if v.strip()]
            return tuple(value)
        if key in ("K", "n", "jobs"):
            return None if value is None else int(value)
        if key in ("eta", "quad_tol"):
            return float(value)
        return None if value is None else str(value)
    except (TypeError, ValueError):
        raise ConfigError(f"bad value for {key}: {value!r}") from None


def parse_config(text=None, overrides=None, env=None):
    """Build a :class:`SweepConfig` from flat TOML text and overrides.

    Precedence, lowest first: defaults, the text, the ``FLUXLAB_QUAD_TOL``
    environment variable, explicit ``overrides`` (CLI flags).  ``None``
    override values are ignored.
    """
    values = {}
    if text:
        try:
            raw = tomllib.loads(text)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f"config is not valid TOML: {exc}") from None
        for key, value in raw.items():
            if key not in _KEYS:
                raise ConfigError(f"unknown config key {key!r}")
            if isinstance(value, dict):
                raise ConfigError(f"config must be flat; {key!r} is a table")
            values[key] = _coerce(key, value)
    env = os.environ if env is None else env
    if env.get(QUAD_TOL_ENV):
        values["quad_tol"] = _coerce("quad_tol", env[QUAD_TOL_ENV])
    for key, value in (overrides or {}).items():
        if value is None:
            continue
        if key not in _KEYS:
            raise ConfigError(f"unknown config key {key!r}")
        values[key] = _coerce(key, value)
    try:
        return SweepConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None


def load_config(path, overrides=None, env=None):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text, overrides, env)


def serialize_config(config):
    """Flat TOML text that :func:`parse_config` maps back to ``config``."""
    lines = []
    for f in fields(SweepConfig):
        v = getattr(config, f.name)
        if v is None:
            continue
        if isinstance(v, Grid):
            text = v.to_text()
        elif f.name == "params":
            text = "[" + ", ".join(repr(float(p)) for p in v) + "]"
        elif f.name == "routes":
            text = "[" + ", ".join(f'"{r}"' for r in v) + "]"
        elif isinstance(v, str):
            text = json.dumps(v)
        else:
            text = repr(v)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def make_potential(config):
    if config.potential_csv:
        return load_potential_csv(config.potential_csv)
    return builtin_potential(config.potential, config.params)


def _sweep_one_h(args):
    config, h, xis = args
    spec = make_potential(config)
    solver = config.solver()
    return [splitting_estimate(spec, h, xi, solver) for xi in xis]


def run_sweep(config):
    """Evaluate every ``(h, xi0)`` grid point; rows sorted by ``h`` then ``xi0``.

    Work is split into one task per ``h`` so each one-well state is solved
    once; ``config.jobs > 1`` distributes the tasks over worker processes.
    """
    hs = sorted(set(config.h_grid.points().tolist()))
    xis = sorted(set(config.xi0_grid.points().tolist()))
    tasks = [(config, h, xis) for h in hs]
    if config.jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            chunks = list(pool.map(_sweep_one_h, tasks))
    else:
        chunks = [_sweep_one_h(t) for t in tasks]
    rows = [r for chunk in chunks for r in chunk]
    return sorted(rows, key=lambda r: (r.h, r.xi0))


def write_results(rows, fmt="csv", path=None):
    """Serialize rows as CSV (fixed column set, 17 significant digits) or JSON."""
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in rows:
            w.writerow(r.csv_row())
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps([_json_row(r) for r in rows], indent=1) + "\n"
    else:
        raise ConfigError("format must be csv or json")
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    return text


def _json_row(r):
    d = r.to_dict()
    return {k: (None if isinstance(v, float) and not np.isfinite(v) else v) for k, v in d.items()}


def read_results(path_or_text):
    """Read a sweep CSV into a dict of column arrays (``flags`` stays text)."""
    if "\n" in str(path_or_text):
        fh = io.StringIO(path_or_text)
    else:
        try:
            fh = open(path_or_text, newline="")
        except OSError as exc:
            raise ConfigError(f"cannot read {path_or_text}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        rows = list(reader)
    if not rows:
        raise ConfigError("no rows in sweep CSV")
    missing = set(CSV_COLUMNS) - set(rows[0])
    if missing:
        raise ConfigError(f"sweep CSV lacks columns {sorted(missing)}")
    out = {k: np.array([float(r[k]) for r in rows]) for k in CSV_COLUMNS if k != "flags"}
    out["flags"] = [r["flags"] for r in rows]
    return out


# ---------------------------------------------------------------------------
# analysis


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    r2: float
    npoints: int
    prefactor_power: float

    def to_dict(self):
        return {"slope": self.slope, "intercept": self.intercept, "r2": self.r2,
                "npoints": self.npoints, "prefactor_power": self.prefactor_power}


def fit_decay(h, log_gap, prefactor_power=0.5):
    """Least-squares fit ``log gap - p log h = intercept + slope / h``.

    ``log_gap`` holds natural logarithms; non-finite entries are skipped.
    With ``p = 1/2`` the known ``sqrt(h)`` prefactor is removed before the
    fit; ``p = 0`` regresses the raw ``log gap``.
    """
    h = np.asarray(h, dtype=float)
    y = np.asarray(log_gap, dtype=float) - prefactor_power * np.log(h)
    ok = np.isfinite(y) & np.isfinite(h)
    if np.count_nonzero(ok) < 2 or np.unique(h[ok]).size < 2:
        raise ConfigError("need at least two distinct h values with finite gaps")
    x = 1.0 / h[ok]
    y = y[ok]
    slope, intercept = np.polyfit(x, y, 1)
    pred = intercept + slope * x
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum((y - pred) ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(slope), float(intercept), r2, int(ok.sum()), float(prefactor_power))


def route_log_gap(table, route):
    """Natural log of the gap column of ``route`` in a table from :func:`read_results`."""
    if route == "leading":
        return table["log10_gap_leading"] * np.log(10.0)
    key = {"direct": "gap_direct", "wronskian": "gap_wronskian"}.get(route)
    if key is None:
        raise ConfigError(f"unknown route {route!r}")
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.log(table[key])


@dataclass(frozen=True)
class Crossing:
    xi0: float
    depth: float
    route: str
    below_floor: bool = False


@dataclass(frozen=True)
class CrossingReport:
    """Analytic zeros ``(k + 1/2) h`` of the leading gap and measured minima."""

    h: float
    analytic: tuple
    minima: tuple

    def to_dict(self):
        return {"h": self.h, "analytic": list(self.analytic),
                "minima": [vars(m) for m in self.minima]}


def _parabolic_min(x, y, i):
    """Vertex of the parabola through ``(x, y)[i-1:i+2]``, clamped to the bracket."""
    x0, x1, x2 = x[i - 1:i + 2]
    y0, y1, y2 = y[i - 1:i + 2]
    den = (x0 - x1) * (x0 - x2) * (x1 - x2)
    a = (x2 * (y1 - y0) + x1 * (y0 - y2) + x0 * (y2 - y1)) / den
    b = (x2**2 * (y0 - y1) + x1**2 * (y2 - y0) + x0**2 * (y1 - y2)) / den
    if not a > 0:
        return float(x1)
    return float(np.clip(-b / (2 * a), x0, x2))


def crossings(xi0, gaps, h, log_leading=None, routes=("direct", "wronskian"), significance=0.9):
    """Locate the gap minima of a flux sweep at fixed ``h``.

    Parameters
    ----------
    xi0 : array
        Flux values of the sweep.
    gaps : dict
        ``route -> gap array``; NaN marks a below-floor direct gap, which is
        treated as the deepest possible value.
    log_leading : array, optional
        Natural log of the leading-order gap; analytic zeros ``(k + 1/2) h``
        are reported only when this dips by three orders of magnitude.
    significance : float
        A local minimum counts when it lies below ``significance`` times the
        median gap.
    """
    order = np.argsort(xi0)
    x = np.asarray(xi0, dtype=float)[order]
    analytic = ()
    if log_leading is not None:
        ll = np.asarray(log_leading, dtype=float)[order]
        finite = ll[np.isfinite(ll)]
        dips = finite.size == 0 or np.any(~np.isfinite(ll)) or np.min(finite) - np.max(finite) <= np.log(1e-3)
        if dips:
            k0 = int(np.ceil(x[0] / h - 0.5))
            k1 = int(np.floor(x[-1] / h - 0.5))
            analytic = tuple(float((k + 0.5) * h) for k in range(k0, k1 + 1))
    minima = []
    for route in routes:
        if route not in gaps:
            continue
        g = np.asarray(gaps[route], dtype=float)[order]
        floor = np.isnan(g)
        if np.all(floor):
            continue
        with np.errstate(divide="ignore"):
            lg = np.where(floor, -np.inf, np.log(np.where(g > 0, g, 0.0)))
        med = np.median(np.where(floor, 0.0, g))
        i = 1
        while i < len(x) - 1:
            j = i
            while j + 1 < len(x) and lg[j + 1] == lg[i]:
                j += 1  # run of equal values, e.g. consecutive below-floor points
            if j < len(x) - 1 and lg[i - 1] > lg[i] and lg[j + 1] > lg[i]:
                c = (i + j) // 2
                gi = 0.0 if floor[c] else g[c]
                if gi < significance * med:
                    if i == j and np.all(np.isfinite(lg[i - 1:i + 2])):
                        pos = _parabolic_min(x, lg, i)
                    else:
                        pos = float(0.5 * (x[i] + x[j]))
                    depth = gi / np.nanmax(g)
                    minima.append(Crossing(pos, float(depth), route, bool(floor[c])))
            i = j + 1
    return CrossingReport(float(h), analytic, tuple(minima))
