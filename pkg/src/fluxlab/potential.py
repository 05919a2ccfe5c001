"""Double-well potentials on the circle.

A potential is a real, 2*pi-periodic function ``V`` with exactly two
non-degenerate zeros, at ``s = 0`` and ``s = pi``, and with the reflection
symmetry ``V(pi - s) = V(s)``.  :class:`PotentialSpec` bundles ``V`` with its
first two derivatives; :func:`validate_double_well` checks the admissibility
conditions on a grid and reports residuals instead of raising.
"""

from dataclasses import dataclass, field
import csv

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DegenerateWellError, ParameterError

__all__ = [
    "PotentialSpec",
    "Check",
    "ValidationReport",
    "builtin_potential",
    "from_function",
    "tabulated_potential",
    "load_potential_csv",
    "validate_double_well",
    "kappa",
    "taylor_at_zero",
    "BUILTINS",
]

DEFAULT_TOL = 1e-9
FD_STEP = 1e-5
FD_STEP2 = 1e-3


def _richardson_d1(f, step):
    def d1(s):
        s = np.asarray(s, dtype=float)
        coarse = (f(s + step) - f(s - step)) / (2 * step)
        fine = (f(s + step / 2) - f(s - step / 2)) / step
        return (4 * fine - coarse) / 3
    return d1


def _richardson_d2(f, step):
    def d2(s):
        s = np.asarray(s, dtype=float)
        f0 = f(s)
        coarse = (f(s + step) - 2 * f0 + f(s - step)) / step**2
        fine = (f(s + step / 2) - 2 * f0 + f(s - step / 2)) / (step / 2) ** 2
        return (4 * fine - coarse) / 3
    return d2


@dataclass(frozen=True, eq=False)
class PotentialSpec:
    """A potential ``V`` on ``[-pi, pi)`` with derivative access.

    Parameters
    ----------
    name : str
        Identifier used in reports and file names.
    eval : callable
        Vectorized map ``s -> V(s)``.
    deriv1, deriv2 : callable, optional
        Analytic first and second derivatives.  When omitted, Richardson
        extrapolated centered differences are used (steps ``fd_step`` and
        ``1e-3`` respectively).
    is_even : bool
        Whether ``V(-s) = V(s)``.
    params : tuple
        Parameters the potential was built from.
    taylor0 : tuple, optional
        Taylor coefficients ``(c2, c3, c4, c5)`` of ``V`` at ``s = 0``.
    """

    name: str
    eval: object
    deriv1: object = None
    deriv2: object = None
    is_even: bool = False
    params: tuple = ()
    taylor0: tuple = None
    fd_step: float = FD_STEP
    analytic: bool = field(default=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "analytic", self.deriv1 is not None and self.deriv2 is not None)
        if self.deriv1 is None:
            object.__setattr__(self, "deriv1", _richardson_d1(self.eval, self.fd_step))
        if self.deriv2 is None:
            object.__setattr__(self, "deriv2", _richardson_d2(self.eval, FD_STEP2))

    def __call__(self, s):
        return self.eval(np.asarray(s, dtype=float))

    def d1(self, s):
        return self.deriv1(np.asarray(s, dtype=float))

    def d2(self, s):
        return self.deriv2(np.asarray(s, dtype=float))

    @property
    def label(self):
        if not self.params:
            return self.name
        return f"{self.name}({', '.join(f'{p:g}' for p in self.params)})"


def _sin2(params):
    if params:
        raise ParameterError("sin2 takes no parameters")
    return PotentialSpec(
        "sin2",
        lambda s: np.sin(s) ** 2,
        lambda s: np.sin(2 * s),
        lambda s: 2 * np.cos(2 * s),
        is_even=True,
        taylor0=(1.0, 0.0, -1.0 / 3.0, 0.0),
    )


def _scaled_sin2(params):
    if len(params) != 1:
        raise ParameterError("scaled_sin2 takes exactly one parameter (the amplitude)")
    a = float(params[0])
    if not a > 0:
        raise ParameterError(f"scaled_sin2 amplitude must be positive, got {a}")
    return PotentialSpec(
        "scaled_sin2",
        lambda s: a * np.sin(s) ** 2,
        lambda s: a * np.sin(2 * s),
        lambda s: 2 * a * np.cos(2 * s),
        is_even=True,
        params=(a,),
        taylor0=(a, 0.0, -a / 3.0, 0.0),
    )


def _tilted_sin2(params):
    if len(params) != 1:
        raise ParameterError("tilted_sin2 takes exactly one parameter (the tilt c)")
    c = float(params[0])
    if not abs(c) < 1:
        raise ParameterError(f"tilted_sin2 needs |c| < 1 to keep the minima non-degenerate, got {c}")

    def v(s):
        sn = np.sin(s)
        return sn**2 * (1 + c * sn)

    def dv(s):
        sn, cs = np.sin(s), np.cos(s)
        return 2 * sn * cs + 3 * c * sn**2 * cs

    def d2v(s):
        sn, cs = np.sin(s), np.cos(s)
        return 2 * np.cos(2 * s) + 3 * c * (2 * sn * cs**2 - sn**3)

    return PotentialSpec(
        "tilted_sin2", v, dv, d2v,
        is_even=(c == 0.0),
        params=(c,),
        taylor0=(1.0, c, -1.0 / 3.0, -c / 2.0),
    )


BUILTINS = {"sin2": _sin2, "scaled_sin2": _scaled_sin2, "tilted_sin2": _tilted_sin2}


def builtin_potential(name, params=()):
    """Instantiate one of the built-in potentials.

    ``sin2`` is ``sin(s)**2``; ``scaled_sin2`` with ``[a]`` is ``a*sin(s)**2``;
    ``tilted_sin2`` with ``[c]``, ``|c| < 1``, is ``sin(s)**2 * (1 + c*sin(s))``,
    which keeps ``V(pi - s) = V(s)`` but breaks evenness.

    >>> float(builtin_potential("scaled_sin2", [2])(np.pi / 2))
    2.0
    """
    try:
        factory = BUILTINS[name]
    except KeyError:
        raise ParameterError(f"unknown potential {name!r}; expected one of {sorted(BUILTINS)}") from None
    return factory(tuple(params or ()))


def from_function(name, f, deriv1=None, deriv2=None, is_even=None, params=()):
    """Wrap an arbitrary vectorized callable as a :class:`PotentialSpec`.

    If ``is_even`` is None it is detected on a grid.
    """
    if is_even is None:
        s = np.linspace(0, np.pi, 1025)
        is_even = bool(np.max(np.abs(f(s) - f(-s))) <= DEFAULT_TOL)
    return PotentialSpec(name, f, deriv1, deriv2, is_even=is_even, params=tuple(params))


def tabulated_potential(s, values, name="tabulated", min_rows=4096):
    """Build a potential from samples on one period via a periodic cubic spline."""
    s = np.asarray(s, dtype=float)
    values = np.asarray(values, dtype=float)
    if s.shape != values.shape or s.ndim != 1:
        raise ParameterError("s and V samples must be 1-D arrays of equal length")
    if len(s) < min_rows:
        raise ParameterError(f"tabulated potential needs at least {min_rows} rows, got {len(s)}")
    s = np.mod(s + np.pi, 2 * np.pi) - np.pi
    order = np.argsort(s)
    s, values = s[order], values[order]
    if np.any(np.diff(s) <= 0):
        raise ParameterError("tabulated abscissae must be distinct modulo 2*pi")
    knots = np.concatenate([s, [s[0] + 2 * np.pi]])
    spline = CubicSpline(knots, np.concatenate([values, [values[0]]]), bc_type="periodic")
    d1, d2 = spline.derivative(1), spline.derivative(2)
    lo = s[0]

    def wrap(x):
        return np.mod(np.asarray(x, dtype=float) - lo, 2 * np.pi) + lo

    probe = np.linspace(0, np.pi, 1025)
    even = bool(np.max(np.abs(spline(wrap(probe)) - spline(wrap(-probe)))) <= DEFAULT_TOL)
    return PotentialSpec(
        name,
        lambda x: spline(wrap(x)),
        lambda x: d1(wrap(x)),
        lambda x: d2(wrap(x)),
        is_even=even,
    )


def load_potential_csv(path, name=None):
    """Read ``(s, V)`` rows from a CSV file (an optional header row is skipped)."""
    rows = []
    try:
        with open(path, newline="") as fh:
            for row in csv.reader(fh):
                if not row or row[0].lstrip().startswith("#"):
                    continue
                try:
                    rows.append((float(row[0]), float(row[1])))
                except (ValueError, IndexError):
                    if rows:
                        raise ParameterError(f"malformed row in {path}: {row}") from None
    except OSError as exc:
        raise ParameterError(f"cannot read potential file {path}: {exc}") from None
    if not rows:
        raise ParameterError(f"no data rows in {path}")
    data = np.array(rows)
    return tabulated_potential(data[:, 0], data[:, 1], name=name or str(path))


@dataclass(frozen=True)
class Check:
    name: str
    residual: float
    tolerance: float

    def __post_init__(self):
        object.__setattr__(self, "residual", float(self.residual))
        object.__setattr__(self, "tolerance", float(self.tolerance))

    @property
    def ok(self):
        return bool(self.residual <= self.tolerance)


@dataclass(frozen=True)
class ValidationReport:
    name: str
    checks: tuple

    @property
    def passed(self):
        return all(c.ok for c in self.checks)

    def to_dict(self):
        return {
            "potential": self.name,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "residual": c.residual, "tolerance": c.tolerance, "ok": c.ok}
                for c in self.checks
            ],
        }


def validate_double_well(spec, tol=DEFAULT_TOL, npoints=4096):
    """Check the double-well admissibility conditions on a periodic grid.

    Failures are reported in the returned :class:`ValidationReport`, never raised.
    A minimum counts as non-degenerate when ``V'' >= sqrt(tol)`` there.
    """
    if not tol > 0:
        raise ParameterError("tol must be positive")
    npoints = max(int(npoints), 1024)
    s = -np.pi + 2 * np.pi * np.arange(npoints) / npoints
    v = spec(s)
    curv_floor = np.sqrt(tol)
    c0, cpi = float(spec.d2(0.0)), float(spec.d2(np.pi))

    # strict local minima on the periodic grid
    left, right = np.roll(v, 1), np.roll(v, -1)
    n_minima = int(np.sum((v < left) & (v <= right)))

    checks = (
        Check("periodic", float(abs(spec(-np.pi) - spec(np.pi))), tol),
        Check("zero_at_0", float(abs(spec(0.0))), tol),
        Check("zero_at_pi", float(abs(spec(np.pi))), tol),
        Check("nondegenerate_0", max(0.0, curv_floor - c0), 0.0),
        Check("nondegenerate_pi", max(0.0, curv_floor - cpi), 0.0),
        Check("nonnegative", max(0.0, -float(np.min(v))), tol),
        Check("two_minima", float(abs(n_minima - 2)), 0.0),
        Check("reflection", float(np.max(np.abs(spec(np.pi - s) - v))), tol),
        Check("curvature_match", abs(c0 - cpi), max(tol, 1e-7 * abs(c0))),
    )
    return ValidationReport(spec.label, checks)


def kappa(spec, at=0.0):
    """Harmonic frequency ``sqrt(V''(at) / 2)`` of the well at ``at`` (0 or pi).

    Curvatures below ``sqrt(DEFAULT_TOL)`` count as degenerate, matching
    :func:`validate_double_well`.
    """
    c = float(spec.d2(at))
    if not c >= np.sqrt(DEFAULT_TOL):
        raise DegenerateWellError(f"V''({at:g}) = {c:g} is not positive")
    return float(np.sqrt(c / 2))


def taylor_at_zero(spec):
    """Taylor coefficients ``(c2, c3, c4, c5)`` of ``V`` at ``s = 0``.

    Uses the analytic coefficients when the potential carries them, otherwise a
    degree-9 least-squares fit on Chebyshev points in ``[-0.1, 0.1]``.
    """
    if spec.taylor0 is not None:
        return tuple(float(c) for c in spec.taylor0)
    r = 0.1
    x = r * np.cos(np.pi * (np.arange(201) + 0.5) / 201)
    poly = np.polynomial.Polynomial.fit(x, spec(x), 9, domain=[-r, r], window=[-r, r])
    c = poly.coef
    return tuple(float(c[k]) for k in range(2, 6))
