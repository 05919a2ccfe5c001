"""Agmon distances, amplitude constants and the leading tunneling interaction.

All quantities that are exponentially small in ``1/h`` are carried as
``(log|z|, arg z)`` pairs and only turned into floats at the reporting
boundary, so ``e^{-S/h}`` never underflows before it has to.
"""

from dataclasses import dataclass, asdict
import json
import warnings

import numpy as np
from scipy import integrate

from ._numerics import cumulative_gauss, flux_phase, from_log, log_sum
from .errors import ParameterError, QuadratureError
from .potential import kappa as _kappa, taylor_at_zero

__all__ = [
    "AgmonConstants",
    "GapPrediction",
    "phase_profile",
    "phase_derivative",
    "amplitude_integrand",
    "amplitude_log_integral",
    "agmon_constants",
    "leading_interaction",
    "predicted_gap_even",
]

SPLIT_DELTA = 1e-3
DEFAULT_QUAD_TOL = 1e-12


def _sqrt_v(spec, s):
    return np.sqrt(np.maximum(spec(s), 0.0))


def phase_profile(spec, s, well="right"):
    """Agmon distance from the well at 0 (``right``) or at pi (``left``).

    ``Phi_r(s) = |int_0^s sqrt(V)|`` for ``s`` in ``[-pi, pi]`` and
    ``Phi_l(s) = |int_pi^s sqrt(V)|`` for ``s`` in ``[0, 2*pi]``.
    Scalars in, scalar out; arrays in, array out.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if well == "right":
        lo, hi, origin = -np.pi, np.pi, 0.0
    elif well == "left":
        lo, hi, origin = 0.0, 2 * np.pi, np.pi
    else:
        raise ParameterError(f"well must be 'right' or 'left', got {well!r}")
    if np.any((s < lo) | (s > hi)):
        raise ParameterError(f"s outside [{lo:g}, {hi:g}] for the {well} well")
    out = np.abs(cumulative_gauss(lambda x: _sqrt_v(spec, x), s, origin))
    return float(out[0]) if scalar else out


def phase_derivative(spec, s):
    """``Phi_r'(s) = sign(s) sqrt(V(s))``, smooth through the well."""
    s = np.asarray(s, dtype=float)
    return np.sign(s) * _sqrt_v(spec, s)


def _g_taylor(spec):
    """Taylor coefficients ``(g0, g1, g2)`` at 0 of ``G = (Phi_r'' - kappa) / Phi_r'``."""
    c2, c3, c4, c5 = taylor_at_zero(spec)
    p1, p2, p3 = c3 / c2, c4 / c2, c5 / c2
    q1 = p1 / 2
    q2 = p2 / 2 - p1**2 / 8
    q3 = p3 / 2 - p1 * p2 / 4 + p1**3 / 16
    return 2 * q1, 3 * q2 - 2 * q1**2, 4 * q3 - 5 * q1 * q2 + 2 * q1**3


def amplitude_integrand(spec, s, kap=None):
    """``G(s) = (Phi_r''(s) - kappa) / Phi_r'(s)``.

    On ``s > 0`` this is ``(d sqrt(V) - kappa) / sqrt(V)``, on ``s < 0`` it is
    ``(d sqrt(V) + kappa) / sqrt(V)``; the singularity at 0 is removable and is
    filled with the Taylor value for ``|s| < 1e-6``.
    """
    kap = _kappa(spec) if kap is None else kap
    s = np.asarray(s, dtype=float)
    v = spec(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        g = spec.d1(s) / (2 * v) - np.sign(s) * kap / np.sqrt(v)
    near = np.abs(s) < 1e-6
    if np.any(near):
        g0, g1, g2 = _g_taylor(spec)
        g = np.where(near, g0 + g1 * s + g2 * s**2, g)
    return g


def amplitude_integrand_derivative(spec, s, kap=None):
    """``G'(s)``, using the Taylor form for ``|s| < 1e-3`` where the direct one cancels."""
    kap = _kappa(spec) if kap is None else kap
    s = np.asarray(s, dtype=float)
    v, dv, d2v = spec(s), spec.d1(s), spec.d2(s)
    with np.errstate(divide="ignore", invalid="ignore"):
        gp = d2v / (2 * v) - dv**2 / (2 * v**2) + np.sign(s) * kap * dv / (2 * v**1.5)
    g0, g1, g2 = _g_taylor(spec)
    return np.where(np.abs(s) < SPLIT_DELTA, g1 + 2 * g2 * s, gp)


def _taylor_integral(coeffs, a, b):
    g0, g1, g2 = coeffs
    return g0 * (b - a) + g1 * (b**2 - a**2) / 2 + g2 * (b**3 - a**3) / 3


def amplitude_log_integral(spec, s, delta=SPLIT_DELTA):
    """``int_0^s G`` for array ``s`` in ``(-pi, pi)`` (fixed composite Gauss-Legendre)."""
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(np.abs(s) >= np.pi):
        raise ParameterError("amplitude integral defined only on (-pi, pi)")
    kap = _kappa(spec)
    coeffs = _g_taylor(spec)
    inner = np.clip(s, -delta, delta)
    out = _taylor_integral(coeffs, 0.0, inner)
    outer = np.abs(s) > delta
    if np.any(outer):
        f = lambda x: amplitude_integrand(spec, x, kap)
        for sign in (1.0, -1.0):
            m = outer & (np.sign(s) == sign)
            if np.any(m):
                out[m] += cumulative_gauss(f, s[m], sign * delta)
    return float(out[0]) if scalar else out


def _quad(f, a, b, quad_tol, points=None):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err = integrate.quad(f, a, b, epsabs=1e-300, epsrel=quad_tol, limit=200, points=points)
    if err > quad_tol * max(abs(val), 1e-300) and err > 1e-15:
        raise QuadratureError(f"quadrature on [{a:g}, {b:g}] did not converge", achieved=err / abs(val))
    return val


def _interior_zeros(spec, a, b, npoints=4096):
    x = np.linspace(a, b, npoints)[1:-1]
    v = spec(x)
    scale = np.max(np.abs(v)) or 1.0
    idx = np.where((v < 1e-8 * scale) & (v <= np.roll(v, 1)) & (v <= np.roll(v, -1)))[0]
    return [float(x[i]) for i in idx] or None


@dataclass(frozen=True)
class AgmonConstants:
    """Every scalar entering the leading splitting formula."""

    kappa: float
    S_u: float
    S_d: float
    S: float
    A_u: float
    A_d: float
    V_half_up: float
    V_half_down: float
    is_even: bool = False

    FIELDS = ("kappa", "S_u", "S_d", "S", "A_u", "A_d", "V_half_up", "V_half_down")

    def to_dict(self):
        d = asdict(self)
        return {k: d[k] for k in self.FIELDS}

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)

    @classmethod
    def from_dict(cls, d, is_even=False):
        return cls(*(float(d[k]) for k in cls.FIELDS), is_even=is_even)


def agmon_constants(spec, quad_tol=DEFAULT_QUAD_TOL):
    """Agmon actions ``S_u, S_d`` and amplitude constants ``A_u, A_d`` of ``spec``.

    The actions integrate ``sqrt(V)`` over the upper and lower half circle,
    split at any interior zero of ``V``.  The amplitude integrals are split at
    ``delta = 1e-3``: ``[0, delta]`` uses the exact integral of the quadratic
    Taylor polynomial of the integrand, the rest adaptive Gauss-Kronrod.
    """
    if not quad_tol > 0:
        raise ParameterError("quad_tol must be positive")
    kap = _kappa(spec)
    sq = lambda x: float(np.sqrt(max(spec(x), 0.0)))
    s_u = _quad(sq, 0.0, np.pi, quad_tol, _interior_zeros(spec, 0.0, np.pi))
    s_d = _quad(sq, -np.pi, 0.0, quad_tol, _interior_zeros(spec, -np.pi, 0.0))

    coeffs = _g_taylor(spec)
    g = lambda x: float(amplitude_integrand(spec, x, kap))
    d = SPLIT_DELTA
    i_u = _taylor_integral(coeffs, 0.0, d) + _quad(g, d, np.pi / 2, quad_tol)
    i_d = _quad(g, -np.pi / 2, -d, quad_tol) + _taylor_integral(coeffs, -d, 0.0)

    return AgmonConstants(
        kappa=kap,
        S_u=s_u,
        S_d=s_d,
        S=min(s_u, s_d),
        A_u=float(np.exp(-i_u)),
        A_d=float(np.exp(i_d)),
        V_half_up=float(spec(np.pi / 2)),
        V_half_down=float(spec(-np.pi / 2)),
        is_even=bool(spec.is_even),
    )


@dataclass(frozen=True)
class GapPrediction:
    """Leading interaction ``w0(h)`` with its two path contributions in log form."""

    h: float
    xi0: float
    S: float
    log_up: float
    phase_up: float
    log_down: float
    phase_down: float

    @property
    def log_abs_w0(self):
        return log_sum([(self.log_up, self.phase_up), (self.log_down, self.phase_down)])[0]

    @property
    def phase_w0(self):
        return log_sum([(self.log_up, self.phase_up), (self.log_down, self.phase_down)])[1]

    @property
    def w0(self):
        return from_log(*log_sum([(self.log_up, self.phase_up), (self.log_down, self.phase_down)]))

    @property
    def w_up(self):
        return from_log(self.log_up, self.phase_up)

    @property
    def w_down(self):
        return from_log(self.log_down, self.phase_down)

    @property
    def log_gap_leading(self):
        return np.log(2.0) + self.log_abs_w0

    @property
    def gap_leading(self):
        return float(np.exp(self.log_gap_leading))

    @property
    def log_remainder_scale(self):
        return 1.5 * np.log(self.h) - self.S / self.h

    @property
    def remainder_scale(self):
        """``h^{3/2} e^{-S/h}``: size of the error band, constant unknown."""
        return float(np.exp(self.log_remainder_scale))


def _check_h(h):
    if not 0 < h < 1:
        raise ParameterError(f"h must lie in (0, 1), got {h}")


def leading_interaction(const, h, xi0):
    """Leading interaction coefficient ``w0(h)``.

    ``w0 = 2 sqrt(h) sqrt(kappa/pi) (A_u sqrt(V(pi/2)) e^{(i xi0 pi - S_u)/h}
    + A_d sqrt(V(-pi/2)) e^{(-i xi0 pi - S_d)/h})``.
    """
    _check_h(h)
    pref = np.log(2.0) + 0.5 * np.log(h) + 0.5 * np.log(const.kappa / np.pi)
    phase = flux_phase(xi0, h)
    return GapPrediction(
        h=h,
        xi0=xi0,
        S=const.S,
        log_up=pref + np.log(const.A_u) + 0.5 * np.log(const.V_half_up) - const.S_u / h,
        phase_up=phase,
        log_down=pref + np.log(const.A_d) + 0.5 * np.log(const.V_half_down) - const.S_d / h,
        phase_down=-phase,
    )


def predicted_gap_even(const, h, xi0):
    """Closed-form leading gap for an even potential.

    ``8 sqrt(h) A sqrt(V(pi/2)) sqrt(kappa/pi) |cos(xi0 pi / h)| e^{-S/h}``
    """
    if not const.is_even:
        raise ParameterError("predicted_gap_even requires an even potential")
    _check_h(h)
    c = abs(np.cos(flux_phase(xi0, h)))
    if c == 0:
        return 0.0
    log_gap = (np.log(8.0) + 0.5 * np.log(h) + np.log(const.A_u) + 0.5 * np.log(const.V_half_up)
               + 0.5 * np.log(const.kappa / np.pi) + np.log(c) - const.S / h)
    return float(np.exp(log_gap))
