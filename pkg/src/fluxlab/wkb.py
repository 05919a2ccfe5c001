"""Leading-order WKB quasimode of the well at ``s = 0``.

``psi(s) = chi_r(s) h^{-1/4} e^{-Phi(s)/h} a0(s)`` where ``Phi`` is the Agmon
distance to the well and ``a0`` solves the transport equation
``Phi' a0' + (Phi' a0)' = kappa a0`` with ``a0(0) = (kappa/pi)^{1/4}``.
Writing ``G = (Phi'' - kappa) / Phi'``, the amplitude is
``a0 = (kappa/pi)^{1/4} exp(-1/2 int_0^s G)``.
"""

from dataclasses import dataclass
import csv

import numpy as np

from ._numerics import composite_gauss
from .agmon import (
    amplitude_integrand,
    amplitude_integrand_derivative,
    amplitude_log_integral,
    phase_derivative,
    phase_profile,
)
from .cutoff import CutoffSpec, build_cutoff
from .errors import ParameterError, PrecisionError
from .potential import kappa as _kappa
from .spectral import DEFAULT_ETA, one_well_state

__all__ = [
    "WkbQuasimode",
    "transport_amplitude",
    "build_quasimode",
    "wkb_residual",
    "wkb_vs_numeric",
    "WkbComparison",
    "export_quasimode_csv",
]


def transport_amplitude(spec, s):
    """``a0(s) = (kappa/pi)^{1/4} exp(-1/2 int_0^s G)`` for ``s`` in ``(-pi, pi)``.

    >>> from fluxlab.potential import builtin_potential
    >>> round(float(transport_amplitude(builtin_potential("sin2"), 0.0)), 8)
    0.75112554
    """
    kap = _kappa(spec)
    return (kap / np.pi) ** 0.25 * np.exp(-0.5 * amplitude_log_integral(spec, s))


def _phase_second(spec, s):
    """``Phi''(s)``: ``sign(s) V' / (2 sqrt V)``, equal to ``kappa + G Phi'``."""
    s = np.asarray(s, dtype=float)
    kap = _kappa(spec)
    return kap + amplitude_integrand(spec, s, kap) * phase_derivative(spec, s)


@dataclass(frozen=True)
class WkbQuasimode:
    """Truncated (``j = 0``) WKB quasimode of the right well."""

    spec: object
    h: float
    cutoff: CutoffSpec
    kappa: float

    @property
    def mu(self):
        """Quasi-eigenvalue at this order, ``kappa h``."""
        return self.kappa * self.h

    def phase(self, s):
        return phase_profile(self.spec, s)

    def amplitude(self, s):
        return transport_amplitude(self.spec, s)

    def _parts(self, s):
        """Split ``s`` into points inside the cut-off support and the rest."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(np.abs(s) > np.pi):
            raise ParameterError("quasimode is evaluated on [-pi, pi]")
        inside = np.abs(s) < self.cutoff.support
        return s, inside

    def log_envelope(self, s):
        """``log(h^{-1/4} e^{-Phi/h} a0)``, the quasimode without its cut-off."""
        return (-0.25 * np.log(self.h) - self.phase(s) / self.h
                + np.log(self.amplitude(s)))

    def _eval_all(self, s, order):
        s, inside = self._parts(s)
        out = np.zeros((order + 1,) + s.shape)
        x = s[inside]
        if x.size:
            h = self.h
            env = np.exp(self.log_envelope(x))
            dphi = phase_derivative(self.spec, x)
            g = amplitude_integrand(self.spec, x, self.kappa)
            # psi_env' / psi_env = -Phi'/h - G/2
            r = -dphi / h - g / 2
            chi = self.cutoff.chi_r(x)
            out[0, inside] = chi * env
            if order >= 1:
                dchi = self.cutoff.dchi_r(x)
                out[1, inside] = (dchi + chi * r) * env
            if order >= 2:
                d2chi = self.cutoff.d2chi_r(x)
                dr = -_phase_second(self.spec, x) / h - amplitude_integrand_derivative(self.spec, x, self.kappa) / 2
                out[2, inside] = (d2chi + 2 * dchi * r + chi * (dr + r**2)) * env
        return out

    @staticmethod
    def _shape(s, v):
        return float(v[0]) if np.ndim(s) == 0 else v

    def eval(self, s):
        return self._shape(s, self._eval_all(s, 0)[0])

    def deriv(self, s):
        return self._shape(s, self._eval_all(s, 1)[1])

    def second_deriv(self, s):
        return self._shape(s, self._eval_all(s, 2)[2])

    def __call__(self, s):
        return self.eval(s)

    def norm_squared(self):
        """``int |psi|^2 ds`` by composite Gauss-Legendre over the support."""
        width = min(0.05, 0.5 * np.sqrt(self.h))
        b = self.cutoff.support
        f = lambda x: self.eval(x) ** 2
        return composite_gauss(f, -b, 0.0, width) + composite_gauss(f, 0.0, b, width)


def build_quasimode(spec, h, cutoff=None):
    """WKB quasimode ``chi_r h^{-1/4} e^{-Phi/h} a0`` with ``mu = kappa h``."""
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    cutoff = build_cutoff(DEFAULT_ETA) if cutoff is None else cutoff
    return WkbQuasimode(spec, float(h), cutoff, _kappa(spec))


def _compact_grid(K_compact, cutoff, npoints):
    a, b = (float(v) for v in K_compact)
    if not a < b:
        raise ParameterError("K_compact must be an interval (a, b) with a < b")
    if max(abs(a), abs(b)) > cutoff.plateau:
        raise ParameterError(f"K_compact must lie in |s| <= pi - 2 eta = {cutoff.plateau:g}")
    return np.linspace(a, b, npoints)


def wkb_residual(spec, h, cutoff=None, K_compact=(-1.5, 1.5), npoints=801):
    """Weighted residual ``sup_K e^{Phi/h} |(h^2 D^2 + V - kappa h) psi|``.

    The second derivative of ``psi`` is analytic (no differencing), so the
    value is accurate even where ``psi`` itself is exponentially small.
    """
    q = build_quasimode(spec, h, cutoff)
    s = _compact_grid(K_compact, q.cutoff, npoints)
    weight = np.exp(q.phase(s) / h)
    vals = q._eval_all(s, 2)
    res = -h**2 * vals[2] + (spec(s) - q.mu) * vals[0]
    return float(np.max(np.abs(weight * res)))


@dataclass(frozen=True)
class WkbComparison:
    """Weighted sup errors between the numeric ground state and the quasimode.

    ``err_value`` and ``err_deriv`` are divided by ``h^{-1/4} (kappa/pi)^{1/4}``
    and ``h^{-5/4} (kappa/pi)^{1/4}``, the sizes of ``psi(0)`` and of the
    leading derivative scale, so both are relative errors.
    """

    h: float
    err_value: float
    err_deriv: float
    err_at_zero: float
    raw_value: float
    raw_deriv: float


def wkb_vs_numeric(spec, h, K_compact=(-1.5, 1.5), eta=DEFAULT_ETA, cutoff=None,
                   derivative="leading", npoints=801):
    """Compare the one-well ground state with the quasimode on ``K_compact``.

    ``psi`` is rescaled to match ``phi`` at ``s = 0``.  The derivative is
    compared against the leading term ``-Phi'/h psi`` (``derivative='leading'``)
    or the full analytic ``psi'`` (``'full'``).
    """
    cutoff = build_cutoff(eta) if cutoff is None else cutoff
    q = build_quasimode(spec, h, cutoff)
    state = one_well_state(spec, h, eta)
    if state.match_residual > 1e-6:
        raise PrecisionError(f"tail refinement mismatch {state.match_residual:.3g}")
    s = _compact_grid(K_compact, cutoff, npoints)
    if 0.0 not in s:
        s = np.sort(np.append(s, 0.0))
    phi_log = state.log_abs(s)
    phi_ld = state.logderiv(s)
    phase = q.phase(s)
    # e^{Phi/h} phi and e^{Phi/h} phi', formed in the log domain
    w_phi = np.exp(phi_log + phase / h)
    w_dphi = w_phi * phi_ld
    env = np.exp(q.log_envelope(s) + phase / h)  # e^{Phi/h} psi on the plateau
    scale = float(np.exp(state.log_abs(0.0) - q.log_envelope(0.0)))
    w_psi = scale * env
    if derivative == "leading":
        w_dpsi = -phase_derivative(spec, s) / h * w_psi
    elif derivative == "full":
        w_dpsi = scale * np.exp(phase / h) * q.deriv(s)
    else:
        raise ParameterError("derivative must be 'leading' or 'full'")
    err_v = np.abs(w_phi - w_psi)
    err_d = np.abs(w_dphi - w_dpsi)
    amp0 = (q.kappa / np.pi) ** 0.25
    sv, sd = h**-0.25 * amp0, h**-1.25 * amp0
    zero = int(np.argmin(np.abs(s)))
    return WkbComparison(float(h), float(np.max(err_v) / sv), float(np.max(err_d) / sd),
                         float(err_v[zero] / sv), float(np.max(err_v)), float(np.max(err_d)))


def export_quasimode_csv(q, s, path):
    """Write quasimode samples as CSV columns ``s, phase, amplitude, psi, dpsi``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    inside = np.abs(s) < q.cutoff.support
    phase = np.full(s.shape, np.nan)
    amp = np.full(s.shape, np.nan)
    phase[inside] = q.phase(s[inside])
    amp[inside] = q.amplitude(s[inside])
    vals = q._eval_all(s, 1)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "phase", "amplitude", "psi", "dpsi"])
        for row in zip(s, phase, amp, vals[0], vals[1]):
            w.writerow([f"{x:.17g}" for x in row])
