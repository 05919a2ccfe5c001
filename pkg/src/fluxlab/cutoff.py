"""Smooth cut-off functions around the two wells.

``chi_r`` equals 1 on ``|s| <= pi - 2 eta``, vanishes for ``|s| >= pi - eta``
and ramps down in between; ``chi_l(s) = chi_r(pi - s)`` is its mirror image
around the well at ``pi``.  Angles are taken modulo ``2 pi``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .errors import ParameterError

__all__ = ["CutoffSpec", "build_cutoff", "PROFILES"]

PROFILES = ("exp_bump", "poly_smooth")


def _wrap(s):
    return np.pi - np.mod(np.pi - np.asarray(s, dtype=float), 2 * np.pi)


def _poly_step(t):
    """``(p, p', p'')`` of the degree-7 ramp ``35t^4 - 84t^5 + 70t^6 - 20t^7``."""
    p = t**4 * (35 - 84 * t + 70 * t**2 - 20 * t**3)
    dp = 140 * t**3 * (1 - t) ** 3
    d2p = 420 * t**2 * (1 - t) ** 2 * (1 - 2 * t)
    return p, dp, d2p


def _exp_step(t):
    """``(g, g', g'')`` of ``g = f(t) / (f(t) + f(1 - t))`` with ``f(x) = e^{-1/x}``."""
    inner = (t > 0) & (t < 1)
    g = np.where(t >= 1, 1.0, 0.0)
    dg = np.zeros_like(t)
    d2g = np.zeros_like(t)
    ti = t[inner]
    u = 1 / (1 - ti) - 1 / ti
    du = 1 / (1 - ti) ** 2 + 1 / ti**2
    d2u = 2 / (1 - ti) ** 3 - 2 / ti**3
    sig = expit(u)
    w = sig * expit(-u)
    g[inner] = sig
    dg[inner] = w * du
    d2g[inner] = w * (1 - 2 * sig) * du**2 + w * d2u
    return g, dg, d2g


@dataclass(frozen=True)
class CutoffSpec:
    """Cut-off pair ``(chi_r, chi_l)`` with ramp width ``eta``."""

    eta: float
    profile: str = "exp_bump"

    @property
    def plateau(self):
        return np.pi - 2 * self.eta

    @property
    def support(self):
        return np.pi - self.eta

    def _ramp(self, s):
        s = _wrap(s)
        t = np.clip((np.abs(s) - self.plateau) / self.eta, 0.0, 1.0)
        step = _poly_step if self.profile == "poly_smooth" else _exp_step
        g, dg, d2g = step(np.atleast_1d(t))
        return s, g.reshape(t.shape), dg.reshape(t.shape), d2g.reshape(t.shape)

    def chi_r(self, s):
        _, g, _, _ = self._ramp(s)
        return 1.0 - g

    def dchi_r(self, s):
        s, _, dg, _ = self._ramp(s)
        return -np.sign(s) * dg / self.eta

    def d2chi_r(self, s):
        _, _, _, d2g = self._ramp(s)
        return -d2g / self.eta**2

    def chi_l(self, s):
        return self.chi_r(np.pi - np.asarray(s, dtype=float))

    def dchi_l(self, s):
        return -self.dchi_r(np.pi - np.asarray(s, dtype=float))

    def d2chi_l(self, s):
        return self.d2chi_r(np.pi - np.asarray(s, dtype=float))


def build_cutoff(eta=0.3, profile="exp_bump"):
    """Cut-off pair with plateau ``|s| <= pi - 2 eta`` and support ``|s| < pi - eta``.

    ``exp_bump`` glues with ``e^{-1/x}`` and is infinitely smooth;
    ``poly_smooth`` is the C^3 degree-7 polynomial ramp.
    """
    if not 0 < eta < np.pi / 4:
        raise ParameterError(f"eta must lie in (0, pi/4), got {eta}")
    if profile not in PROFILES:
        raise ParameterError(f"profile must be one of {PROFILES}, got {profile!r}")
    return CutoffSpec(float(eta), profile)
