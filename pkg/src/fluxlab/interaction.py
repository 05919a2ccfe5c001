"""Quasimode pair, overlap, interaction coefficient and the splitting estimate.

The two quasimodes are ``f_r = chi_r e^{-i xi0 s/h} phi_r`` and
``f_l = chi_l p(s) e^{-i xi0 s/h} phi_l`` on ``(-pi, pi]``, where
``phi_l(s) = phi_r(pi - s)`` and ``p(s) = e^{i xi0 pi/h}`` for ``s > 0``,
``e^{-i xi0 pi/h}`` for ``s <= 0``.  The interaction coefficient is

    w_lr = 2 h^2 (e^{i xi0 pi/h} phi(pi/2) phi'(pi/2)
                  - e^{-i xi0 pi/h} phi(-pi/2) phi'(-pi/2)),

the sum of an upper-path term ``w_up`` and a lower-path term ``w_down``, and
the tunneling gap is ``2 |w_lr|`` up to ``O(e^{-2S/h})``.  Everything
exponentially small is carried as ``(log|z|, arg z)``.
"""

from dataclasses import dataclass, field, asdict
from functools import lru_cache
import warnings

import numpy as np

from ._numerics import _GL_NODES, _GL_WEIGHTS, flux_phase, log_sum
from .agmon import agmon_constants, leading_interaction
from .cutoff import CutoffSpec, build_cutoff
from .errors import ParameterError, PrecisionError, RouteDisagreementWarning, ValidationError
from .potential import validate_double_well
from .spectral import (
    DEFAULT_ETA,
    DEFAULT_N,
    EigenSolution,
    OneWellState,
    ReflectedState,
    circle_gap,
    evaluate_wavefunction,
    one_well_state,
)

__all__ = [
    "CutoffSpec",
    "build_cutoff",
    "QuasimodeBasis",
    "quasimode_basis",
    "InteractionData",
    "overlap_matrix",
    "interaction_wronskian",
    "wronskian_constancy",
    "SplittingConfig",
    "SplittingResult",
    "splitting_estimate",
    "ROUTES",
    "CSV_COLUMNS",
]

ROUTES = ("direct", "wronskian", "leading")
CSV_COLUMNS = ("h", "xi0", "gap_direct", "gap_wronskian", "gap_leading", "log10_gap_leading",
               "w_up_log10", "w_down_log10", "phase_up", "phase_down", "flags")
AGREEMENT_TOL = 0.35
TAIL_TOL = 1e-6
LN10 = np.log(10.0)


class _GridState:
    """Log-domain view of a grid eigenfunction (no tail refinement)."""

    def __init__(self, sol):
        self.sol = sol
        self.eigenvalue = float(sol.eigenvalues[0])
        self.h = sol.meta.get("h")
        self.eta = sol.meta.get("eta", DEFAULT_ETA)
        self.match_residual = 0.0

    def value(self, s):
        return np.real(evaluate_wavefunction(self.sol, s)[0])

    def deriv(self, s):
        return np.real(evaluate_wavefunction(self.sol, s)[1])

    def log_abs(self, s):
        with np.errstate(divide="ignore"):
            return np.log(np.abs(self.value(s)))

    def logderiv(self, s):
        return self.deriv(s) / self.value(s)

    def reflect(self):
        return ReflectedState(self)


def _as_state(phi):
    if isinstance(phi, (OneWellState, ReflectedState, _GridState)):
        return phi
    if isinstance(phi, EigenSolution) and phi.basis == "grid":
        return _GridState(phi)
    raise ParameterError("expected a one-well state or a grid EigenSolution")


def _gauss_nodes(a, b, max_width=0.02):
    npanel = max(1, int(np.ceil(abs(b - a) / max_width)))
    edges = np.linspace(a, b, npanel + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * _GL_NODES[None, :]).ravel()
    w = (half[:, None] * _GL_WEIGHTS[None, :]).ravel()
    return x, w


def _log_integral(x, w, log_mag, factor):
    """``log|int e^{log_mag} factor|`` and the sign of the integral (``factor`` real)."""
    ok = np.isfinite(log_mag) & (factor != 0)
    if not np.any(ok):
        return -np.inf, 0.0
    top = np.max(log_mag[ok])
    total = np.sum(w[ok] * factor[ok] * np.exp(log_mag[ok] - top))
    if total == 0:
        return -np.inf, 0.0
    return top + float(np.log(abs(total))), 0.0 if total > 0 else np.pi


# ---------------------------------------------------------------------------
# quasimodes


@dataclass(frozen=True)
class QuasimodeBasis:
    """The pair ``f_r, f_l`` built from a one-well ground state."""

    phi_r: object = field(repr=False)
    cutoff: CutoffSpec
    h: float
    xi0: float

    @property
    def phi_l(self):
        return self.phi_r.reflect()

    @property
    def theta(self):
        """``xi0 pi / h`` reduced to ``(-pi, pi]``."""
        return flux_phase(self.xi0, self.h)

    def _gauge(self, s):
        # e^{-i xi0 s / h} with the exponent reduced before exponentiation
        return np.exp(-1j * np.pi * np.remainder(self.xi0 * np.asarray(s) / (np.pi * self.h), 2.0))

    def f_r(self, s):
        s = np.pi - np.mod(np.pi - np.asarray(s, dtype=float), 2 * np.pi)
        chi = self.cutoff.chi_r(s)
        inside = chi > 0
        out = np.zeros(np.shape(s), dtype=complex)
        if np.any(inside):
            x = np.asarray(s)[inside]
            out[inside] = chi[inside] * self._gauge(x) * self.phi_r.value(x)
        return out

    def f_l(self, s):
        s = np.pi - np.mod(np.pi - np.asarray(s, dtype=float), 2 * np.pi)
        chi = self.cutoff.chi_l(s)
        inside = chi > 0
        out = np.zeros(np.shape(s), dtype=complex)
        if np.any(inside):
            x = np.asarray(s)[inside]
            branch = np.where(x > 0, np.exp(1j * self.theta), np.exp(-1j * self.theta))
            out[inside] = chi[inside] * branch * self._gauge(x) * self.phi_l.value(x)
        return out

    def norm_defect(self):
        """``1 - <f, f> = int (1 - chi^2) |phi|^2``, the same for ``f_r`` and ``f_l``."""
        c = self.cutoff
        b = np.pi - self.phi_r.eta
        pieces = []
        for a, z in ((c.plateau, b), (-b, -c.plateau)):
            x, w = _gauss_nodes(a, z, 0.01)
            pieces.append(_log_integral(x, w, 2 * self.phi_r.log_abs(x), 1 - c.chi_r(x) ** 2))
        return float(np.exp(log_sum(pieces)[0]))

    def gram(self):
        """``<f_r, f_r>``, equal to ``<f_l, f_l>`` by reflection."""
        return 1.0 - self.norm_defect()


def quasimode_basis(phi_r, cutoff=None, h=None, xi0=0.0):
    """Quasimode pair from a one-well ground state.

    ``phi_r`` is a :class:`~fluxlab.spectral.OneWellState` (log-domain tails)
    or a grid :class:`~fluxlab.spectral.EigenSolution`.
    """
    state = _as_state(phi_r)
    cutoff = build_cutoff(state.eta) if cutoff is None else cutoff
    if cutoff.support > np.pi - state.eta + 1e-12:
        raise ParameterError("cut-off support exceeds the Dirichlet interval")
    h = state.h if h is None else h
    return QuasimodeBasis(state, cutoff, float(h), float(xi0))


# ---------------------------------------------------------------------------
# interaction data


@dataclass(frozen=True)
class InteractionData:
    """Overlap and interaction coefficients of a quasimode pair.

    Path terms are stored as ``(log|w|, arg w)``; ``w_lr = w_up + w_down``.
    """

    h: float
    xi0: float
    log_T: float = -np.inf
    phase_T: float = 0.0
    log_T_up: float = -np.inf
    log_T_down: float = -np.inf
    w_up: tuple = (-np.inf, 0.0)
    w_down: tuple = (-np.inf, 0.0)
    w_lr_quadrature: tuple = (-np.inf, 0.0)
    w_rl_quadrature: tuple = (-np.inf, 0.0)
    match_residual: float = 0.0

    @property
    def T(self):
        return complex(np.exp(self.log_T) * np.exp(1j * self.phase_T))

    @property
    def log_w(self):
        return log_sum([self.w_up, self.w_down])

    @property
    def w_lr(self):
        la, ph = self.log_w
        return complex(np.exp(la) * np.exp(1j * ph))

    @property
    def w_rl(self):
        la, ph = self.w_rl_quadrature
        return complex(np.exp(la) * np.exp(1j * ph))

    @property
    def log_gap(self):
        return np.log(2.0) + self.log_w[0]

    @property
    def gap(self):
        return float(np.exp(self.log_gap))

    def path_ratio(self):
        """``|w_up| / |w_down|`` as a float (may be 0 or inf)."""
        return float(np.exp(self.w_up[0] - self.w_down[0]))


def overlap_matrix(basis):
    """Off-diagonal Gram entry ``T = <f_r, f_l> = int f_r conj(f_l)``.

    ``T = e^{-i theta} T_up + e^{i theta} T_down`` with the real positive
    path integrals ``T_up = int_0^pi chi_r chi_l phi_r phi_l`` and the
    analogue over ``(-pi, 0)``.
    """
    c, phi_r, phi_l = basis.cutoff, basis.phi_r, basis.phi_l
    theta = basis.theta
    lo, hi = np.pi - c.support, c.support
    logs = []
    for a, b in ((lo, hi), (-hi, -lo)):
        x, w = _gauss_nodes(a, b, 0.02)
        chi = c.chi_r(x) * c.chi_l(x)
        lm = phi_r.log_abs(x) + phi_l.log_abs(x)
        logs.append(_log_integral(x, w, lm, chi)[0])
    la, ph = log_sum([(logs[0], -theta), (logs[1], theta)])
    return InteractionData(basis.h, basis.xi0, log_T=la, phase_T=ph,
                           log_T_up=logs[0], log_T_down=logs[1],
                           match_residual=basis.phi_r.match_residual)


def _commutator_term(x, w, chi1, chi2, log_a, ld_a, log_b):
    """``log|int (chi'' a + 2 chi' a') b|`` with sign, for real positive ``a, b``."""
    return _log_integral(x, w, log_a + log_b, chi2 + 2 * chi1 * ld_a)


def interaction_wronskian(phi_r, h, xi0, cutoff=None, quadrature=True):
    """Interaction coefficient ``w_lr`` from the Wronskian of the one-well tails.

    The point formula at ``+-pi/2`` gives the path terms ``w_up`` and
    ``w_down``.  With ``quadrature=True`` the commutator integrals
    ``<[L, chi_l] f_r, f_l>``-type are also evaluated on the annuli where
    ``chi_l'`` and ``chi_r'`` live, giving ``w_lr`` and ``w_rl`` by an
    independent route.  Raises :class:`PrecisionError` when the tail
    refinement did not converge to ``1e-6``.
    """
    state = _as_state(phi_r)
    if state.match_residual > TAIL_TOL:
        raise PrecisionError(
            f"tail refinement matched only to {state.match_residual:.3g} (need {TAIL_TOL:g})")
    theta = flux_phase(xi0, h)
    half = np.pi / 2
    log2h2 = np.log(2 * h * h)
    la_up = state.log_abs(half)
    la_dn = state.log_abs(-half)
    ld_up = state.logderiv(half)
    ld_dn = state.logderiv(-half)
    if not (np.isfinite(la_up) and np.isfinite(la_dn)):
        raise PrecisionError("one-well state vanishes at +-pi/2")
    # w_up = 2h^2 e^{i theta} phi phi'(pi/2), w_down = -2h^2 e^{-i theta} phi phi'(-pi/2)
    w_up = (log2h2 + 2 * la_up + np.log(abs(ld_up)), _wrap(theta + (0.0 if ld_up > 0 else np.pi)))
    w_dn = (log2h2 + 2 * la_dn + np.log(abs(ld_dn)), _wrap(-theta + (np.pi if ld_dn > 0 else 0.0)))

    lr = rl = (-np.inf, 0.0)
    if quadrature:
        cutoff = build_cutoff(state.eta) if cutoff is None else cutoff
        lr, rl = _commutator_routes(state, cutoff, h, theta)
    return InteractionData(h, xi0, w_up=w_up, w_down=w_dn, w_lr_quadrature=lr,
                           w_rl_quadrature=rl, match_residual=state.match_residual)


def _wrap(phase):
    return float(np.angle(np.exp(1j * phase)))


def _commutator_routes(state, cutoff, h, theta):
    """``w_lr`` and ``w_rl`` as commutator integrals over the cut-off annuli.

    ``w_lr = -h^2 sum_pm c_pm int (chi_l'' phi_l + 2 chi_l' phi_l') phi_r`` over
    ``(eta, 2eta)`` (``c = e^{i theta}``) and ``(-2eta, -eta)`` (``c = e^{-i theta}``);
    ``w_rl`` is the same with ``chi_r`` over the annuli next to ``+-pi`` and
    conjugated phases.
    """
    refl = state.reflect()
    e = cutoff.eta
    lo, hi = np.pi - cutoff.support, np.pi - cutoff.plateau  # (eta, 2 eta)
    terms_lr, terms_rl = [], []
    for sign, c in ((1.0, theta), (-1.0, -theta)):
        a, b = sorted((sign * lo, sign * hi))
        x, w = _gauss_nodes(a, b, e / 8)
        la, ph = _commutator_term(x, w, cutoff.dchi_l(x), cutoff.d2chi_l(x),
                                  refl.log_abs(x), refl.logderiv(x), state.log_abs(x))
        terms_lr.append((2 * np.log(h) + la, _wrap(c + ph + np.pi)))
        # annulus next to the left well on the same side of the circle
        a, b = sorted((sign * (np.pi - hi), sign * (np.pi - lo)))
        x, w = _gauss_nodes(a, b, e / 8)
        la, ph = _commutator_term(x, w, cutoff.dchi_r(x), cutoff.d2chi_r(x),
                                  state.log_abs(x), state.logderiv(x), refl.log_abs(x))
        terms_rl.append((2 * np.log(h) + la, _wrap(-c + ph + np.pi)))
    return log_sum(terms_lr), log_sum(terms_rl)


def wronskian_constancy(phi_r, phi_l, region, npoints=64):
    """Relative standard deviation of ``phi_l phi_r' - phi_l' phi_r`` over ``region``."""
    a, b = region
    r, l = _as_state(phi_r), _as_state(phi_l)
    tol = 1e-10 * max(1.0, abs(r.eigenvalue))
    if abs(r.eigenvalue - l.eigenvalue) > tol:
        raise ParameterError(
            f"eigenvalues differ by {abs(r.eigenvalue - l.eigenvalue):.3g}; the Wronskian is not constant")
    s = a + (b - a) * (np.arange(npoints) + 0.5) / npoints
    lm = r.log_abs(s) + l.log_abs(s)
    wr = np.exp(lm - np.max(lm)) * (r.logderiv(s) - l.logderiv(s))
    return float(np.std(wr) / abs(np.mean(wr)))


# ---------------------------------------------------------------------------
# splitting estimate


@dataclass(frozen=True)
class SplittingConfig:
    """Solver settings for :func:`splitting_estimate`."""

    routes: tuple = ROUTES
    K: int = None
    n: int = DEFAULT_N
    eta: float = DEFAULT_ETA
    quad_tol: float = 1e-12
    profile: str = "exp_bump"
    validate: bool = True


@dataclass(frozen=True)
class SplittingResult:
    """Gap from the direct, Wronskian and leading-order routes.

    ``gap_*`` are NaN for routes that were not run or fell below the floating
    point floor; the ``log10_*`` fields stay finite where the float underflows.
    """

    h: float
    xi0: float
    gap_direct: float = np.nan
    gap_wronskian: float = np.nan
    gap_leading: float = np.nan
    log10_gap_direct: float = np.nan
    log10_gap_wronskian: float = np.nan
    log10_gap_leading: float = np.nan
    w_up_log10: float = np.nan
    w_down_log10: float = np.nan
    phase_up: float = np.nan
    phase_down: float = np.nan
    log10_band_leading: float = np.nan
    log10_band_wronskian: float = np.nan
    gap_matrix: float = np.nan
    flags: tuple = ()

    def to_dict(self):
        d = asdict(self)
        d["flags"] = list(self.flags)
        return d

    def csv_row(self):
        d = self.to_dict()
        out = []
        for k in CSV_COLUMNS:
            v = d[k]
            out.append(";".join(v) if k == "flags" else f"{float(v):.17g}")
        return out


@lru_cache(maxsize=32)
def _constants(spec, quad_tol):
    return agmon_constants(spec, quad_tol)


@lru_cache(maxsize=32)
def _validated(spec):
    report = validate_double_well(spec)
    if not report.passed:
        raise ValidationError(report)
    return report


def _gap_matrix(data):
    """Gap of ``G^{-1/2} W G^{-1/2}`` for the 2x2 Gram ``G`` and interaction ``W``."""
    la, ph = data.log_w
    if not np.isfinite(la):
        return 0.0
    T = data.T if np.isfinite(data.log_T) else 0j
    G = np.array([[1.0, np.conj(T)], [T, 1.0]])
    W = np.array([[0.0, np.exp(-1j * ph)], [np.exp(1j * ph), 0.0]])  # scaled by |w|
    vals, vecs = np.linalg.eigh(G)
    g = vecs @ np.diag(vals ** -0.5) @ vecs.conj().T
    ev = np.linalg.eigvalsh(g @ W @ g)
    return float((ev[1] - ev[0]) * np.exp(la))


def splitting_estimate(spec, h, xi0, config=None):
    """Tunneling gap of the circle operator by every requested route.

    ``direct`` diagonalizes the Fourier matrix, ``wronskian`` uses
    ``2 |w_lr|`` from log-domain tails of the one-well state, ``leading`` the
    closed-form constants.  Flags: ``below_floor`` (direct gap under the
    precision floor), ``route_disagreement`` (Wronskian and direct routes
    differ by more than 35%), ``leading_disagreement`` (same against the
    leading route, checked only where the leading gap is not near a zero).
    """
    config = SplittingConfig() if config is None else config
    routes = tuple(config.routes)
    if not routes or any(r not in ROUTES for r in routes):
        raise ParameterError(f"routes must be a nonempty subset of {ROUTES}")
    if not 0 < h < 1:
        raise ParameterError(f"h must lie in (0, 1), got {h}")
    if config.validate:
        _validated(spec)
    flags = []
    out = {"h": float(h), "xi0": float(xi0)}

    const = _constants(spec, config.quad_tol)
    pred = leading_interaction(const, h, xi0)
    out["log10_band_leading"] = pred.log_remainder_scale / LN10
    out["log10_band_wronskian"] = -2 * const.S / h / LN10
    if "leading" in routes:
        lg = pred.log_gap_leading
        out["log10_gap_leading"] = lg / LN10
        out["gap_leading"] = float(np.exp(lg)) if np.isfinite(lg) else 0.0
        out.update(w_up_log10=pred.log_up / LN10, w_down_log10=pred.log_down / LN10,
                   phase_up=pred.phase_up, phase_down=pred.phase_down)

    if "direct" in routes:
        cg = circle_gap(spec, h, xi0, config.K)
        out["gap_direct"] = cg.gap
        if cg.below_floor:
            flags.append("below_floor")
        else:
            out["log10_gap_direct"] = np.log10(cg.gap)

    if "wronskian" in routes:
        state = one_well_state(spec, h, config.eta, config.n)
        cutoff = build_cutoff(config.eta, config.profile)
        data = interaction_wronskian(state, h, xi0, cutoff, quadrature=False)
        basis = quasimode_basis(state, cutoff, h, xi0)
        T = overlap_matrix(basis)
        data = InteractionData(h, xi0, log_T=T.log_T, phase_T=T.phase_T, log_T_up=T.log_T_up,
                               log_T_down=T.log_T_down, w_up=data.w_up, w_down=data.w_down,
                               match_residual=data.match_residual)
        out["log10_gap_wronskian"] = data.log_gap / LN10
        out["gap_wronskian"] = data.gap
        out.update(w_up_log10=data.w_up[0] / LN10, w_down_log10=data.w_down[0] / LN10,
                   phase_up=data.w_up[1], phase_down=data.w_down[1])
        out["gap_matrix"] = _gap_matrix(data)

    gd, gw = out.get("gap_direct", np.nan), out.get("gap_wronskian", np.nan)
    if np.isfinite(gd) and np.isfinite(gw) and abs(gw - gd) > AGREEMENT_TOL * gd:
        flags.append("route_disagreement")
        warnings.warn(f"h={h:g}, xi0={xi0:g}: Wronskian gap {gw:.6g} vs direct gap {gd:.6g}",
                      RouteDisagreementWarning, stacklevel=2)
    gl = out.get("gap_leading", np.nan)
    full = 2 * (np.exp(pred.log_up) + np.exp(pred.log_down))
    if np.isfinite(gd) and np.isfinite(gl) and gl >= 0.5 * full and abs(gl - gd) > AGREEMENT_TOL * gd:
        flags.append("leading_disagreement")
        warnings.warn(f"h={h:g}, xi0={xi0:g}: leading gap {gl:.6g} vs direct gap {gd:.6g}",
                      RouteDisagreementWarning, stacklevel=2)
    return SplittingResult(flags=tuple(flags), **out)
