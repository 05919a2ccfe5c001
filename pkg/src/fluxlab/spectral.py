"""Discretizations of the circle operator and of the one-well Dirichlet operator.

The circle operator ``(h D + xi0)^2 + V`` with ``D = -i d/ds`` is represented in
the Fourier basis ``e^{iks} / sqrt(2 pi)``, ``k = -K..K``.  The one-well
operator ``h^2 D^2 + V`` on ``(-pi + eta, pi - eta)`` with Dirichlet conditions
uses a three-point finite-difference grid, refined by one Richardson step in
the eigenvalue.  For relative accuracy deep in the exponentially small tails,
:class:`OneWellState` re-solves the one-well eigenproblem by Pruefer shooting,
which carries ``log|phi|`` instead of ``phi``.
"""

from dataclasses import dataclass, field
from functools import lru_cache
import csv
import json
import warnings

import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from ._numerics import composite_gauss
from .errors import DegeneracyError, ParameterError, RefinementError, ResolutionWarning

__all__ = [
    "CircleOperator",
    "DirichletOperator",
    "EigenSolution",
    "CircleGap",
    "TailProfile",
    "OneWellState",
    "assemble_circle",
    "hermitian_eigs",
    "circle_gap",
    "default_K",
    "assemble_dirichlet",
    "dirichlet_eigs",
    "ground_state_single_well",
    "richardson_ground_energy",
    "richardson_ground_state",
    "one_well_state",
    "tail_refine",
    "evaluate_wavefunction",
    "reflect_left",
    "export_wavefunction_csv",
    "export_debug_json",
]

DEFAULT_ETA = 0.3
DEFAULT_N = 4096
GAP_FLOOR = 1e-13
RESIDUAL_TOL = 1e-11


def wrap_angle(s):
    """Map ``s`` into ``(-pi, pi]``."""
    s = np.asarray(s, dtype=float)
    return np.pi - np.mod(np.pi - s, 2 * np.pi)


# ---------------------------------------------------------------------------
# circle operator


def fourier_coefficients(spec, M):
    """``Vhat(m) = (1/2pi) int V e^{-ims} ds`` for ``m = 0..2M`` by trapezoid sums on 4M points."""
    N = 4 * max(int(M), 1)
    s = -np.pi + 2 * np.pi * np.arange(N) / N
    v = spec(s)
    m = np.arange(2 * M + 1)
    return (np.exp(-1j * np.outer(m, s)) @ v) / N


@dataclass(frozen=True)
class CircleOperator:
    """Fourier matrix of ``(h D + xi0)^2 + V`` on modes ``k = -K..K``."""

    h: float
    xi0: float
    K: int
    matrix: np.ndarray = field(repr=False)
    vhat: np.ndarray = field(repr=False)

    @property
    def k(self):
        return np.arange(-self.K, self.K + 1)

    @property
    def norm(self):
        """Infinity norm (maximum absolute row sum) of the matrix."""
        return float(np.max(np.sum(np.abs(self.matrix), axis=1)))


def assemble_circle(spec, h, xi0, K):
    """Assemble the Fourier matrix ``M_kk' = (hk + xi0)^2 delta_kk' + Vhat(k - k')``.

    ``Vhat`` is computed by direct trapezoid sums on ``8K`` equispaced points.
    ``K < 16`` is accepted with a :class:`ResolutionWarning`, as is a Fourier
    tail ``max_{K<|m|<=2K} |Vhat(m)| > 1e-13 max |Vhat|``.
    """
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    K = int(K)
    if K < 1:
        raise ParameterError("K must be a positive integer")
    if K < 16:
        warnings.warn(f"K={K} is below the recommended minimum of 16", ResolutionWarning, stacklevel=2)
    vhat = fourier_coefficients(spec, 2 * K)  # m = 0..4K, exact to aliasing at 8K points
    if spec.is_even:
        vhat = vhat.real.astype(complex)
    vhat[0] = vhat[0].real
    scale = np.max(np.abs(vhat))
    if scale > 0 and np.max(np.abs(vhat[K + 1:2 * K + 1])) > 1e-13 * scale:
        warnings.warn(f"K={K} does not resolve the Fourier spectrum of {spec.label}",
                      ResolutionWarning, stacklevel=2)
    k = np.arange(-K, K + 1)
    diff = k[:, None] - k[None, :]
    full = np.where(diff >= 0, vhat[np.abs(diff)], np.conj(vhat[np.abs(diff)]))
    matrix = full + np.diag((h * k + xi0) ** 2)
    return CircleOperator(float(h), float(xi0), K, matrix, vhat[: 2 * K + 1])


def default_K(h):
    """Default Fourier truncation ``max(64, ceil(12 / sqrt(h)))``."""
    return max(64, int(np.ceil(12 / np.sqrt(h))))


# ---------------------------------------------------------------------------
# eigen solutions


@dataclass(frozen=True)
class EigenSolution:
    """Eigenpairs of a discretized operator.

    ``eigenvectors[:, j]`` holds Fourier coefficients (``basis='fourier'``,
    mode numbers in ``k``) or grid values at the interior nodes ``x``
    (``basis='grid'``, zero boundary values at ``domain``).  Both are
    normalized in ``L^2(ds)``.
    """

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray = field(repr=False)
    basis: str
    k: np.ndarray = field(default=None, repr=False)
    x: np.ndarray = field(default=None, repr=False)
    domain: tuple = (-np.pi, np.pi)
    residuals: np.ndarray = field(default=None, repr=False)
    meta: dict = field(default_factory=dict, repr=False)

    def evaluate(self, s, index=0):
        return evaluate_wavefunction(self, s, index)


def _phase_fix_fourier(vecs):
    """Rotate each column so that ``psi(0) = sum_k c_k`` is real positive."""
    vecs = vecs.copy()
    for j in range(vecs.shape[1]):
        v = vecs[:, j]
        at0 = v.sum()
        if abs(at0) > 1e-8 * np.max(np.abs(v)):
            ref = at0
        else:
            ref = v[np.argmax(np.abs(v))]
        vecs[:, j] = v * (abs(ref) / ref)
    return vecs


def hermitian_eigs(matrix, m):
    """Lowest ``m`` eigenpairs of a Hermitian matrix (dense LAPACK solver).

    Accepts a raw array or a :class:`CircleOperator`; with an operator the
    result is a Fourier-basis :class:`EigenSolution` with each vector rotated
    so that ``psi(0)`` is real positive.
    """
    op = matrix if isinstance(matrix, CircleOperator) else None
    A = np.asarray(op.matrix if op is not None else matrix)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ParameterError("matrix must be square")
    dim = A.shape[0]
    m = int(m)
    if not 1 <= m <= dim:
        raise ParameterError(f"m must lie in [1, {dim}], got {m}")
    norm = float(np.max(np.sum(np.abs(A), axis=1))) or 1.0
    asym = float(np.max(np.abs(A - A.conj().T)))
    if asym > 1e-12 * norm:
        raise ParameterError(f"matrix is not Hermitian (asymmetry {asym:.3g})")
    A = 0.5 * (A + A.conj().T)
    vals, vecs = linalg.eigh(A, subset_by_index=[0, m - 1])
    if op is not None:
        vecs = _phase_fix_fourier(vecs)
    res = np.linalg.norm(A @ vecs - vecs * vals, axis=0)
    meta = {"norm": norm}
    if op is not None:
        meta.update(h=op.h, xi0=op.xi0, K=op.K)
        return EigenSolution(vals, vecs, "fourier", k=op.k, residuals=res, meta=meta)
    return EigenSolution(vals, vecs, "matrix", residuals=res, meta=meta)


@dataclass(frozen=True)
class CircleGap:
    lambda1: float
    lambda2: float
    lambda3: float
    gap: float
    norm: float
    below_floor: bool
    K: int

    def __iter__(self):
        return iter((self.lambda1, self.lambda2, self.gap))


def circle_gap(spec, h, xi0, K=None):
    """Two lowest eigenvalues of the circle operator and their gap.

    ``gap`` is NaN with ``below_floor=True`` when ``lambda2 - lambda1`` is
    smaller than ``1e-13`` times the matrix norm.  Unpacks as
    ``(lambda1, lambda2, gap)``.
    """
    K = default_K(h) if K is None else int(K)
    op = assemble_circle(spec, h, xi0, K)
    vals = linalg.eigh(op.matrix, eigvals_only=True, subset_by_index=[0, 2])
    raw = float(vals[1] - vals[0])
    below = raw < GAP_FLOOR * op.norm
    return CircleGap(float(vals[0]), float(vals[1]), float(vals[2]),
                     float("nan") if below else raw, op.norm, bool(below), K)


# ---------------------------------------------------------------------------
# Dirichlet operator


@dataclass(frozen=True)
class DirichletOperator:
    """Three-point discretization of ``h^2 D^2 + V`` on ``(-b, b)``, ``b = pi - eta``.

    ``diag`` and ``off`` are the diagonal and off-diagonal of the real
    symmetric tridiagonal matrix on the ``n`` interior nodes
    ``x_j = -b + j * dx``, ``j = 1..n``.
    """

    h: float
    eta: float
    n: int
    x: np.ndarray = field(repr=False)
    diag: np.ndarray = field(repr=False)
    off: np.ndarray = field(repr=False)
    spec: object = field(default=None, repr=False)

    @property
    def b(self):
        return np.pi - self.eta

    @property
    def dx(self):
        return 2 * self.b / (self.n + 1)

    @property
    def matrix(self):
        return np.diag(self.diag) + np.diag(self.off, 1) + np.diag(self.off, -1)

    @property
    def norm(self):
        return float(np.max(np.abs(self.diag)) + 2 * abs(self.off[0]))

    def matvec(self, v):
        out = self.diag[:, None] * v if v.ndim == 2 else self.diag * v
        out[1:] += self.off[:, None] * v[:-1] if v.ndim == 2 else self.off * v[:-1]
        out[:-1] += self.off[:, None] * v[1:] if v.ndim == 2 else self.off * v[1:]
        return out


def _check_eta(eta):
    if not 0 < eta < np.pi / 4:
        raise ParameterError(f"eta must lie in (0, pi/4), got {eta}")


def assemble_dirichlet(spec, h, eta=DEFAULT_ETA, n=DEFAULT_N, _allow_small=False):
    """Finite-difference Dirichlet operator on ``(-pi + eta, pi - eta)``.

    Warns with :class:`ResolutionWarning` when the spacing exceeds
    ``0.05 sqrt(h)``, a twentieth of the harmonic length scale.
    """
    if not h > 0:
        raise ParameterError(f"h must be positive, got {h}")
    _check_eta(eta)
    n = int(n)
    if n < 512 and not _allow_small:
        raise ParameterError(f"n must be at least 512, got {n}")
    b = np.pi - eta
    dx = 2 * b / (n + 1)
    if dx > 0.05 * np.sqrt(h):
        warnings.warn(f"grid spacing {dx:.3g} is coarse relative to sqrt(h)={np.sqrt(h):.3g}",
                      ResolutionWarning, stacklevel=2)
    x = -b + dx * np.arange(1, n + 1)
    c = h**2 / dx**2
    diag = 2 * c + spec(x)
    off = np.full(n - 1, -c)
    return DirichletOperator(float(h), float(eta), n, x, diag, off, spec)


def dirichlet_eigs(op, m=1):
    """Lowest ``m`` eigenpairs of a :class:`DirichletOperator`, grid basis.

    Vectors are normalized so that ``dx * sum v^2 = 1`` (trapezoid rule with
    zero boundary values) and signed positive at the node nearest ``s = 0``.
    """
    m = int(m)
    if not 1 <= m <= op.n:
        raise ParameterError(f"m must lie in [1, {op.n}]")
    vals, vecs = linalg.eigh_tridiagonal(op.diag, op.off, select="i", select_range=(0, m - 1))
    res = np.linalg.norm(op.matvec(vecs) - vecs * vals, axis=0)
    vecs = vecs / np.sqrt(op.dx)
    centre = int(np.argmin(np.abs(op.x)))
    signs = np.sign(vecs[centre])
    signs[signs == 0] = 1.0
    vecs = vecs * signs
    return EigenSolution(
        vals, vecs, "grid", x=op.x, domain=(-op.b, op.b), residuals=res,
        meta={"h": op.h, "eta": op.eta, "n": op.n, "norm": op.norm},
    )


def ground_state_single_well(op):
    """Positive, ``L^2``-normalized ground state of the Dirichlet operator.

    Raises :class:`DegeneracyError` when the two lowest eigenvalues coincide
    within the residual tolerance.
    """
    sol = dirichlet_eigs(op, 2)
    tol = RESIDUAL_TOL * op.norm
    if sol.eigenvalues[1] - sol.eigenvalues[0] <= max(tol, np.max(sol.residuals)):
        raise DegeneracyError("ground state of the one-well operator is degenerate")
    meta = dict(sol.meta, excited=float(sol.eigenvalues[1]))
    return EigenSolution(sol.eigenvalues[:1], sol.eigenvectors[:, :1], "grid", x=sol.x,
                         domain=sol.domain, residuals=sol.residuals[:1], meta=meta)


def richardson_ground_energy(spec, h, eta=DEFAULT_ETA, n=DEFAULT_N, m=1):
    """Fourth-order estimate of the lowest ``m`` Dirichlet eigenvalues.

    Combines grids with ``n`` and ``2n + 1`` interior nodes (spacing halved)
    as ``(4 lambda_fine - lambda_coarse) / 3``.
    """
    coarse = dirichlet_eigs(assemble_dirichlet(spec, h, eta, n), m).eigenvalues
    fine = dirichlet_eigs(assemble_dirichlet(spec, h, eta, 2 * n + 1), m).eigenvalues
    out = (4 * fine - coarse) / 3
    return float(out[0]) if m == 1 else out


def richardson_ground_state(spec, h, eta=DEFAULT_ETA, n=DEFAULT_N):
    """Ground state on the ``n``-node grid, extrapolated with the ``2n + 1`` grid.

    The fine grid contains every coarse node, so the eigenvalue and the
    node values are both combined as ``(4 fine - coarse) / 3``, which removes
    the ``dx^2`` error term from the exponential tails as well.
    """
    coarse = ground_state_single_well(assemble_dirichlet(spec, h, eta, n))
    fine = ground_state_single_well(assemble_dirichlet(spec, h, eta, 2 * n + 1))
    vec = (4 * fine.eigenvectors[1::2] - coarse.eigenvectors) / 3
    val = (4 * fine.eigenvalues - coarse.eigenvalues) / 3
    meta = dict(coarse.meta, richardson=True)
    return EigenSolution(val, vec, "grid", x=coarse.x, domain=coarse.domain,
                         residuals=np.maximum(coarse.residuals, fine.residuals), meta=meta)


# ---------------------------------------------------------------------------
# log-domain one-well ground state


_ODE_TOL = 1e-12


def _theta_rhs(spec, h, lam):
    def rhs(s, y):
        sn, cs = np.sin(y[0]), np.cos(y[0])
        return [(cs * cs - (spec(s) - lam) * sn * sn) / h]
    return rhs


def _full_rhs(spec, h, lam):
    def rhs(s, y):
        sn, cs = np.sin(y[0]), np.cos(y[0])
        q = spec(s) - lam
        return [(cs * cs - q * sn * sn) / h, sn * cs * (1 + q) / h]
    return rhs


class OneWellState:
    """Ground state of the one-well Dirichlet problem in Pruefer variables.

    Writes ``phi = e^rho sin(theta)`` and ``h phi' = e^rho cos(theta)``;
    ``theta`` and ``rho`` obey first-order ODEs that are integrated from both
    Dirichlet endpoints toward ``s = 0`` with DOP853 (``rtol = atol = 1e-12``).
    The eigenvalue is the root of the angle mismatch at 0, so values such as
    ``log|phi(pi/2)|`` keep full relative accuracy however small ``phi`` is.

    Use :func:`one_well_state` for a cached instance.
    """

    def __init__(self, spec, h, eta=DEFAULT_ETA, guess=None):
        _check_eta(eta)
        if not h > 0:
            raise ParameterError(f"h must be positive, got {h}")
        self.spec, self.h, self.eta = spec, float(h), float(eta)
        self.b = np.pi - eta
        if guess is None:
            guess = richardson_ground_energy(spec, h, eta)
        self.eigenvalue = self._solve_eigenvalue(float(guess))
        self._build()

    # -- shooting
    def _theta_at_zero(self, lam):
        rhs = _theta_rhs(self.spec, self.h, lam)
        left = solve_ivp(rhs, (-self.b, 0.0), [0.0], method="DOP853", rtol=_ODE_TOL, atol=_ODE_TOL)
        right = solve_ivp(rhs, (self.b, 0.0), [np.pi], method="DOP853", rtol=_ODE_TOL, atol=_ODE_TOL)
        return left.y[0, -1] - right.y[0, -1]

    def _solve_eigenvalue(self, guess):
        f = self._theta_at_zero
        step = max(1e-9, 1e-6 * self.h)
        lo, hi = guess - step, guess + step
        flo, fhi = f(lo), f(hi)
        for _ in range(60):
            if flo < 0 < fhi:
                break
            if flo >= 0:
                lo, step = lo - 2 * step, 2 * step
                flo = f(lo)
            if fhi <= 0:
                hi, step = hi + 2 * step, 2 * step
                fhi = f(hi)
        else:
            raise RefinementError("could not bracket the one-well ground energy")
        return brentq(f, lo, hi, xtol=1e-15 * max(1.0, abs(guess)), rtol=4 * np.finfo(float).eps)

    def _build(self):
        rhs = _full_rhs(self.spec, self.h, self.eigenvalue)
        kw = dict(method="DOP853", rtol=_ODE_TOL, atol=_ODE_TOL, dense_output=True)
        left = solve_ivp(rhs, (-self.b, 0.0), [0.0, 0.0], **kw)
        right = solve_ivp(rhs, (self.b, 0.0), [np.pi, 0.0], **kw)
        if not (left.success and right.success):
            raise RefinementError("Pruefer integration failed")
        self._left, self._right = left.sol, right.sol
        th_l, rho_l = left.y[:, -1]
        th_r, rho_r = right.y[:, -1]
        self.match_residual = float(abs(th_l - th_r))
        if not (0 < th_l < np.pi and 0 < th_r < np.pi):
            raise RefinementError("Pruefer angle left (0, pi): the state has a node")
        # rescale the right branch so both branches agree at s = 0
        self._offset_right = float(rho_l - rho_r)
        top = max(np.max(left.y[1]), np.max(right.y[1]) + self._offset_right)
        width = min(0.05, 0.5 * np.sqrt(self.h))

        def dens(branch, off):
            def f(s):
                th, rho = branch(s)
                return np.exp(2 * (rho + off - top)) * np.sin(th) ** 2
            return f

        total = (composite_gauss(dens(self._left, 0.0), -self.b, 0.0, width)
                 + composite_gauss(dens(self._right, self._offset_right), 0.0, self.b, width))
        self._log_norm = float(2 * top + np.log(total))

    def _state(self, s):
        s = np.atleast_1d(np.asarray(s, dtype=float))
        if np.any(np.abs(s) > self.b * (1 + 1e-14)):
            raise ParameterError(f"s outside the Dirichlet interval [-{self.b:g}, {self.b:g}]")
        s = np.clip(s, -self.b, self.b)
        th = np.empty_like(s)
        rho = np.empty_like(s)
        neg = s <= 0
        if np.any(neg):
            th[neg], rho[neg] = self._left(s[neg])
        if np.any(~neg):
            y = self._right(s[~neg])
            th[~neg], rho[~neg] = y[0], y[1] + self._offset_right
        return th, rho

    @staticmethod
    def _shape(s, out):
        return float(out[0]) if np.ndim(s) == 0 else out

    def log_abs(self, s):
        """``log|phi(s)|`` for the normalized state (``-inf`` at the endpoints)."""
        th, rho = self._state(s)
        with np.errstate(divide="ignore"):
            out = rho + np.log(np.abs(np.sin(th))) - 0.5 * self._log_norm
        return self._shape(s, out)

    def logderiv(self, s):
        """``phi'(s) / phi(s) = cot(theta) / h``."""
        th, _ = self._state(s)
        with np.errstate(divide="ignore"):
            out = 1.0 / (np.tan(th) * self.h)
        return self._shape(s, out)

    def value(self, s):
        th, rho = self._state(s)
        return self._shape(s, np.exp(rho - 0.5 * self._log_norm) * np.sin(th))

    def deriv(self, s):
        th, rho = self._state(s)
        return self._shape(s, np.exp(rho - 0.5 * self._log_norm) * np.cos(th) / self.h)

    def reflect(self):
        """The left-well state ``s -> phi(pi - s)`` on ``(eta, 2 pi - eta)`` mod ``2 pi``."""
        return ReflectedState(self)


class ReflectedState:
    """``phi_l(s) = phi_r(pi - s)`` evaluated through a :class:`OneWellState`."""

    def __init__(self, base):
        self.base = base
        self.h, self.eta, self.eigenvalue = base.h, base.eta, base.eigenvalue
        self.match_residual = base.match_residual

    @staticmethod
    def _map(s):
        return wrap_angle(np.pi - np.asarray(s, dtype=float))

    def log_abs(self, s):
        return self.base.log_abs(self._map(s))

    def logderiv(self, s):
        return -self.base.logderiv(self._map(s))

    def value(self, s):
        return self.base.value(self._map(s))

    def deriv(self, s):
        return -self.base.deriv(self._map(s))

    def reflect(self):
        return self.base


@lru_cache(maxsize=64)
def one_well_state(spec, h, eta=DEFAULT_ETA, n=DEFAULT_N):
    """Cached :class:`OneWellState`, seeded with the Richardson grid eigenvalue."""
    return OneWellState(spec, h, eta, guess=richardson_ground_energy(spec, h, eta, n))


@dataclass(frozen=True)
class TailProfile:
    """``log|phi|`` and ``phi'/phi`` of the one-well ground state at sample points."""

    s: np.ndarray
    log_abs: np.ndarray
    logderiv: np.ndarray
    eigenvalue: float
    match_residual: float


def tail_refine(spec, h, eigval, solution, s_targets):
    """Relative-accuracy tail values of the one-well ground state.

    ``solution`` is the grid ground state (it fixes ``eta``); ``eigval`` seeds
    the shooting.  Targets must lie in the classically forbidden region
    ``V(s) > eigval``.
    """
    s = np.atleast_1d(np.asarray(s_targets, dtype=float))
    if np.any(spec(s) <= eigval):
        raise ParameterError("tail targets must satisfy V(s) > eigenvalue")
    eta = solution.meta.get("eta", DEFAULT_ETA) if solution is not None else DEFAULT_ETA
    state = OneWellState(spec, h, eta, guess=eigval)
    return TailProfile(s, state.log_abs(s), state.logderiv(s), state.eigenvalue, state.match_residual)


# ---------------------------------------------------------------------------
# evaluation and reflection


def evaluate_wavefunction(sol, s, index=0):
    """Value and derivative of eigenfunction ``index`` of ``sol`` at ``s``.

    Fourier solutions are summed exactly; grid solutions use a cubic spline
    through the nodes and the zero boundary values.
    """
    scalar = np.ndim(s) == 0
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if isinstance(sol, (OneWellState, ReflectedState)):
        val, der = sol.value(s), sol.deriv(s)
    elif sol.basis == "fourier":
        c = sol.eigenvectors[:, index]
        phase = np.exp(1j * np.outer(s, sol.k)) / np.sqrt(2 * np.pi)
        val = phase @ c
        der = phase @ (1j * sol.k * c)
    elif sol.basis == "grid":
        lo, hi = sol.domain
        if np.any((s < lo) | (s > hi)):
            raise ParameterError(f"s outside the grid domain [{lo:g}, {hi:g}]")
        spline = _grid_spline(sol, index)
        val, der = spline(s), spline(s, 1)
    else:
        raise ParameterError(f"cannot evaluate a {sol.basis!r} solution")
    if scalar:
        return val[0], der[0]
    return val, der


def _grid_spline(sol, index):
    lo, hi = sol.domain
    v = np.real_if_close(sol.eigenvectors[:, index])
    xs = np.concatenate([[lo], sol.x, [hi]])
    vs = np.concatenate([[0.0], v, [0.0]])
    return CubicSpline(xs, vs)


def reflect_left(sol):
    """The left-well eigenfunction ``U phi (s) = conj(phi(pi - s))``.

    Fourier coefficients map as ``c_k -> conj(c_k) (-1)^k``; grid solutions
    are mirrored onto ``(eta, 2 pi - eta)``.  Reflecting twice is the identity.
    """
    if isinstance(sol, (OneWellState, ReflectedState)):
        return sol.reflect()
    if sol.basis == "fourier":
        sign = np.where(sol.k % 2 == 0, 1.0, -1.0)
        vecs = np.conj(sol.eigenvectors) * sign[:, None]
        return EigenSolution(sol.eigenvalues, vecs, "fourier", k=sol.k, domain=sol.domain,
                             residuals=sol.residuals, meta=dict(sol.meta))
    if sol.basis == "grid":
        lo, hi = sol.domain
        x = (np.pi - sol.x)[::-1]
        vecs = np.conj(sol.eigenvectors[::-1])
        meta = dict(sol.meta, well="left" if sol.meta.get("well", "right") == "right" else "right")
        return EigenSolution(sol.eigenvalues, vecs, "grid", x=x, domain=(np.pi - hi, np.pi - lo),
                             residuals=sol.residuals, meta=meta)
    raise ParameterError(f"cannot reflect a {sol.basis!r} solution")


def export_wavefunction_csv(sol, s, path, index=0):
    """Write samples as CSV columns ``s, re, im, d_re, d_im``."""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    val, der = evaluate_wavefunction(sol, s, index)
    val = np.asarray(val, dtype=complex)
    der = np.asarray(der, dtype=complex)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["s", "re", "im", "d_re", "d_im"])
        for row in zip(s, val.real, val.imag, der.real, der.imag):
            w.writerow([f"{x:.17g}" for x in row])


def _jsonable(a):
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return {"re": a.real.tolist(), "im": a.imag.tolist()}
    return a.tolist()


def export_debug_json(obj, path=None):
    """Dump an operator or eigen-solution as JSON (returns the string)."""
    if isinstance(obj, CircleOperator):
        d = {"type": "circle", "h": obj.h, "xi0": obj.xi0, "K": obj.K,
             "matrix": _jsonable(obj.matrix), "vhat": _jsonable(obj.vhat)}
    elif isinstance(obj, DirichletOperator):
        d = {"type": "dirichlet", "h": obj.h, "eta": obj.eta, "n": obj.n,
             "diag": _jsonable(obj.diag), "off": _jsonable(obj.off)}
    elif isinstance(obj, EigenSolution):
        d = {"type": "eigensolution", "basis": obj.basis,
             "eigenvalues": _jsonable(obj.eigenvalues),
             "eigenvectors": _jsonable(obj.eigenvectors),
             "residuals": _jsonable(obj.residuals) if obj.residuals is not None else None,
             "k": _jsonable(obj.k) if obj.k is not None else None,
             "x": _jsonable(obj.x) if obj.x is not None else None,
             "domain": list(obj.domain), "meta": obj.meta}
    else:
        raise ParameterError(f"cannot export {type(obj).__name__}")
    text = json.dumps(d)
    if path is not None:
        with open(path, "w") as fh:
            fh.write(text)
    return text
