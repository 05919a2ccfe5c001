import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import expit

from fluxlab.agmon import agmon_constants, phase_derivative, phase_profile
from fluxlab.cutoff import build_cutoff
from fluxlab.errors import ParameterError
from fluxlab.potential import from_function
from fluxlab.spectral import richardson_ground_energy
from fluxlab.wkb import (
    build_quasimode,
    export_quasimode_csv,
    transport_amplitude,
    wkb_residual,
    wkb_vs_numeric,
)


def _smooth_step(x):
    """0 for x <= 0, 1 for x >= 1, e^{-1/x} glue in between."""
    x = np.clip(np.asarray(x, dtype=float), 1e-12, 1 - 1e-12)
    return expit(1 / (1 - x) - 1 / x)


# exactly harmonic for |s| <= 1, equal to sin^2 for |s| >= 2
HARMONIC = from_function(
    "harmonic_core",
    lambda s: (1 - _smooth_step(np.abs(s) - 1)) * np.asarray(s) ** 2 + _smooth_step(np.abs(s) - 1) * np.sin(s) ** 2,
)


def test_transport_amplitude_values(sin2):
    assert transport_amplitude(sin2, 0.0) == pytest.approx(np.pi**-0.25, rel=1e-14)
    assert transport_amplitude(sin2, np.pi / 2) == pytest.approx(np.pi**-0.25 * np.sqrt(2), rel=1e-12)
    # independent oracle: adaptive quadrature of the -tan(s/2) integrand
    for s in (-2.0, 0.7, 2.3):
        expo = quad(lambda x: -np.tan(x / 2), 0.0, s, epsabs=1e-14)[0]
        assert transport_amplitude(sin2, s) == pytest.approx(np.pi**-0.25 * np.exp(-0.5 * expo), rel=1e-11)


@pytest.mark.parametrize("fixture", ["sin2", "tilted"])
def test_transport_ode_residual(request, fixture):
    spec = request.getfixturevalue(fixture)
    kap = agmon_constants(spec).kappa
    step = 1e-5
    s = np.linspace(-2.4, 2.4, 20) + 0.013
    a = transport_amplitude(spec, s)
    da = (transport_amplitude(spec, s + step) - transport_amplitude(spec, s - step)) / (2 * step)
    dphi = phase_derivative(spec, s)
    d2phi = (phase_derivative(spec, s + step) - phase_derivative(spec, s - step)) / (2 * step)
    residual = 2 * dphi * da + d2phi * a - kap * a
    assert np.max(np.abs(residual)) <= 1e-8


@pytest.mark.parametrize("fixture", ["sin2", "tilted"])
def test_eikonal(request, fixture):
    spec = request.getfixturevalue(fixture)
    s = np.linspace(-3.1, 3.1, 512)
    assert np.max(np.abs(phase_derivative(spec, s) ** 2 - spec(s))) <= 1e-10
    step = 1e-5
    fd = (phase_profile(spec, s[1:-1] + step) - phase_profile(spec, s[1:-1] - step)) / (2 * step)
    assert np.allclose(np.abs(fd), np.sqrt(spec(s[1:-1])), atol=1e-8)


@pytest.mark.parametrize("fixture", ["sin2", "tilted"])
def test_amplitude_bridge(request, fixture):
    spec = request.getfixturevalue(fixture)
    c = agmon_constants(spec)
    root = np.sqrt(np.pi / c.kappa)
    assert transport_amplitude(spec, np.pi / 2) ** 2 * root == pytest.approx(c.A_u, rel=1e-8)
    assert transport_amplitude(spec, -np.pi / 2) ** 2 * root == pytest.approx(c.A_d, rel=1e-8)


def test_quasimode_basics(sin2):
    q = build_quasimode(sin2, 0.1)
    assert q.mu == pytest.approx(0.1)
    assert q.eval(0.0) == pytest.approx(0.1**-0.25 * np.pi**-0.25, rel=1e-14)
    assert q.deriv(np.pi / 2) < 0
    assert abs(q.norm_squared() - 1) <= 0.1
    s = np.linspace(-q.cutoff.plateau, q.cutoff.plateau, 101)
    assert np.all(q(s) > 0)
    assert q.eval(np.pi - 0.1) == 0.0
    with pytest.raises(ParameterError):
        build_quasimode(sin2, 0.0)
    with pytest.raises(ParameterError):
        q.eval(4.0)


def test_quasimode_norm_improves(sin2):
    errs = [abs(build_quasimode(sin2, h).norm_squared() - 1) for h in (0.2, 0.1, 0.05)]
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("profile", ["exp_bump", "poly_smooth"])
def test_analytic_derivatives_match_differences(tilted, profile):
    q = build_quasimode(tilted, 0.3, build_cutoff(0.3, profile))
    s = np.linspace(-2.7, 2.7, 37) + 0.0071
    step = 1e-5
    d1 = (q.eval(s + step) - q.eval(s - step)) / (2 * step)
    d2 = (q.deriv(s + step) - q.deriv(s - step)) / (2 * step)
    scale = np.max(np.abs(q.eval(s)))
    assert np.allclose(q.deriv(s), d1, atol=1e-6 * scale / 0.3)
    assert np.allclose(q.second_deriv(s), d2, atol=1e-5 * scale / 0.09)


def test_residual_scaling(sin2):
    r1, r2 = wkb_residual(sin2, 0.2), wkb_residual(sin2, 0.1)
    assert 0.15 <= r2 / r1 <= 0.40


def test_residual_vanishes_at_harmonic_minimum():
    q = build_quasimode(HARMONIC, 0.1)
    s = np.array([0.0])
    vals = q._eval_all(s, 2)
    res = -0.01 * vals[2] + (HARMONIC(s) - q.mu) * vals[0]
    assert abs(res[0]) <= 1e-12 * vals[0][0]
    assert wkb_residual(HARMONIC, 0.1, K_compact=(-0.9, 0.9)) <= 1e-8


def test_residual_grows_toward_cutoff(sin2):
    inner = wkb_residual(sin2, 0.1, K_compact=(-1.0, 1.0))
    outer = wkb_residual(sin2, 0.1, K_compact=(-2.5, 2.5))
    assert np.isfinite(outer) and outer > inner
    with pytest.raises(ParameterError):
        wkb_residual(sin2, 0.1, K_compact=(-2.8, 2.8))
    with pytest.raises(ParameterError):
        wkb_residual(sin2, 0.1, K_compact=(1.0, -1.0))


def test_wkb_vs_numeric_examples(sin2):
    c = wkb_vs_numeric(sin2, 0.2, (-1.8, 1.8))
    assert np.isfinite(c.err_value) and c.err_value <= 0.5
    assert c.err_at_zero <= 1e-12
    half = wkb_vs_numeric(sin2, 0.1, (-1.8, 1.8))
    assert 0.3 <= half.err_value / c.err_value <= 0.7
    assert 0.3 <= half.err_deriv / c.err_deriv <= 0.7
    with pytest.raises(ParameterError):
        wkb_vs_numeric(sin2, 0.2, (-1.8, 1.8), derivative="other")


def test_quasi_eigenvalue_fit(sin2):
    hs = np.array([0.05, 0.1, 0.2])
    lam = np.array([richardson_ground_energy(sin2, h) for h in hs])
    C = np.max(np.abs(lam - hs) / hs**1.5)
    assert C <= 2


def test_export_quasimode_csv(tmp_path, sin2):
    q = build_quasimode(sin2, 0.2)
    s = np.array([-3.0, 0.0, 1.0])
    export_quasimode_csv(q, s, tmp_path / "q.csv")
    rows = np.genfromtxt(tmp_path / "q.csv", delimiter=",", names=True)
    assert rows.dtype.names == ("s", "phase", "amplitude", "psi", "dpsi")
    assert np.isnan(rows["phase"][0]) and rows["psi"][0] == 0.0
    assert rows["psi"][1] == pytest.approx(q.eval(0.0), rel=1e-15)
    assert rows["phase"][2] == pytest.approx(1 - np.cos(1.0))
