import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fluxlab.errors import DegenerateWellError, ParameterError
from fluxlab.potential import (
    builtin_potential,
    from_function,
    kappa,
    load_potential_csv,
    tabulated_potential,
    taylor_at_zero,
    validate_double_well,
)


def test_builtin_values():
    assert builtin_potential("sin2")(np.pi / 2) == pytest.approx(1.0)
    assert builtin_potential("scaled_sin2", [2])(np.pi / 2) == pytest.approx(2.0)
    t = builtin_potential("tilted_sin2", [0.3])
    assert t(np.pi / 2) == pytest.approx(1.3)
    assert t(-np.pi / 2) == pytest.approx(0.7)
    assert not t.is_even
    assert builtin_potential("tilted_sin2", [0.0]).is_even


@pytest.mark.parametrize("name,params", [("scaled_sin2", [-1.0]), ("scaled_sin2", []),
                                         ("tilted_sin2", [1.5]), ("sin2", [1.0]), ("nope", [])])
def test_bad_parameters(name, params):
    with pytest.raises(ParameterError):
        builtin_potential(name, params)


@settings(max_examples=50, deadline=None)
@given(st.floats(-3.1, 3.1), st.sampled_from([("sin2", ()), ("scaled_sin2", (0.7,)), ("tilted_sin2", (-0.4,))]))
def test_analytic_derivatives_match_differences(s, named):
    spec = builtin_potential(*named)
    step = 1e-4
    d1 = (spec(s + step) - spec(s - step)) / (2 * step)
    d2 = (spec.d1(s + step) - spec.d1(s - step)) / (2 * step)
    assert spec.d1(s) == pytest.approx(d1, abs=1e-7)
    assert spec.d2(s) == pytest.approx(d2, abs=1e-7)


def test_difference_fallback_derivatives():
    spec = from_function("plain", lambda s: np.sin(s) ** 2)
    s = np.linspace(-3, 3, 41)
    assert np.allclose(spec.d1(s), np.sin(2 * s), atol=1e-9)
    assert np.allclose(spec.d2(s), 2 * np.cos(2 * s), atol=1e-8)
    assert spec.is_even
    assert not spec.analytic


@pytest.mark.parametrize("named", [("sin2", ()), ("scaled_sin2", (2.0,)), ("tilted_sin2", (0.3,))])
def test_builtins_validate(named):
    report = validate_double_well(builtin_potential(*named))
    assert report.passed, report.to_dict()


def test_quartic_wells_are_degenerate():
    report = validate_double_well(from_function("sin4", lambda s: np.sin(s) ** 4))
    failed = {c.name for c in report.checks if not c.ok}
    assert not report.passed
    assert {"nondegenerate_0", "nondegenerate_pi"} <= failed


def test_validation_failures_are_reported_not_raised():
    zero = validate_double_well(from_function("zero", lambda s: 0 * s))
    assert not zero.passed
    four = validate_double_well(from_function("four", lambda s: np.sin(2 * s) ** 2))
    assert "two_minima" in {c.name for c in four.checks if not c.ok}
    skew = validate_double_well(from_function("skew", lambda s: np.sin(s) ** 2 * (1 + 0.3 * np.cos(s))))
    assert {"reflection", "curvature_match"} <= {c.name for c in skew.checks if not c.ok}
    d = skew.to_dict()
    assert d["passed"] is False and all(isinstance(c["residual"], float) for c in d["checks"])


def test_kappa():
    assert kappa(builtin_potential("sin2")) == pytest.approx(1.0)
    assert kappa(builtin_potential("scaled_sin2", [2])) == pytest.approx(np.sqrt(2))
    with pytest.raises(DegenerateWellError):
        kappa(from_function("sin4", lambda s: np.sin(s) ** 4))


def test_taylor_fit_matches_analytic():
    spec = builtin_potential("tilted_sin2", [0.3])
    plain = from_function("plain", spec.eval)
    assert np.allclose(taylor_at_zero(plain), taylor_at_zero(spec), atol=1e-6)


def test_tabulated_potential(tmp_path):
    s = -np.pi + 2 * np.pi * np.arange(4096) / 4096
    spec = tabulated_potential(s, np.sin(s) ** 2)
    x = np.linspace(-3, 3, 101)
    assert np.allclose(spec(x), np.sin(x) ** 2, atol=1e-10)
    assert np.allclose(spec.d2(x), 2 * np.cos(2 * x), atol=1e-4)
    assert spec.is_even
    assert validate_double_well(spec, tol=1e-8).passed
    path = tmp_path / "v.csv"
    np.savetxt(path, np.column_stack([s, np.sin(s) ** 2]), delimiter=",", header="s,V", comments="")
    loaded = load_potential_csv(path)
    assert np.allclose(loaded(x), spec(x))
    with pytest.raises(ParameterError):
        tabulated_potential(s[:100], np.sin(s[:100]) ** 2)
    with pytest.raises(ParameterError):
        load_potential_csv(tmp_path / "missing.csv")
