import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fluxlab.errors import ConfigError
from fluxlab.interaction import CSV_COLUMNS, ROUTES
from fluxlab.sweep import (
    Grid,
    SweepConfig,
    crossings,
    fit_decay,
    load_config,
    parse_config,
    parse_grid,
    read_results,
    route_log_gap,
    run_sweep,
    serialize_config,
    write_results,
)


def test_parse_grid_forms():
    assert parse_grid("0.1:0.2:3").points() == pytest.approx([0.1, 0.15, 0.2])
    assert parse_grid("0.01:1:3:log").points() == pytest.approx([0.01, 0.1, 1.0])
    assert parse_grid("0.1,0.2").points().tolist() == [0.1, 0.2]
    assert parse_grid(0.3).points().tolist() == [0.3]
    assert parse_grid([0.1, 0.3]).points().tolist() == [0.1, 0.3]
    g = Grid(values=(0.1,))
    assert parse_grid(g) is g


@pytest.mark.parametrize("text", ["0.1:0.2", "0.2:0.1:3", "0.1:0.2:0", "a,b", "0.1:0.2:3:cubic", "0.1:0.2:x"])
def test_parse_grid_errors(text):
    with pytest.raises(ConfigError):
        parse_grid(text)


grids = st.one_of(
    st.lists(st.floats(0.01, 0.99), min_size=1, max_size=4).map(lambda v: Grid(values=tuple(v))),
    st.tuples(st.floats(0.01, 0.5), st.floats(0.0, 0.4), st.integers(1, 50), st.booleans()).map(
        lambda t: Grid(lo=t[0], hi=t[0] + t[1], count=t[2], log=t[3])),
)
configs = st.builds(
    SweepConfig,
    potential=st.sampled_from(["sin2", "scaled_sin2", "tilted_sin2"]),
    params=st.lists(st.floats(-0.9, 3.0), max_size=2).map(tuple),
    h_grid=grids,
    xi0_grid=st.lists(st.floats(-1, 1), min_size=1, max_size=5).map(lambda v: Grid(values=tuple(v))),
    routes=st.lists(st.sampled_from(ROUTES), min_size=1, max_size=3, unique=True).map(tuple),
    K=st.one_of(st.none(), st.integers(16, 256)),
    n=st.integers(512, 9000),
    eta=st.floats(0.05, 0.7),
    quad_tol=st.floats(1e-14, 1e-6),
    jobs=st.integers(1, 8),
    out=st.one_of(st.none(), st.sampled_from(["out.csv", "dir with space/r.json"])),
    format=st.sampled_from(["csv", "json"]),
)


@settings(max_examples=100, deadline=None)
@given(configs)
def test_config_round_trip(cfg):
    again = parse_config(serialize_config(cfg), env={})
    assert again == cfg
    assert serialize_config(again) == serialize_config(cfg)


def test_config_precedence(tmp_path):
    text = 'potential = "tilted_sin2"\nparams = [0.3]\nquad_tol = 1e-10\nh_grid = "0.1:0.2:3"\n'
    cfg = parse_config(text, env={})
    assert cfg.quad_tol == 1e-10 and cfg.params == (0.3,) and cfg.h_grid.count == 3
    assert parse_config(text, env={"FLUXLAB_QUAD_TOL": "1e-9"}).quad_tol == 1e-9
    over = parse_config(text, {"quad_tol": 1e-8, "K": None}, env={"FLUXLAB_QUAD_TOL": "1e-9"})
    assert over.quad_tol == 1e-8 and over.K is None
    path = tmp_path / "c.toml"
    path.write_text(text)
    assert load_config(path, env={}) == cfg


@pytest.mark.parametrize("text,overrides", [
    ("bogus = 1", None),
    ("[table]\nx = 1", None),
    ("h_grid = ", None),
    ('h_grid = "0.5:2:3"', None),
    ('routes = []', None),
    ('routes = ["exact"]', None),
    ('format = "xml"', None),
    ("eta = 1.0", None),
    ("n = 100", None),
    ("jobs = 0", None),
    ("quad_tol = -1", None),
    ("K = 'many'", None),
    (None, {"unknown": 1}),
])
def test_config_errors(text, overrides):
    with pytest.raises(ConfigError):
        parse_config(text, overrides, env={})


def test_config_env_must_be_numeric():
    with pytest.raises(ConfigError):
        parse_config(None, env={"FLUXLAB_QUAD_TOL": "tight"})
    with pytest.raises(ConfigError):
        load_config("/nonexistent/config.toml")


def test_small_sweep_is_deterministic(tmp_path):
    over = {"h_grid": "0.1,0.12,0.15", "xi0_grid": "0:0.06:4"}
    a = write_results(run_sweep(parse_config(None, dict(over, jobs=1), env={})))
    b = write_results(run_sweep(parse_config(None, dict(over, jobs=3), env={})))
    assert a == b
    lines = a.splitlines()
    assert lines[0].split(",") == list(CSV_COLUMNS) and len(lines) == 13
    table = read_results(a)
    keys = list(zip(table["h"], table["xi0"]))
    assert keys == sorted(keys)
    path = tmp_path / "r.json"
    rows = run_sweep(parse_config(None, dict(over, routes="leading"), env={}))
    write_results(rows, "json", path)
    data = json.loads(path.read_text())
    assert len(data) == 12 and data[0]["gap_direct"] is None
    with pytest.raises(ConfigError):
        write_results(rows, "xml")


def test_flux_periodic_columns():
    cfg = parse_config(None, {"h_grid": "0.12", "xi0_grid": "0:0.24:97"}, env={})
    table = read_results(write_results(run_sweep(cfg)))
    assert np.allclose(np.diff(table["xi0"]), 0.0025)
    shift = 48  # xi0 + h
    for col, tol in (("gap_direct", 1e-4), ("gap_wronskian", 1e-8), ("gap_leading", 1e-9)):
        a, b = table[col][:-shift], table[col][shift:]
        ok = np.isfinite(a) & np.isfinite(b) & (a > 1e-4 * np.nanmax(a))
        assert np.count_nonzero(ok) > 30
        assert np.allclose(a[ok], b[ok], rtol=tol, atol=0)


def test_below_floor_rows_for_small_h():
    cfg = parse_config(None, {"h_grid": "0.05,0.1", "xi0_grid": "0"}, env={})
    rows = run_sweep(cfg)
    assert "below_floor" in rows[0].flags and np.isnan(rows[0].gap_direct)
    assert rows[1].flags == () and rows[1].gap_direct > 0


def test_fit_decay_exact_data():
    h = np.geomspace(0.05, 0.2, 6)
    y = 1.3 + 0.5 * np.log(h) - 2.0 / h
    fit = fit_decay(h, y)
    assert fit.slope == pytest.approx(-2.0, rel=1e-12)
    assert fit.intercept == pytest.approx(1.3, rel=1e-12)
    assert fit.r2 == pytest.approx(1.0)
    raw = fit_decay(h, y, prefactor_power=0.0)
    assert raw.slope != pytest.approx(-2.0, rel=1e-3)
    y[2] = np.nan
    assert fit_decay(h, y).npoints == 5
    with pytest.raises(ConfigError):
        fit_decay([0.1, 0.1], [1.0, 2.0])


def test_route_log_gap():
    table = {"gap_direct": np.array([1.0, np.nan, 0.0]), "gap_wronskian": np.array([np.e, 1, 1]),
             "log10_gap_leading": np.array([-1.0, 0.0, 1.0])}
    assert np.array_equal(route_log_gap(table, "direct")[[0, 2]], [0.0, -np.inf])
    assert route_log_gap(table, "wronskian")[0] == pytest.approx(1.0)
    assert route_log_gap(table, "leading")[0] == pytest.approx(-np.log(10))
    with pytest.raises(ConfigError):
        route_log_gap(table, "other")


def test_read_results_errors(tmp_path):
    with pytest.raises(ConfigError):
        read_results(",".join(CSV_COLUMNS) + "\n")
    with pytest.raises(ConfigError):
        read_results("h,xi0\n0.1,0\n")
    with pytest.raises(ConfigError):
        read_results(str(tmp_path / "missing.csv"))


def test_crossings_synthetic():
    h = 0.12
    x = np.linspace(0, 0.24, 97)
    g = np.abs(np.cos(np.pi * x / h)) + 0.01
    with np.errstate(divide="ignore"):
        lead = np.log(np.abs(np.cos(np.pi * x / h)))
    rep = crossings(x, {"direct": g}, h, lead)
    assert rep.analytic == pytest.approx((0.06, 0.18))
    assert len(rep.minima) == 2
    for m, target in zip(rep.minima, (0.06, 0.18)):
        assert abs(m.xi0 - target) <= x[1] - x[0]
    assert rep.to_dict()["minima"][0]["route"] == "direct"


def test_crossings_below_floor_runs():
    x = np.linspace(0, 0.24, 25)
    g = np.abs(np.cos(np.pi * x / 0.12))
    g[5:8] = np.nan
    rep = crossings(x, {"direct": g}, 0.12)
    floor = [m for m in rep.minima if m.below_floor]
    assert len(floor) == 1 and floor[0].xi0 == pytest.approx(x[6])
    assert rep.analytic == ()


def test_crossings_flat_gap_has_no_minima():
    x = np.linspace(0, 0.24, 97)
    g = 1 + 0.02 * np.cos(2 * np.pi * x / 0.12)
    lead = np.log(g)
    rep = crossings(x, {"direct": g, "wronskian": g}, 0.12, lead)
    assert rep.minima == () and rep.analytic == ()
