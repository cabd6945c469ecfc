import numpy as np
import pytest

from stagmuscl.harness import ConfigError, build_case, parse_config, preset
from stagmuscl.harness.cases import build_grid


@pytest.mark.parametrize("name", ["riemann_test3", "riemann_test3_stripe", "cavity_re5000_128", "backward_facing_step",
                                  "barotropic_shock_1d", "euler_shock_1d", "manufactured_2d", "manufactured_1d"])
def test_presets_build(name):
    cfg = preset(name)
    dim = cfg.get("grid", "dim")
    case = build_case(cfg, cells=(8,) * dim if not cfg.get("grid", "stripe") else (8,))
    case.state.check()
    assert case.final_time > 0
    assert case.state.velocity.shape == (case.grid.n_faces, dim)


def test_stripe_grid_is_one_row_of_squares():
    g = build_grid(preset("riemann_test3_stripe"), (100,))
    assert g.shape == (100, 1)
    assert g.h[0] == pytest.approx(g.h[1])
    assert g.boundary_tags[2:] == ("slip_wall", "slip_wall")


def test_riemann_case_exact_matches_initial_data():
    case = build_case(preset("riemann_test3"), cells=(10,))
    ex = case.exact(1e-12)
    np.testing.assert_allclose(ex["rho"], case.state.rho)
    np.testing.assert_allclose(ex["p"], case.state.pressure)


def test_shock_case_boundary_and_position():
    case = build_case(preset("barotropic_shock_1d"), cells=(50,))
    bc = case.model.boundary
    assert bc.density["x-"] == pytest.approx(0.2 * (np.sqrt(33) - 1) / 2)
    omega = 2 * np.sqrt(2 * 4.905 * 0.2)
    assert case.shock_position(0.25) == pytest.approx(omega * 0.25)
    euler = build_case(preset("euler_shock_1d"), cells=(50,))
    assert "x-" in euler.model.boundary.internal_energy


def test_manufactured_case_has_sources():
    case = build_case(preset("manufactured_2d"), cells=(8, 8))
    m, mom = case.model.source(0.0)
    assert m.shape == (64,) and mom.shape == (case.grid.n_faces, 2)
    ex = case.exact(0.0)
    np.testing.assert_allclose(ex["u"], case.state.velocity)


def test_scheme_override():
    case = build_case(preset("riemann_test3"), cells=(10,), scheme="upwind")
    assert case.model.params.scheme == "upwind"


def test_dt_over_h():
    case = build_case(preset("riemann_test3"), cells=(100,))
    assert case.model.dt == pytest.approx(1e-4)


@pytest.mark.parametrize(
    "override,match",
    [
        ({"initial.kind": "vortex"}, "initial kind"),
        ({"case.model": "barotropic"}, "physics.a"),
        ({"grid.dim": "3"}, "grid.dim"),
        ({"grid.cells": "10, 10"}, "entries"),
        ({"scheme.scheme": "weno"}, "scheme"),
        ({"scheme.xi_plus": "3"}, "xi_plus"),
        ({"initial.left": "1, 0"}, "rho, u, p"),
        ({"grid.x-": "periodic"}, "tag"),
        ({"grid.stripe": "true"}, "two-dimensional"),
        ({"scheme.time_stepping": "rk4"}, "time stepping"),
    ],
)
def test_invalid_cases(override, match):
    with pytest.raises(ConfigError, match=match):
        build_case(preset("riemann_test3").with_overrides(override))


def test_missing_required_keys():
    with pytest.raises(ConfigError, match="case.model"):
        build_case(parse_config("[grid]\ncells = 4\n"))
    cfg = parse_config("[case]\nmodel = incompressible\nfinal_time = 1\n[grid]\ndim = 2\ncells = 4\n[initial]\nkind = lid_cavity\n")
    with pytest.raises(ConfigError, match="dt"):
        build_case(cfg)


def test_uniform_case_with_moving_walls():
    cfg = parse_config(
        "[case]\nmodel = barotropic\nfinal_time = 0.1\n[grid]\ndim = 1\ncells = 8\n"
        "[physics]\na = 1\n[scheme]\ndt = 0.01\n[initial]\nkind = uniform\nrho = 2\nvelocity = 0.5\n"
    )
    case = build_case(cfg)
    assert case.model.boundary.velocity == {"x-": (0.5,), "x+": (0.5,)}
    np.testing.assert_allclose(case.state.pressure, 4.0)
