import numpy as np
import pytest
from hypothesis import given, strategies as st

from stagmuscl.oracle import (
    NoShockError,
    VacuumError,
    barotropic_shock_state,
    euler_shock_state,
    exact_riemann,
    jump_residuals,
    manufactured_solution,
)


def test_riemann_test3_star_state():
    # published star values of the strong-shock tube (left p = 1000, right p = 0.01)
    sol = exact_riemann(1.4, (1.0, 0.0, 1000.0), (1.0, 0.0, 0.01))
    assert sol.p_star == pytest.approx(460.894, rel=1e-5)
    assert sol.u_star == pytest.approx(19.5975, rel=1e-5)
    assert sol.rho_star_left == pytest.approx(0.5751, rel=1e-4)
    assert sol.rho_star_right == pytest.approx(5.99924, rel=1e-5)
    assert (sol.left_wave, sol.right_wave) == ("rarefaction", "shock")


def test_sod_star_state():
    sol = exact_riemann(1.4, (1.0, 0.0, 1.0), (0.125, 0.0, 0.1))
    assert sol.p_star == pytest.approx(0.30313, rel=1e-4)
    assert sol.u_star == pytest.approx(0.92745, rel=1e-4)


def test_riemann_sampling_regions():
    sol = exact_riemann(1.4, (1.0, 0.0, 1.0), (0.125, 0.0, 0.1))
    rho, u, p = sol.sample([-10.0, 10.0, 0.5, 1.5])
    assert (rho[0], u[0], p[0]) == (1.0, 0.0, 1.0)
    assert (rho[1], u[1], p[1]) == (0.125, 0.0, 0.1)
    # between contact and shock
    assert rho[3] == pytest.approx(sol.rho_star_right)
    assert p[2] == pytest.approx(sol.p_star)


@given(
    st.floats(0.1, 10), st.floats(-2, 2), st.floats(0.1, 10),
    st.floats(0.1, 10), st.floats(-2, 2), st.floats(0.1, 10), st.floats(1.1, 3.0),
)
def test_riemann_star_state_consistency(rl, ul, pl, rr, ur, pr, gamma):
    try:
        sol = exact_riemann(gamma, (rl, ul, pl), (rr, ur, pr))
    except VacuumError:
        return
    # the rarefaction fan is continuous at its edges
    xi = np.linspace(-20, 20, 4001)
    rho, u, p = sol.sample(xi)
    assert np.all(rho > 0) and np.all(p > 0)
    for side, state in ((-1, (rl, ul, pl)), (1, (rr, ur, pr))):
        wave = sol.left_wave if side < 0 else sol.right_wave
        rho_s = sol.rho_star_left if side < 0 else sol.rho_star_right
        if wave == "shock":
            # Rankine-Hugoniot across the shock with the shock speed from mass
            r0, u0, p0 = state
            s = (rho_s * sol.u_star - r0 * u0) / (rho_s - r0)
            res = jump_residuals(((r0, u0, p0), (rho_s, sol.u_star, sol.p_star)), s,
                                 lambda r, q: q,
                                 lambda r, v, q: q / (gamma - 1) + 0.5 * r * v**2)
            scale = max(r0 * u0**2 + p0, rho_s * sol.u_star**2 + sol.p_star) * (1 + abs(s))
            assert np.all(np.abs(res) <= 1e-8 * scale * (1 + abs(sol.u_star)))
        else:
            # isentropic: p / rho^gamma constant
            assert sol.p_star / rho_s**gamma == pytest.approx(state[2] / state[0] ** gamma, rel=1e-8)


def test_riemann_errors():
    with pytest.raises(VacuumError):
        exact_riemann(1.4, (1.0, -20.0, 0.1), (1.0, 20.0, 0.1))
    with pytest.raises(ValueError):
        exact_riemann(1.0, (1.0, 0.0, 1.0), (1.0, 0.0, 1.0))
    with pytest.raises(ValueError):
        exact_riemann(1.4, (0.0, 0.0, 1.0), (1.0, 0.0, 1.0))


def test_barotropic_shock_values():
    rho_b, u_b, omega = barotropic_shock_state(4.905, 0.2, 2.0)
    assert omega == pytest.approx(2.0 * np.sqrt(2 * 4.905 * 0.2))
    assert rho_b == pytest.approx(0.2 * (np.sqrt(33.0) - 1) / 2)
    res = jump_residuals(((rho_b, u_b), (0.2, 0.0)), omega, lambda r: 4.905 * r**2)
    np.testing.assert_allclose(res, 0.0, atol=1e-12)


@given(st.floats(0.1, 10), st.floats(0.1, 5), st.floats(1.0, 10))
def test_barotropic_rankine_hugoniot(a, rho0, mach):
    rho_b, u_b, omega = barotropic_shock_state(a, rho0, mach)
    res = jump_residuals(((rho_b, u_b), (rho0, 0.0)), omega, lambda r: a * r**2)
    scale = rho_b * u_b**2 + a * rho_b**2 + omega * rho_b
    assert np.all(np.abs(res) <= 1e-12 * scale)


@given(st.floats(1.1, 3), st.floats(0.1, 5), st.floats(0.1, 5), st.floats(1.0, 10))
def test_euler_rankine_hugoniot(gamma, rho0, p0, mach):
    rho_b, u_b, p_b, omega = euler_shock_state(gamma, rho0, p0, mach)
    energy = lambda r, v, q: q / (gamma - 1) + 0.5 * r * v**2  # noqa: E731
    res = jump_residuals(((rho_b, u_b, p_b), (rho0, 0.0, p0)), omega, lambda r, q: q, energy)
    scale = (energy(rho_b, u_b, p_b) + p_b) * (abs(u_b) + omega)
    assert np.all(np.abs(res) <= 1e-12 * scale)


def test_shock_errors():
    with pytest.raises(NoShockError):
        barotropic_shock_state(1.0, 1.0, 0.5)
    with pytest.raises(NoShockError):
        euler_shock_state(1.4, 1.0, 1.0, 0.9)
    with pytest.raises(ValueError):
        barotropic_shock_state(1.0, 1.0, 2.0, gamma=1.4)


@pytest.mark.parametrize("family", ["travelling", "standing"])
def test_manufactured_sources_vanish_for_steady_rest(family):
    sol = manufactured_solution("barotropic", (1, 1), (0.0, 0.0), family=family)
    pts = np.random.default_rng(0).uniform(size=(20, 2))
    np.testing.assert_allclose(sol.mass_source(pts, 0.3), 0.0, atol=1e-14)
    np.testing.assert_allclose(sol.momentum_source(pts, 0.3), 0.0, atol=1e-14)


@pytest.mark.parametrize("family", ["travelling", "standing"])
def test_manufactured_mass_source_by_finite_differences(family):
    sol = manufactured_solution("barotropic", (1, 2), (0.1, 0.5), a=2.0, mu=0.01, family=family)
    pts = np.array([[0.3, 0.7], [0.1, 0.45]])
    t, eps = 0.2, 1e-5

    def flux(p, i):
        return sol.density(p, t) * sol.velocity(p, t)[:, i]

    drho = (sol.density(pts, t + eps) - sol.density(pts, t - eps)) / (2 * eps)
    div = sum((flux(pts + eps * np.eye(2)[i], i) - flux(pts - eps * np.eye(2)[i], i)) / (2 * eps) for i in range(2))
    np.testing.assert_allclose(sol.mass_source(pts, t), drho + div, rtol=1e-6, atol=1e-8)


def test_manufactured_walls():
    sol = manufactured_solution("barotropic", (1, 1), (0.1, 1.0), family="standing")
    s = np.linspace(0, 1, 7)
    for pts, i in ((np.c_[np.zeros(7), s], 0), (np.c_[np.ones(7), s], 0), (np.c_[s, np.zeros(7)], 1)):
        np.testing.assert_allclose(sol.velocity(pts, 0.37)[:, i], 0.0, atol=1e-14)


@pytest.mark.parametrize(
    "kwargs",
    [dict(model="euler"), dict(dim=3), dict(wavenumbers=(1,)), dict(amplitudes=(1.5, 0.1)),
     dict(viscous_form="other"), dict(family="spiral")],
)
def test_manufactured_errors(kwargs):
    args = dict(model="barotropic", wavenumbers=(1, 1), amplitudes=(0.1, 0.1))
    args.update(kwargs)
    with pytest.raises(ValueError):
        manufactured_solution(args.pop("model"), args.pop("wavenumbers"), args.pop("amplitudes"), **args)
