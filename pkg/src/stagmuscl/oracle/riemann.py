"""Exact solution of the Riemann problem for the ideal-gas Euler equations."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq


class VacuumError(ValueError):
    """The data generate a vacuum; the solution has no star region."""


@dataclass(frozen=True)
class RiemannSolution:
    """Star state, wave types and a self-similar sampler.

    ``sample(xi)`` returns ``(rho, u, p)`` at ``xi = (x - x0) / t``.
    """

    gamma: float
    left: tuple[float, float, float]
    right: tuple[float, float, float]
    p_star: float
    u_star: float
    rho_star_left: float
    rho_star_right: float
    left_wave: str
    right_wave: str

    def _side(self, xi, rho_k, u_k, p_k, sign):
        """Sample one side; sign = -1 for the left wave, +1 for the right one."""
        g = self.gamma
        c_k = np.sqrt(g * p_k / rho_k)
        ps, us = self.p_star, self.u_star
        rho_s = self.rho_star_left if sign < 0 else self.rho_star_right
        rho = np.empty_like(xi)
        u = np.empty_like(xi)
        p = np.empty_like(xi)
        wave = self.left_wave if sign < 0 else self.right_wave
        if wave == "shock":
            s = u_k + sign * c_k * np.sqrt((g + 1) / (2 * g) * ps / p_k + (g - 1) / (2 * g))
            outer = sign * (xi - s) > 0
            rho[outer], u[outer], p[outer] = rho_k, u_k, p_k
            rho[~outer], u[~outer], p[~outer] = rho_s, us, ps
            return rho, u, p
        c_s = c_k * (ps / p_k) ** ((g - 1) / (2 * g))
        head = u_k + sign * c_k
        tail = us + sign * c_s
        outer = sign * (xi - head) > 0
        inner = sign * (xi - tail) < 0
        fan = ~outer & ~inner
        rho[outer], u[outer], p[outer] = rho_k, u_k, p_k
        rho[inner], u[inner], p[inner] = rho_s, us, ps
        xf = xi[fan]
        uf = 2 / (g + 1) * (-sign * c_k + (g - 1) / 2 * u_k + xf)
        cf = 2 / (g + 1) * c_k - sign * (g - 1) / (g + 1) * (u_k - xf)
        rho[fan] = rho_k * (cf / c_k) ** (2 / (g - 1))
        u[fan] = uf
        p[fan] = p_k * (cf / c_k) ** (2 * g / (g - 1))
        return rho, u, p

    def sample(self, xi):
        xi = np.atleast_1d(np.asarray(xi, dtype=float))
        left = xi < self.u_star
        rho, u, p = (np.empty_like(xi) for _ in range(3))
        for mask, state, sign in ((left, self.left, -1), (~left, self.right, 1)):
            r, v, q = self._side(xi[mask], *state, sign)
            rho[mask], u[mask], p[mask] = r, v, q
        return rho, u, p

    def sample_xt(self, x, t, x0=0.5):
        return self.sample((np.asarray(x, dtype=float) - x0) / t)


def _wave_function(p, rho_k, p_k, gamma):
    """f_K(p) and its derivative for one side."""
    a = 2 / ((gamma + 1) * rho_k)
    b = (gamma - 1) / (gamma + 1) * p_k
    c_k = np.sqrt(gamma * p_k / rho_k)
    if p > p_k:
        q = np.sqrt(a / (p + b))
        return (p - p_k) * q
    return 2 * c_k / (gamma - 1) * ((p / p_k) ** ((gamma - 1) / (2 * gamma)) - 1)


def exact_riemann(gamma: float, left, right, tol: float = 1e-12) -> RiemannSolution:
    """Solve the ideal-gas Riemann problem between ``left`` and ``right`` (rho, u, p)."""
    rho_l, u_l, p_l = (float(v) for v in left)
    rho_r, u_r, p_r = (float(v) for v in right)
    if gamma <= 1:
        raise ValueError("gamma must exceed 1")
    if min(rho_l, rho_r, p_l, p_r) <= 0:
        raise ValueError("densities and pressures must be positive")
    c_l, c_r = np.sqrt(gamma * p_l / rho_l), np.sqrt(gamma * p_r / rho_r)
    du = u_r - u_l
    if 2 / (gamma - 1) * (c_l + c_r) <= du:
        raise VacuumError("the initial data generate a vacuum")

    def f(p):
        return _wave_function(p, rho_l, p_l, gamma) + _wave_function(p, rho_r, p_r, gamma) + du

    lo, hi = 1e-14 * min(p_l, p_r), max(p_l, p_r)
    while f(hi) < 0:
        hi *= 10.0
    if f(lo) > 0:
        raise VacuumError("the star pressure is not positive")
    p_star = brentq(f, lo, hi, xtol=1e-300, rtol=max(tol, 4 * np.finfo(float).eps), maxiter=500)
    u_star = 0.5 * (u_l + u_r) + 0.5 * (
        _wave_function(p_star, rho_r, p_r, gamma) - _wave_function(p_star, rho_l, p_l, gamma)
    )

    def star_density(rho_k, p_k):
        if p_star > p_k:
            ratio = p_star / p_k
            g = (gamma - 1) / (gamma + 1)
            return rho_k * (ratio + g) / (g * ratio + 1)
        return rho_k * (p_star / p_k) ** (1 / gamma)

    return RiemannSolution(
        gamma=gamma,
        left=(rho_l, u_l, p_l),
        right=(rho_r, u_r, p_r),
        p_star=float(p_star),
        u_star=float(u_star),
        rho_star_left=float(star_density(rho_l, p_l)),
        rho_star_right=float(star_density(rho_r, p_r)),
        left_wave="shock" if p_star > p_l else "rarefaction",
        right_wave="shock" if p_star > p_r else "rarefaction",
    )
