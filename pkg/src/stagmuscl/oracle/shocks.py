"""Jump states of travelling shocks entering a fluid at rest."""
from __future__ import annotations

import numpy as np


class NoShockError(ValueError):
    """A shock needs a Mach number of at least one."""


def _check_mach(mach: float) -> float:
    mach = float(mach)
    if not mach >= 1.0:
        raise NoShockError(f"Mach number {mach} < 1 does not define a shock")
    return mach


def barotropic_shock_state(a: float, rho0: float, mach: float, gamma: float = 2.0):
    """State (rho_b, u_b) behind a shock of speed omega running into (rho0, 0).

    Only gamma = 2 (p = a rho^2, shallow water) has the closed form used here:
    rho_b / rho0 = (sqrt(1 + 8 M^2) - 1) / 2 with M = omega / sqrt(2 a rho0).
    Returns (rho_b, u_b, omega).
    """
    if gamma != 2.0:
        raise ValueError("closed-form barotropic jump states need gamma = 2")
    if a <= 0 or rho0 <= 0:
        raise ValueError("a and rho0 must be positive")
    mach = _check_mach(mach)
    omega = mach * np.sqrt(2.0 * a * rho0)
    ratio = 0.5 * (np.sqrt(1.0 + 8.0 * mach**2) - 1.0)
    rho_b = rho0 * ratio
    u_b = omega * (1.0 - 1.0 / ratio)
    return float(rho_b), float(u_b), float(omega)


def euler_shock_state(gamma: float, rho0: float, p0: float, mach: float):
    """State (rho_b, u_b, p_b) behind an ideal-gas shock running into (rho0, 0, p0).

    omega = M sqrt(gamma p0 / rho0).  Returns (rho_b, u_b, p_b, omega).
    """
    if gamma <= 1 or rho0 <= 0 or p0 <= 0:
        raise ValueError("need gamma > 1 and positive rho0, p0")
    mach = _check_mach(mach)
    omega = mach * np.sqrt(gamma * p0 / rho0)
    rho_b = (gamma + 1.0) / (gamma - 1.0 + 2.0 / mach**2) * rho0
    u_b = omega * (1.0 - rho0 / rho_b)
    p_b = p0 + omega**2 * (1.0 - rho0 / rho_b) * rho0
    return float(rho_b), float(u_b), float(p_b), float(omega)


def jump_residuals(states, omega: float, pressure, energy=None) -> np.ndarray:
    """Rankine-Hugoniot residuals omega [q] - [f(q)] for mass, momentum (and energy).

    ``states`` is ((rho_l, u_l), (rho_r, u_r)) or with a third entry p for the
    energy equation, ``pressure(rho[, p])`` returns p, ``energy(rho, u, p)``
    the total energy per unit volume.
    """
    (left, right) = states
    rho_l, u_l = left[0], left[1]
    rho_r, u_r = right[0], right[1]
    p_l = pressure(*left[::2]) if len(left) > 2 else pressure(rho_l)
    p_r = pressure(*right[::2]) if len(right) > 2 else pressure(rho_r)
    res = [
        omega * (rho_l - rho_r) - (rho_l * u_l - rho_r * u_r),
        omega * (rho_l * u_l - rho_r * u_r) - (rho_l * u_l**2 + p_l - rho_r * u_r**2 - p_r),
    ]
    if energy is not None:
        e_l, e_r = energy(rho_l, u_l, p_l), energy(rho_r, u_r, p_r)
        res.append(omega * (e_l - e_r) - ((e_l + p_l) * u_l - (e_r + p_r) * u_r))
    return np.asarray(res)
