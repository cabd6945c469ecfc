"""Explicit barotropic and internal-energy based Euler schemes."""
from __future__ import annotations

import numpy as np

from ..convection import (
    convection_divergence,
    corrective_terms,
    dual_viscosity,
    kinetic_identity_check,
    momentum_face_velocity,
    stability_diagnostics,
    stabilization_term,
)
from ..fluxes import cell_fluxes, boundary_outflow, dual_mass_fluxes, face_density, face_values, primal_mass_flux
from ..grid import Grid
from ..state import State, eos_pressure
from .boundary import boundary_scalar, boundary_velocity, pinned_mask
from .model import ModelConfig, PositivityError, StepInfo
from .operators import dual_face_viscosity, pressure_gradient, velocity_divergence, viscous_operator


def _check_density(rho, cfl):
    bad = ~(rho > 0)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise PositivityError(f"non-positive density {rho[k]!r} in cell {k} (cfl {cfl:.3g})", k, cfl)


def _mass_update(grid: Grid, state: State, cfg: ModelConfig, t: float):
    p = cfg.params
    xp, xm = cfg.scalar_limiter
    brho = boundary_scalar(grid, cfg.boundary.density, t)
    flux, rho_face = primal_mass_flux(grid, state.rho, state.velocity, cfg.scalar_scheme, xp, xm, brho)
    src_m = src_u = None
    if cfg.source is not None:
        src_m, src_u = cfg.source(t)
    rho_new = state.rho - p.dt / grid.cell_volume * cell_fluxes(grid, flux).sum(axis=1)
    if src_m is not None:
        rho_new = rho_new + p.dt * src_m
    return flux, rho_face, rho_new, src_m, src_u


def _momentum_update(grid, state, cfg, t, flux, rho_new, src_m, src_u, grad_p, info):
    """Advance the face velocities; returns (u_new, dual, u_eps, nu_dual)."""
    p = cfg.params
    dual = dual_mass_fluxes(grid, flux, state.rho, rho_new, p.dt, source=src_m, tol=1e-10)
    u = state.velocity
    u_eps = momentum_face_velocity(grid, u, dual, p)
    conv = convection_divergence(grid, u, flux, dual, u_eps)
    rd_old, rd_new = face_density(grid, state.rho), face_density(grid, rho_new)
    rhs = conv + grad_p
    if cfg.mu > 0:
        rhs = rhs + viscous_operator(grid, u, cfg.mu, cfg.viscous_form)
    nu_dual = None
    if p.nu > 0:
        nu_dual = dual_viscosity(grid, p.nu)
        rhs = rhs + stabilization_term(grid, u, nu_dual) / grid.dual_volume[:, None]
    if src_u is not None:
        rhs = rhs - src_u
    u_new = (rd_old[:, None] * u - p.dt * rhs) / rd_new[:, None]
    mask = pinned_mask(grid)
    u_new[mask] = boundary_velocity(grid, cfg.boundary, t + p.dt)[mask]
    if cfg.check_identity:
        res, _ = kinetic_identity_check(grid, rd_old, rd_new, u, u_new, flux, dual, u_eps, p.dt, tol=1e-10)
        info.identity_residual = res
    mu_dual = dual_face_viscosity(grid, cfg.mu) if cfg.mu > 0 else None
    rep = stability_diagnostics(grid, rd_old, rd_new, flux, dual, p.dt, mu_dual)
    info.cfl, info.tau, info.eta = rep.cfl, rep.tau, rep.eta
    return u_new, dual, u_eps, nu_dual


def _mass_info(grid, cfg, flux, src_m, info):
    info.boundary_mass = float(cfg.dt * boundary_outflow(grid, flux).sum())
    if src_m is not None:
        info.source_mass = float(cfg.dt * np.sum(grid.cell_volume * src_m))


def barotropic_substep(grid: Grid, state: State, cfg: ModelConfig) -> tuple[State, StepInfo]:
    """One forward-Euler step of the barotropic scheme."""
    t = state.time
    info = StepInfo()
    flux, rho_face, rho_new, src_m, src_u = _mass_update(grid, state, cfg, t)
    grad_p = pressure_gradient(grid, state.pressure)
    u_new, _, _, _ = _momentum_update(grid, state, cfg, t, flux, rho_new, src_m, src_u, grad_p, info)
    _check_density(rho_new, info.cfl)
    _mass_info(grid, cfg, flux, src_m, info)
    new = State(rho=rho_new, velocity=u_new, pressure=eos_pressure(cfg.eos, rho_new), time=t + cfg.dt)
    return new, info


def _heun(substep, grid, state, cfg):
    w1, i1 = substep(grid, state, cfg)
    w2, i2 = substep(grid, w1, cfg)
    rho = 0.5 * (state.rho + w2.rho)
    m = 0.5 * (face_density(grid, state.rho)[:, None] * state.velocity + face_density(grid, w2.rho)[:, None] * w2.velocity)
    u = m / face_density(grid, rho)[:, None]
    mask = pinned_mask(grid)
    t_new = state.time + cfg.dt
    u[mask] = boundary_velocity(grid, cfg.boundary, t_new)[mask]
    info = StepInfo(
        cfl=max(i1.cfl, i2.cfl),
        boundary_mass=0.5 * (i1.boundary_mass + i2.boundary_mass),
        source_mass=0.5 * (i1.source_mass + i2.source_mass),
        identity_residual=np.nanmax([i1.identity_residual, i2.identity_residual]) if cfg.check_identity else np.nan,
        corrective_sum=0.5 * (i1.corrective_sum + i2.corrective_sum),
    )
    return rho, u, w2, t_new, info


def barotropic_step(grid: Grid, state: State, cfg: ModelConfig) -> tuple[State, StepInfo]:
    """Barotropic step: forward Euler, or Heun averaging (rho, rho_D u)."""
    if cfg.time_stepping == "forward_euler":
        return barotropic_substep(grid, state, cfg)
    rho, u, _, t_new, info = _heun(barotropic_substep, grid, state, cfg)
    return State(rho=rho, velocity=u, pressure=eos_pressure(cfg.eos, rho), time=t_new), info


def euler_substep(grid: Grid, state: State, cfg: ModelConfig) -> tuple[State, StepInfo]:
    """One forward-Euler step of the internal-energy based Euler scheme.

    Order: mass, internal energy (with the corrective source carried by the
    state), equation of state, momentum with the new pressure gradient.  The
    corrective source for the next step is computed from this step's
    velocity increment and stored on the returned state.
    """
    t, dt = state.time, cfg.dt
    info = StepInfo()
    flux, rho_face, rho_new, src_m, src_u = _mass_update(grid, state, cfg, t)
    xp, xm = cfg.scalar_limiter
    be = boundary_scalar(grid, cfg.boundary.internal_energy, t)
    if cfg.energy_face == "conserved":
        # limit rho e, so that a contact (uniform p and u) stays uniform
        rho_e_face = face_values(grid, state.rho * state.internal_energy, flux, cfg.scalar_scheme, xp, xm, be * rho_face)
        e_face = rho_e_face / rho_face
    else:
        e_face = face_values(grid, state.internal_energy, flux, cfg.scalar_scheme, xp, xm, be)
    energy_flux = cell_fluxes(grid, flux * e_face).sum(axis=1)
    work = grid.cell_volume * state.pressure * velocity_divergence(grid, state.velocity)
    s = state.correction if (cfg.corrective and state.correction is not None) else 0.0
    rho_e = (grid.cell_volume * state.rho * state.internal_energy - dt * (energy_flux + work) + dt * s) / grid.cell_volume
    _check_density(rho_new, np.nan)
    e_new = rho_e / rho_new
    bad = ~(e_new >= 0)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise PositivityError(f"negative internal energy {e_new[k]!r} in cell {k}", k)
    p_new = eos_pressure(cfg.eos, rho_new, e_new)
    grad_p = pressure_gradient(grid, p_new)
    u_new, dual, u_eps, nu_dual = _momentum_update(grid, state, cfg, t, flux, rho_new, src_m, src_u, grad_p, info)
    _mass_info(grid, cfg, flux, src_m, info)
    ledger = corrective_terms(grid, rho_new, state.velocity, u_new, dual, u_eps, dt, nu_dual=nu_dual)
    s_next = ledger.S
    info.corrective_sum = float(s_next.sum())
    new = State(
        rho=rho_new,
        velocity=u_new,
        pressure=p_new,
        internal_energy=e_new,
        time=t + dt,
        correction=s_next if cfg.corrective else np.zeros(grid.n_cells),
    )
    return new, info


def euler_step(grid: Grid, state: State, cfg: ModelConfig) -> tuple[State, StepInfo]:
    """Euler step: forward Euler, or Heun averaging (rho, rho_D u, rho e)."""
    if state.internal_energy is None:
        raise ValueError("the euler model needs an internal energy field")
    if cfg.time_stepping == "forward_euler":
        return euler_substep(grid, state, cfg)
    rho, u, w2, t_new, info = _heun(euler_substep, grid, state, cfg)
    rho_e = 0.5 * (state.rho * state.internal_energy + w2.rho * w2.internal_energy)
    e = rho_e / rho
    new = State(
        rho=rho,
        velocity=u,
        pressure=eos_pressure(cfg.eos, rho, e),
        internal_energy=e,
        time=t_new,
        correction=w2.correction,
    )
    return new, info
