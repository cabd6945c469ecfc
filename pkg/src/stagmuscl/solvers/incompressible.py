"""Incremental projection scheme for the incompressible Navier-Stokes equations."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..convection import (
    convection_divergence,
    dual_viscosity,
    momentum_face_velocity,
    stability_diagnostics,
    stabilization_term,
)
from ..fluxes import dual_mass_fluxes, normal_velocity
from ..grid import Grid
from ..state import State
from .boundary import boundary_velocity, outflow_faces, pinned_mask
from .linsolve import LinearSolveContract
from .model import ModelConfig, StepInfo
from .operators import divergence_matrix, dual_face_viscosity, pressure_gradient, velocity_divergence, viscous_matrix


def _free_normal_faces(grid: Grid) -> np.ndarray:
    """Faces whose normal velocity is corrected: interior and outflow faces."""
    return np.sort(np.concatenate([grid.interior_faces, outflow_faces(grid)]))


@lru_cache(maxsize=8)
def _prediction_system(grid: Grid, dt: float, mu: float, form: str, method: str, tol: float):
    """(|D|/dt + mu A) with the pinned dofs eliminated symmetrically."""
    d, nf = grid.dim, grid.n_faces
    mass = sp.diags(np.tile(grid.dual_volume, d) / dt)
    a = (mass + viscous_matrix(grid, mu, form)).tocsr() if mu > 0 else mass.tocsr()
    pinned = pinned_mask(grid).T.reshape(-1)
    keep = sp.diags((~pinned).astype(float))
    coupling = a[:, np.flatnonzero(pinned)].tocsc()
    reduced = keep @ a @ keep + sp.diags(pinned.astype(float))
    return LinearSolveContract(reduced, tol=tol, method=method), pinned, coupling


@lru_cache(maxsize=8)
def _pressure_system(grid: Grid, method: str, tol: float):
    """B_f |D|^-1 B_f^T on the free normal faces; pinned at cell 0 without outflow."""
    free = _free_normal_faces(grid)
    b = divergence_matrix(grid)[:, free]
    lap = (b @ sp.diags(1.0 / grid.dual_volume[free]) @ b.T).tolil()
    pin = outflow_faces(grid).size == 0
    if pin:
        lap[0, :] = 0.0
        lap[:, 0] = 0.0
        lap[0, 0] = 1.0
    return LinearSolveContract(lap.tocsr(), tol=tol, method=method), free, pin, b.T.tocsr()


def incompressible_step(grid: Grid, state: State, cfg: ModelConfig) -> tuple[State, StepInfo]:
    """One prediction / correction step (density one in the mass fluxes).

    Convection is explicit with the configured scheme, viscosity implicit,
    the pressure gradient lagged in the prediction.  The correction solves
    for the pressure increment so that every cell is divergence-free up to
    the linear-solver tolerance.  Outflow faces see a zero exterior pressure.
    """
    p = cfg.params
    dt, t = p.dt, state.time
    d, nf = grid.dim, grid.n_faces
    info = StepInfo()
    u = np.asarray(state.velocity, dtype=float)
    flux = grid.face_area * normal_velocity(grid, u)
    # the flux is only as divergence-free as the previous Poisson solve
    dual = dual_mass_fluxes(grid, flux, np.ones(grid.n_cells), np.ones(grid.n_cells), dt, tol=None)
    u_eps = momentum_face_velocity(grid, u, dual, p)
    out_p = np.full(nf, np.nan)
    out_p[outflow_faces(grid)] = 0.0
    rhs = -convection_divergence(grid, u, flux, dual, u_eps) - pressure_gradient(grid, state.pressure, out_p)
    if p.nu > 0:
        rhs = rhs - stabilization_term(grid, u, dual_viscosity(grid, p.nu)) / grid.dual_volume[:, None]
    rhs = (grid.dual_volume[:, None] * (u / dt + rhs)).T.reshape(-1)

    solver, pinned, coupling = _prediction_system(grid, dt, cfg.mu, cfg.viscous_form, cfg.prediction_solver, cfg.linear_tol)
    ub = boundary_velocity(grid, cfg.boundary, t + dt).T.reshape(-1)
    rhs = rhs - coupling @ ub[pinned]
    rhs[pinned] = ub[pinned]
    u_tilde = solver.solve(rhs, x0=u.T.reshape(-1)).reshape(d, nf).T
    residual = solver.last.residual

    psolver, free, pin, grad_free = _pressure_system(grid, cfg.linear_solver, cfg.linear_tol)
    prhs = -divergence_matrix(grid) @ normal_velocity(grid, u_tilde) / dt
    if pin:
        prhs[0] = 0.0
    phi = psolver.solve(prhs)
    residual = max(residual, psolver.last.residual)
    u_new = u_tilde.copy()
    correction = np.zeros(nf)
    correction[free] = (grad_free @ phi) / grid.dual_volume[free]
    u_new[np.arange(nf), grid.face_axis] += dt * correction
    mask = pinned_mask(grid)
    u_new[mask] = boundary_velocity(grid, cfg.boundary, t + dt)[mask]

    div = velocity_divergence(grid, u_new)
    info.linear_residual = float(residual)
    info.boundary_mass = float(dt * (divergence_matrix(grid) @ normal_velocity(grid, u_new)).sum())
    info.extra["max_divergence"] = float(np.max(np.abs(div)))
    ones = np.ones(nf)
    mu_dual = dual_face_viscosity(grid, cfg.mu) if cfg.mu > 0 else None
    rep = stability_diagnostics(grid, ones, ones, flux, dual, dt, mu_dual)
    info.cfl, info.tau, info.eta = rep.cfl, rep.tau, rep.eta
    new = State(
        rho=np.ones(grid.n_cells),
        velocity=u_new,
        pressure=np.asarray(state.pressure, dtype=float) + phi,
        time=t + dt,
    )
    return new, info
