"""Shared builders for the test suite."""
import numpy as np

from stagmuscl.convection import SchemeParams
from stagmuscl.fluxes import cell_fluxes, dual_mass_fluxes, face_density, primal_mass_flux
from stagmuscl.grid import build_cartesian
from stagmuscl.solvers import ModelConfig, pinned_mask
from stagmuscl.state import Eos, State, internal_energy


def streamfunction_velocity(grid, psi):
    """Face-normal velocities whose discrete divergence vanishes identically.

    ``psi`` is given at the vertices, shape (nx+1, ny+1); fluxes are its
    differences along each face.
    """
    hx, hy = grid.h
    vel = np.zeros((grid.n_faces, 2))
    vel[grid.vface_index.ravel(), 0] = ((psi[:, 1:] - psi[:, :-1]) / hy).ravel()
    vel[grid.hface_index.ravel(), 1] = (-(psi[1:, :] - psi[:-1, :]) / hx).ravel()
    return vel


def random_psi(grid, rng, modes=3):
    """Smooth random streamfunction vanishing on the boundary."""
    x, y = grid.vertex_coordinates()
    lx, ly = grid.extent
    X, Y = np.meshgrid((x - x[0]) / lx, (y - y[0]) / ly, indexing="ij")
    psi = np.zeros_like(X)
    for _ in range(modes):
        k, m = rng.integers(1, 4, size=2)
        psi += rng.normal() * np.sin(np.pi * k * X) * np.sin(np.pi * m * Y)
    return psi


def balanced_density(grid, flux_face, rho_old, dt):
    """rho_new closing the primal mass balance exactly for the given fluxes."""
    return rho_old - dt / grid.cell_volume * cell_fluxes(grid, flux_face).sum(axis=1)


def random_mass_step(rng, grid, dt=None, scheme="upwind", amplitude=1.0):
    """Random positive density, random velocity and a mass-balanced update.

    Returns (rho_old, rho_new, velocity, flux_face, dual, dt).
    """
    rho = rng.uniform(0.5, 2.0, grid.n_cells)
    vel = amplitude * rng.normal(size=(grid.n_faces, grid.dim))
    flux, _ = primal_mass_flux(grid, rho, vel, scheme=scheme)
    if dt is None:
        # keep the new density positive
        out = np.clip(cell_fluxes(grid, flux), 0, None).sum(axis=1)
        dt = 0.4 * float(np.min(grid.cell_volume * rho / np.maximum(out, 1e-300)))
    rho_new = balanced_density(grid, flux, rho, dt)
    dual = dual_mass_fluxes(grid, flux, rho, rho_new, dt)
    return rho, rho_new, vel, flux, dual, dt


def densities(grid, rho_old, rho_new):
    return face_density(grid, rho_old), face_density(grid, rho_new)


def unit_square(n, tags="dirichlet"):
    return build_cartesian(2, (n, n), boundary_tags=tags)


def params(dt, scheme="muscl", xi_plus=1.0, xi_minus=1.0, nu=0.0):
    return SchemeParams(dt=dt, scheme=scheme, xi_plus=xi_plus, xi_minus=xi_minus, nu=nu)


def barotropic_model(dim=1, n=20, scheme="muscl", stepping="forward_euler", tags="dirichlet", **kw):
    g = build_cartesian(dim, (n,) * dim, boundary_tags=tags)
    cfg = ModelConfig("barotropic", SchemeParams(dt=kw.pop("dt", 1e-3), scheme=scheme),
                      eos=Eos.barotropic(1.0, 2.0), time_stepping=stepping, **kw)
    return g, cfg


def euler_model(dim=1, n=20, scheme="muscl", stepping="forward_euler", tags="dirichlet", **kw):
    g = build_cartesian(dim, (n,) * dim, boundary_tags=tags)
    cfg = ModelConfig("euler", SchemeParams(dt=kw.pop("dt", 1e-3), scheme=scheme),
                      eos=Eos.ideal_gas(1.4), time_stepping=stepping, **kw)
    return g, cfg


def random_compressible(rng, g, eos, closed=True):
    rho = rng.uniform(0.5, 2, g.n_cells)
    vel = 0.3 * rng.normal(size=(g.n_faces, g.dim))
    if closed:
        vel[pinned_mask(g)] = 0.0
    p = rng.uniform(0.5, 2, g.n_cells)
    if eos.kind == "barotropic":
        return State(rho=rho, velocity=vel, pressure=eos.a * rho**eos.gamma)
    return State(rho=rho, velocity=vel, pressure=p, internal_energy=internal_energy(eos, rho, p))
