"""Primal and dual mass fluxes, face densities and the scalar MUSCL limiter.

Orientation conventions
-----------------------
* A primal flux is stored once per face as the flux in the ``+axis``
  direction, ``F_face = |sigma| rho_sigma u_sigma . e_axis``.  The flux
  outward of a cell K is ``F_{K,sigma} = sign * F_face`` with ``sign = -1``
  on the ``-axis`` local faces and ``+1`` on the ``+axis`` ones.
* A dual flux is stored once per dual face ``eps = (sigma, sigma')`` as
  ``F_{sigma,eps}``, the flux leaving ``D_sigma`` where ``sigma`` is the
  first face of ``grid.dual_pair``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .grid import Grid, _LOCAL_PAIRS, scatter_add

SCHEMES = ("upwind", "centered", "muscl")


class ConsistencyError(ValueError):
    """Raised when the inputs of a flux construction violate a balance law."""


@dataclass(frozen=True, eq=False)
class FluxSet:
    primal: np.ndarray
    dual: np.ndarray
    face_density: np.ndarray
    face_density_new: np.ndarray | None = None


def diamond_average(w_k, rho_k, w_l, rho_l):
    """Measure-weighted mean of two cell values."""
    return (w_k * rho_k + w_l * rho_l) / (w_k + w_l)


def face_density(grid: Grid, rho) -> np.ndarray:
    """rho_{D_sigma}: half-diamond weighted average, or rho_K on external faces."""
    rho = np.asarray(rho, dtype=float)
    hd = grid.half_diamond
    k, l = grid.face_cells[:, 0], grid.face_cells[:, 1]
    out = np.empty(grid.n_faces)
    inner = (k >= 0) & (l >= 0)
    out[inner] = diamond_average(hd[k[inner]], rho[k[inner]], hd[l[inner]], rho[l[inner]])
    out[~inner] = rho[np.maximum(k, l)[~inner]]
    return out


def scalar_muscl_face_value(v_up, v_down, v_opp, xi_plus, xi_minus, tentative=None):
    """Project a tentative face value into ``I+ ∩ I-``.

    ``I+ = [v_up, v_up + xi_plus/2 (v_down - v_up)]`` and
    ``I- = [v_up, v_up + xi_minus/2 (v_up - v_opp)]``, both with sorted
    endpoints.  A NaN ``v_opp`` marks a missing opposite value, in which case
    ``I-`` shrinks to ``{v_up}``.  The tentative value defaults to the
    centred mean of ``v_up`` and ``v_down``.
    """
    v_up = np.asarray(v_up, dtype=float)
    v_down = np.asarray(v_down, dtype=float)
    v_opp = np.asarray(v_opp, dtype=float)
    if tentative is None:
        tentative = 0.5 * (v_up + v_down)
    a = v_up + 0.5 * xi_plus * (v_down - v_up)
    missing = np.isnan(v_opp)
    b = np.where(missing, v_up, v_up + 0.5 * xi_minus * (v_up - np.where(missing, 0.0, v_opp)))
    lo = np.maximum(np.minimum(v_up, a), np.minimum(v_up, b))
    hi = np.minimum(np.maximum(v_up, a), np.maximum(v_up, b))
    return np.minimum(np.maximum(tentative, lo), hi)


def muscl_intervals(v_up, v_down, v_opp, xi_plus, xi_minus):
    """Sorted endpoints of ``I+ ∩ I-`` (same conventions as above)."""
    v_up = np.asarray(v_up, dtype=float)
    a = v_up + 0.5 * xi_plus * (np.asarray(v_down, dtype=float) - v_up)
    v_opp = np.asarray(v_opp, dtype=float)
    missing = np.isnan(v_opp)
    b = np.where(missing, v_up, v_up + 0.5 * xi_minus * (v_up - np.where(missing, 0.0, v_opp)))
    lo = np.maximum(np.minimum(v_up, a), np.minimum(v_up, b))
    hi = np.minimum(np.maximum(v_up, a), np.maximum(v_up, b))
    return lo, hi


@lru_cache(maxsize=32)
def _face_stencil(grid: Grid):
    """Per face: minus cell, plus cell, and the far neighbour of each.

    ``far_minus`` is the neighbour of the minus cell away from the face (the
    opposite cell when the flow goes in the ``+axis`` direction);
    ``far_plus`` likewise for the plus cell.
    """
    ax = grid.face_axis
    km, kp = grid.face_cells[:, 0], grid.face_cells[:, 1]
    far_m = np.where(km >= 0, grid.cell_neighbors[np.maximum(km, 0), 2 * ax], -1)
    far_p = np.where(kp >= 0, grid.cell_neighbors[np.maximum(kp, 0), 2 * ax + 1], -1)
    return km, kp, far_m, far_p


def normal_velocity(grid: Grid, velocity) -> np.ndarray:
    velocity = np.asarray(velocity, dtype=float)
    return velocity[np.arange(grid.n_faces), grid.face_axis]


def face_values(
    grid: Grid,
    values,
    direction,
    scheme: str = "muscl",
    xi_plus: float = 1.0,
    xi_minus: float = 1.0,
    boundary_values=None,
) -> np.ndarray:
    """Face values of a cell scalar, upwinded with respect to ``direction``.

    ``direction`` is any per-face quantity whose sign gives the flow
    direction along the face axis (normal velocity or mass flux).  On
    boundary faces the interior value is used for outflow; for inflow the
    prescribed ``boundary_values`` entry is used when finite.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    values = np.asarray(values, dtype=float)
    direction = np.asarray(direction, dtype=float)
    km, kp, far_m, far_p = _face_stencil(grid)
    inner = (km >= 0) & (kp >= 0)
    pos = direction >= 0

    out = np.empty(grid.n_faces)
    up = np.where(pos, km, kp)
    down = np.where(pos, kp, km)
    opp = np.where(pos, far_m, far_p)
    i = np.flatnonzero(inner)
    v_up, v_down = values[up[i]], values[down[i]]
    if scheme == "upwind":
        out[i] = v_up
    elif scheme == "centered":
        out[i] = 0.5 * (v_up + v_down)
    else:
        v_opp = np.where(opp[i] >= 0, values[np.maximum(opp[i], 0)], np.nan)
        out[i] = scalar_muscl_face_value(v_up, v_down, v_opp, xi_plus, xi_minus)

    b = np.flatnonzero(~inner)
    interior = values[np.maximum(km[b], kp[b])]
    out[b] = interior
    if boundary_values is not None:
        bv = np.asarray(boundary_values, dtype=float)[b]
        # inflow: flow enters through x- side (direction>0, no minus cell) or x+ side
        inflow = np.where(km[b] < 0, direction[b] > 0, direction[b] < 0)
        use = inflow & np.isfinite(bv)
        out[b[use]] = bv[use]
    return out


def primal_mass_flux(
    grid: Grid,
    rho,
    velocity,
    scheme: str = "muscl",
    xi_plus: float = 1.0,
    xi_minus: float = 1.0,
    boundary_rho=None,
) -> tuple[np.ndarray, np.ndarray]:
    """Return ``(F_face, rho_sigma)``; see the module docstring for orientation."""
    un = normal_velocity(grid, velocity)
    rho_s = face_values(grid, rho, un, scheme, xi_plus, xi_minus, boundary_rho)
    return grid.face_area * rho_s * un, rho_s


def cell_fluxes(grid: Grid, flux_face) -> np.ndarray:
    """(n_cells, 2d) table of F_{K,sigma} outward of each cell."""
    return grid.owner_sign() * np.asarray(flux_face)[grid.cell_faces]


def boundary_outflow(grid: Grid, flux_face) -> np.ndarray:
    """Per face: F_{K,sigma} outward of the domain on external faces, 0 inside."""
    flux_face = np.asarray(flux_face, dtype=float)
    out = np.zeros(grid.n_faces)
    b = grid.boundary_faces
    sign = np.where(grid.face_cells[b, 0] < 0, -1.0, 1.0)
    out[b] = sign * flux_face[b]
    return out


def primal_balance_residual(grid: Grid, flux_face, rho_old, rho_new, dt, source=None):
    """Per-cell ``|K|(rho_new - rho_old)/dt + sum F_{K,sigma} - |K| source``."""
    res = grid.cell_volume * (np.asarray(rho_new) - np.asarray(rho_old)) / dt
    res = res + cell_fluxes(grid, flux_face).sum(axis=1)
    if source is not None:
        res = res - grid.cell_volume * np.asarray(source)
    return res


@lru_cache(maxsize=4)
def dual_coefficients(dim: int) -> np.ndarray:
    """alpha such that the local dual fluxes of a cell are ``alpha @ F_K``.

    Rows follow the local dual-face order of the grid, columns the local
    faces ``-x, +x, -y, +y``.  Obtained as the minimum-norm solution of the
    half-diamond balances, with the time-derivative term replaced by its
    equal share ``-sum(F_K)/(2d)`` of the primal balance.
    """
    pairs = _LOCAL_PAIRS[dim]
    nloc = 2 * dim
    inc = np.zeros((nloc, len(pairs)))
    for e, (a, b) in enumerate(pairs):
        inc[a, e] = 1.0
        inc[b, e] = -1.0
    rhs = -(np.eye(nloc) - np.full((nloc, nloc), 1.0 / nloc))
    alpha = np.linalg.pinv(inc) @ rhs
    alpha[np.abs(alpha) < 1e-15] = 0.0
    alpha.setflags(write=False)
    return alpha


def dual_mass_fluxes(grid: Grid, flux_face, rho_old, rho_new, dt, source=None, tol=1e-12):
    """Dual fluxes F_{sigma,eps} closing the half-diamond mass balances.

    Raises ConsistencyError when the primal mass balance is violated;
    ``tol=None`` skips the check (the closure is then only as balanced as
    the input, e.g. a velocity divergence-free up to a solver tolerance).
    """
    fk = cell_fluxes(grid, flux_face)
    alpha = dual_coefficients(grid.dim)
    if tol is None:
        return (fk @ alpha.T).reshape(-1)
    res = primal_balance_residual(grid, flux_face, rho_old, rho_new, dt, source)
    scale = (
        np.abs(fk).sum(axis=1)
        + grid.cell_volume * (np.abs(rho_new) + np.abs(rho_old)) / dt
    )
    bad = np.abs(res) > tol * np.maximum(scale, np.finfo(float).tiny)
    if np.any(bad):
        k = int(np.flatnonzero(bad)[0])
        raise ConsistencyError(
            f"primal mass balance violated in cell {k}: residual {res[k]:.3e}, scale {scale[k]:.3e}"
        )
    local = fk @ alpha.T
    return local.reshape(-1)


def dual_divergence(grid: Grid, dual, flux_face=None) -> np.ndarray:
    """Per face: sum of fluxes leaving D_sigma, including the boundary face itself."""
    out = np.zeros(grid.n_faces)
    scatter_add(out, grid.dual_pair[:, 0], dual)
    scatter_add(out, grid.dual_pair[:, 1], -np.asarray(dual))
    if flux_face is not None:
        out += boundary_outflow(grid, flux_face)
    return out


def dual_balance_residual(grid: Grid, flux_face, dual, rho_old, rho_new, dt, source=None):
    """Per face: ``|D|(rhoD_new - rhoD_old)/dt + sum_eps F_{sigma,eps}`` (minus the source)."""
    rd_old, rd_new = face_density(grid, rho_old), face_density(grid, rho_new)
    res = grid.dual_volume * (rd_new - rd_old) / dt + dual_divergence(grid, dual, flux_face)
    if source is not None:
        res = res - grid.dual_volume * face_density(grid, source)
    return res


def build_fluxes(grid: Grid, flux_face, rho_old, rho_new, dt, source=None) -> FluxSet:
    dual = dual_mass_fluxes(grid, flux_face, rho_old, rho_new, dt, source)
    return FluxSet(
        primal=np.asarray(flux_face, dtype=float),
        dual=dual,
        face_density=face_density(grid, rho_old),
        face_density_new=face_density(grid, rho_new),
    )
