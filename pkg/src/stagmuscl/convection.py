"""Momentum convection on the dual mesh, kinetic-energy bookkeeping and stability diagnostics.

All face-velocity arrays have shape ``(n_faces, d)``; dual-face arrays have
shape ``(n_dual, d)``.  Dual fluxes follow the orientation documented in
:mod:`stagmuscl.fluxes`.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import spsolve

from .fluxes import SCHEMES, ConsistencyError, boundary_outflow, dual_divergence, scalar_muscl_face_value
from .grid import Grid, scatter_add

log = logging.getLogger(__name__)

XI_DEGENERATE = 1e-14


@dataclass(frozen=True)
class SchemeParams:
    dt: float
    scheme: str = "muscl"
    xi_plus: float = 1.0
    xi_minus: float = 1.0
    nu: float = 0.0

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        for name in ("xi_plus", "xi_minus"):
            v = getattr(self, name)
            if not 0.0 <= v <= 2.0:
                raise ValueError(f"{name} must lie in [0, 2], got {v}")
        if self.xi_plus > 1.0:
            log.warning("xi_plus=%g > 1: the face value may leave the upwind/centred range", self.xi_plus)
        if self.nu < 0:
            raise ValueError(f"nu must be >= 0, got {self.nu}")
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt}")

    @property
    def limiter(self) -> tuple[float, float]:
        if self.scheme == "upwind":
            return 0.0, 0.0
        return self.xi_plus, self.xi_minus


@dataclass(eq=False)
class KineticLedger:
    """Remainders of the discrete kinetic-energy identity.

    ``T[e, s, i]`` is T_{sigma,eps,i} seen from side ``s`` of dual face ``e``
    (``s = 0`` for ``dual_pair[e, 0]``); ``R`` is per face and component;
    ``S1, S2, S3`` are per cell.
    """

    T: np.ndarray
    R: np.ndarray
    xi_eff: np.ndarray
    S1: np.ndarray | None = None
    S2: np.ndarray | None = None
    S3: np.ndarray | None = None

    @property
    def S(self) -> np.ndarray:
        return self.S1 + self.S2 + self.S3


def _upwind_sides(grid: Grid, dual):
    """Upwind face, downwind face and opposite face per dual face."""
    dual = np.asarray(dual, dtype=float)
    pos = dual >= 0
    up = np.where(pos, grid.dual_pair[:, 0], grid.dual_pair[:, 1])
    down = np.where(pos, grid.dual_pair[:, 1], grid.dual_pair[:, 0])
    opp = np.where(pos, grid.dual_opposite[:, 0], grid.dual_opposite[:, 1])
    return up, down, opp


def momentum_face_velocity(grid: Grid, velocity, dual, params: SchemeParams, component=None):
    """Face values u_eps on interior dual faces, shape (n_dual, d) or (n_dual,)."""
    velocity = np.asarray(velocity, dtype=float)
    comps = range(grid.dim) if component is None else [component]
    up, down, opp = _upwind_sides(grid, dual)
    out = np.empty((grid.n_dual, len(comps)))
    xp, xm = params.limiter
    for c, i in enumerate(comps):
        u = velocity[:, i]
        if params.scheme == "centered":
            out[:, c] = 0.5 * (u[up] + u[down])
            continue
        if params.scheme == "upwind":
            out[:, c] = u[up]
            continue
        u_opp = np.where(opp >= 0, u[np.maximum(opp, 0)], np.nan)
        out[:, c] = scalar_muscl_face_value(u[up], u[down], u_opp, xp, xm)
    return out[:, 0] if component is not None else out


def effective_xi(grid: Grid, velocity, dual, u_eps) -> np.ndarray:
    """xi_eff with u_eps = (1 - xi/2) u_minus + xi/2 u_plus; 0 in degenerate cases."""
    velocity = np.asarray(velocity, dtype=float)
    u_eps = np.asarray(u_eps, dtype=float).reshape(grid.n_dual, -1)
    up, down, _ = _upwind_sides(grid, dual)
    um, up_ = velocity[up], velocity[down]
    diff = up_ - um
    scale = np.maximum(np.abs(um), np.abs(up_))
    ok = np.abs(diff) > XI_DEGENERATE * np.maximum(scale, 1e-300)
    xi = np.zeros_like(u_eps)
    xi[ok] = 2.0 * (u_eps[ok] - um[ok]) / diff[ok]
    return xi


def convection_divergence(grid: Grid, velocity, flux_face, dual, u_eps) -> np.ndarray:
    """div(rho u_i u)_sigma = (1/|D_sigma|) sum_eps F_{sigma,eps} u_eps.

    Boundary faces contribute their own flux with the upwind value u_sigma.
    """
    velocity = np.asarray(velocity, dtype=float)
    flux = np.asarray(dual, dtype=float)[:, None] * np.asarray(u_eps).reshape(grid.n_dual, -1)
    acc = np.zeros((grid.n_faces, flux.shape[1]))
    scatter_add(acc, grid.dual_pair[:, 0], flux)
    scatter_add(acc, grid.dual_pair[:, 1], -flux)
    fb = boundary_outflow(grid, flux_face)
    acc += fb[:, None] * velocity
    return acc / grid.dual_volume[:, None]


def convection_operator(grid, rho_d_old, rho_d_new, u_old, u_new, dt, divergence):
    """C(rho,u)_sigma = (rhoD_new u_new - rhoD_old u_old)/dt + divergence."""
    rho_d_old = np.asarray(rho_d_old)[:, None]
    rho_d_new = np.asarray(rho_d_new)[:, None]
    return (rho_d_new * np.asarray(u_new) - rho_d_old * np.asarray(u_old)) / dt + divergence


def check_dual_balance(grid, flux_face, dual, rho_d_old, rho_d_new, dt, tol=1e-12):
    res = grid.dual_volume * (np.asarray(rho_d_new) - np.asarray(rho_d_old)) / dt
    res = res + dual_divergence(grid, dual, flux_face)
    absflux = np.zeros(grid.n_faces)
    scatter_add(absflux, grid.dual_pair[:, 0], np.abs(dual))
    scatter_add(absflux, grid.dual_pair[:, 1], np.abs(dual))
    absflux += np.abs(boundary_outflow(grid, flux_face))
    scale = absflux + grid.dual_volume * (np.abs(rho_d_new) + np.abs(rho_d_old)) / dt
    bad = np.abs(res) > tol * np.maximum(scale, np.finfo(float).tiny)
    if np.any(bad):
        f = int(np.flatnonzero(bad)[0])
        raise ConsistencyError(f"dual mass balance violated on face {f}: residual {res[f]:.3e}")
    return res


def kinetic_identity_check(
    grid: Grid,
    rho_d_old,
    rho_d_new,
    u_old,
    u_new,
    flux_face,
    dual,
    u_eps,
    dt,
    tol=1e-12,
):
    """Evaluate both sides of the kinetic-energy identity on every face.

    Returns ``(residual, ledger)`` where ``residual`` is the maximum over
    faces and components of ``|lhs - rhs|`` divided by the local magnitude
    of the terms.
    """
    check_dual_balance(grid, flux_face, dual, rho_d_old, rho_d_new, dt, tol)
    u_old = np.asarray(u_old, dtype=float)
    u_new = np.asarray(u_new, dtype=float)
    u_eps = np.asarray(u_eps, dtype=float).reshape(grid.n_dual, -1)
    dual = np.asarray(dual, dtype=float)
    vol = grid.dual_volume[:, None]
    rn, ro = np.asarray(rho_d_new)[:, None], np.asarray(rho_d_old)[:, None]

    div = convection_divergence(grid, u_old, flux_face, dual, u_eps)
    c = convection_operator(grid, rho_d_old, rho_d_new, u_old, u_new, dt, div)
    lhs = vol * u_new * c

    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    f = dual[:, None]
    # T from each side: F_{a,eps} = f, F_{b,eps} = -f
    T = np.stack([-0.5 * f * (u_eps - u_old[a]) ** 2, 0.5 * f * (u_eps - u_old[b]) ** 2], axis=1)
    half_flux = 0.5 * f * u_eps**2
    cross_a = f * (u_eps - u_old[a])
    cross_b = -f * (u_eps - u_old[b])

    def gather(va, vb):
        out = np.zeros((grid.n_faces, u_old.shape[1]))
        scatter_add(out, a, va)
        scatter_add(out, b, vb)
        return out

    fb = boundary_outflow(grid, flux_face)[:, None]
    du = u_new - u_old
    R = vol / (2 * dt) * rn * du**2 + du * gather(cross_a, cross_b)
    kin = vol / (2 * dt) * (rn * u_new**2 - ro * u_old**2)
    rhs = kin + gather(half_flux, -half_flux) + 0.5 * fb * u_old**2 + gather(T[:, 0], T[:, 1]) + R

    scale = (
        np.abs(lhs)
        + vol / (2 * dt) * (rn * u_new**2 + ro * u_old**2 + rn * du**2)
        + gather(np.abs(half_flux), np.abs(half_flux))
        + gather(np.abs(T[:, 0]) + np.abs(cross_a * du[a]), np.abs(T[:, 1]) + np.abs(cross_b * du[b]))
        + np.abs(fb) * u_old**2
    )
    rel = np.abs(lhs - rhs) / np.maximum(scale, np.finfo(float).tiny)
    ledger = KineticLedger(T=T, R=R, xi_eff=effective_xi(grid, u_old, dual, u_eps))
    return float(rel.max(initial=0.0)), ledger


def corrective_terms(
    grid: Grid,
    rho_new,
    u_old,
    u_new,
    dual,
    u_eps,
    dt,
    xi_eff=None,
    nu_dual=None,
) -> KineticLedger:
    """Per-cell corrective terms S1, S2, S3.

    When ``nu_dual`` is given, the kinetic energy removed by the explicit
    stabilisation term, ``sum_eps nu_eps (du^n)(du^{n+1})``, is added to S1.
    """
    u_old = np.asarray(u_old, dtype=float)
    u_new = np.asarray(u_new, dtype=float)
    dual = np.asarray(dual, dtype=float)
    u_eps = np.asarray(u_eps, dtype=float).reshape(grid.n_dual, -1)
    if xi_eff is None:
        xi_eff = effective_xi(grid, u_old, dual, u_eps)
    du = u_new - u_old
    rho_new = np.asarray(rho_new, dtype=float)

    s1 = rho_new / (2 * dt) * grid.half_diamond * (du**2).sum(axis=1)[grid.cell_faces].sum(axis=1)
    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    f = dual[:, None]
    per_dual2 = (du[a] * f * (u_eps - u_old[a]) + du[b] * (-f) * (u_eps - u_old[b])).sum(axis=1)
    per_dual3 = (0.5 * (1.0 - xi_eff) * np.abs(f) * (u_old[a] - u_old[b]) ** 2).sum(axis=1)
    s2 = np.bincount(grid.dual_cell, per_dual2, minlength=grid.n_cells)
    s3 = np.bincount(grid.dual_cell, per_dual3, minlength=grid.n_cells)
    if nu_dual is not None:
        nu = np.broadcast_to(np.asarray(nu_dual, dtype=float), (grid.n_dual,))
        diss = (nu[:, None] * (u_old[a] - u_old[b]) * (u_new[a] - u_new[b])).sum(axis=1)
        s1 = s1 + np.bincount(grid.dual_cell, diss, minlength=grid.n_cells)
    T = np.zeros((grid.n_dual, 2, u_old.shape[1]))
    return KineticLedger(T=T, R=np.zeros_like(u_old), xi_eff=xi_eff, S1=s1, S2=s2, S3=s3)


def nonconservative_remainder(grid, rho_d_new, u_old, u_new, dual, u_eps, dt, xi_eff=None):
    """Per face: R summed over components plus the dissipative part of T."""
    u_old = np.asarray(u_old, dtype=float)
    u_new = np.asarray(u_new, dtype=float)
    dual = np.asarray(dual, dtype=float)
    u_eps = np.asarray(u_eps, dtype=float).reshape(grid.n_dual, -1)
    if xi_eff is None:
        xi_eff = effective_xi(grid, u_old, dual, u_eps)
    du = u_new - u_old
    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    f = dual[:, None]
    out = grid.dual_volume / (2 * dt) * np.asarray(rho_d_new) * (du**2).sum(axis=1)
    scatter_add(out, a, (du[a] * f * (u_eps - u_old[a])).sum(axis=1))
    scatter_add(out, b, (du[b] * (-f) * (u_eps - u_old[b])).sum(axis=1))
    diss = (0.25 * (1.0 - xi_eff) * np.abs(f) * (u_old[a] - u_old[b]) ** 2).sum(axis=1)
    scatter_add(out, a, diss)
    scatter_add(out, b, diss)
    return out


def dual_viscosity(grid: Grid, nu: float) -> np.ndarray:
    """nu_eps for the stabilisation term so that it scales as nu per unit volume."""
    return np.full(grid.n_dual, nu) * grid.cell_volume[grid.dual_cell] / grid.dim


def stabilization_term(grid: Grid, velocity, nu_dual) -> np.ndarray:
    """T_dif_sigma = sum_eps nu_eps (u_sigma - u_sigma')."""
    velocity = np.asarray(velocity, dtype=float)
    nu = np.broadcast_to(np.asarray(nu_dual, dtype=float), (grid.n_dual,))
    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    jump = nu[:, None] * (velocity[a] - velocity[b])
    out = np.zeros_like(velocity)
    scatter_add(out, a, jump)
    scatter_add(out, b, -jump)
    return out


@dataclass(frozen=True)
class StabilityReport:
    cfl: float
    tau: float
    eta: float


def stability_diagnostics(grid: Grid, rho_d_old, rho_d_new, flux_face, dual, dt, mu_dual=None) -> StabilityReport:
    """cfl, tau^n and eta^n = dt/tau^n (tau is inf when no dual flux is active)."""
    dual = np.asarray(dual, dtype=float)
    absflux = np.zeros(grid.n_faces)
    scatter_add(absflux, grid.dual_pair[:, 0], np.abs(dual))
    scatter_add(absflux, grid.dual_pair[:, 1], np.abs(dual))
    absflux += np.abs(boundary_outflow(grid, flux_face))
    cfl = float(np.max(dt * absflux / (np.asarray(rho_d_old) * grid.dual_volume), initial=0.0))
    tau = np.inf
    if mu_dual is not None:
        mu = np.broadcast_to(np.asarray(mu_dual, dtype=float), (grid.n_dual,))
        a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
        rn = np.asarray(rho_d_new)
        denom = dual**2 * (1.0 / (grid.dual_volume[a] * rn[a]) + 1.0 / (grid.dual_volume[b] * rn[b]))
        hk = grid.h_cell()
        num = 2.0 ** (1 - grid.dim) * hk ** (grid.dim - 2) * mu
        active = denom > 0
        if np.any(active):
            tau = float(np.min(num[active] / denom[active]))
    eta = 0.0 if np.isinf(tau) else dt / tau
    return StabilityReport(cfl=cfl, tau=tau, eta=eta)


def h1_seminorm_sq(grid: Grid, u, mu_dual) -> float:
    """|u|_E^2 = sum_eps mu_eps h^{d-2} (u_sigma - u_sigma')^2 for a scalar field."""
    u = np.asarray(u, dtype=float)
    mu = np.broadcast_to(np.asarray(mu_dual, dtype=float), (grid.n_dual,))
    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    return float(np.sum(mu * grid.h_cell() ** (grid.dim - 2) * (u[a] - u[b]) ** 2))


def transport_step(grid: Grid, rho_d_old, rho_d_new, velocity, flux_face, dual, params: SchemeParams, fixed=None):
    """One explicit step of the momentum convection alone.

    Solves ``C(rho, u) = 0`` for ``u^{n+1}`` on every face not flagged in
    ``fixed`` (default: the boundary faces, which keep their values).
    """
    velocity = np.asarray(velocity, dtype=float)
    if fixed is None:
        fixed = np.zeros(grid.n_faces, dtype=bool)
        fixed[grid.boundary_faces] = True
    u_eps = momentum_face_velocity(grid, velocity, dual, params)
    div = convection_divergence(grid, velocity, flux_face, dual, u_eps)
    new = (np.asarray(rho_d_old)[:, None] * velocity - params.dt * div) / np.asarray(rho_d_new)[:, None]
    new[fixed] = velocity[fixed]
    return new


def graph_laplacian(grid: Grid, mu_dual):
    """Sparse ``A`` with ``u.A u = |u|_E^2``: weights mu_eps h_K^{d-2} on dual faces."""
    w = np.broadcast_to(np.asarray(mu_dual, dtype=float), (grid.n_dual,)) * grid.h_cell() ** (grid.dim - 2)
    a, b = grid.dual_pair[:, 0], grid.dual_pair[:, 1]
    rows = np.concatenate([a, b, a, b])
    cols = np.concatenate([a, b, b, a])
    vals = np.concatenate([w, w, -w, -w])
    return sp.csr_matrix((vals, (rows, cols)), shape=(grid.n_faces, grid.n_faces))


def convection_diffusion_step(grid: Grid, rho_d_old, rho_d_new, u, flux_face, dual, params: SchemeParams, mu_dual):
    """One step of explicit convection plus implicit diffusion for a scalar component.

    Homogeneous Dirichlet conditions: ``u`` is zero on boundary faces.  The
    diffusion is the graph Laplacian of :func:`graph_laplacian`, so the
    coercivity inequality holds with equality.
    """
    u = np.asarray(u, dtype=float).copy()
    b_faces = grid.boundary_faces
    u[b_faces] = 0.0
    u_eps = momentum_face_velocity(grid, u[:, None], dual, params, component=0)
    div = convection_divergence(grid, u[:, None], flux_face, dual, u_eps)[:, 0]
    vol = grid.dual_volume
    rhs = vol * (np.asarray(rho_d_old) * u / params.dt - div)
    lap = graph_laplacian(grid, mu_dual)
    inner = grid.interior_faces
    mat = sp.diags(vol * np.asarray(rho_d_new) / params.dt) + lap
    mat = mat.tocsr()[inner][:, inner]
    new = np.zeros(grid.n_faces)
    new[inner] = spsolve(mat.tocsc(), rhs[inner])
    return new
