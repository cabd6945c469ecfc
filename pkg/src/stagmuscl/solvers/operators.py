"""Spatial operators on the staggered grid: divergence, gradient and the viscous form."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.sparse as sp

from ..grid import Grid

VISCOUS_FORMS = ("symmetric", "laplacian")

_GAUSS = np.array([-1.0, 1.0]) / np.sqrt(3.0)


@lru_cache(maxsize=32)
def divergence_matrix(grid: Grid) -> sp.csr_matrix:
    """B with B[K, sigma] = |sigma| n_{K,sigma} . e_axis, acting on normal components."""
    rows = np.repeat(np.arange(grid.n_cells), 2 * grid.dim)
    cols = grid.cell_faces.ravel()
    vals = (grid.owner_sign() * grid.face_area[grid.cell_faces]).ravel()
    return sp.csr_matrix((vals, (rows, cols)), shape=(grid.n_cells, grid.n_faces))


def velocity_divergence(grid: Grid, velocity) -> np.ndarray:
    """div(u)_K = (1/|K|) sum_sigma |sigma| u_sigma . n_{K,sigma}."""
    velocity = np.asarray(velocity, dtype=float)
    un = velocity[np.arange(grid.n_faces), grid.face_axis]
    return divergence_matrix(grid) @ un / grid.cell_volume


def pressure_gradient(grid: Grid, p, boundary_pressure=None) -> np.ndarray:
    """(grad p)_sigma = |sigma|/|D_sigma| (p_L - p_K) n_{K,sigma}, normal component only.

    On external faces the gradient is zero unless ``boundary_pressure`` gives
    a finite exterior value for that face, in which case it plays the role
    of p_L.
    """
    p = np.asarray(p, dtype=float)
    g = -(divergence_matrix(grid).T @ p) / grid.dual_volume
    b = grid.boundary_faces
    g[b] = 0.0
    if boundary_pressure is not None:
        pb = np.asarray(boundary_pressure, dtype=float)[b]
        use = np.isfinite(pb)
        sign = np.where(grid.face_cells[b, 0] < 0, -1.0, 1.0)  # outward normal . e_axis
        inner = p[np.maximum(grid.face_cells[b, 0], grid.face_cells[b, 1])]
        g[b[use]] = (grid.face_area[b] / grid.dual_volume[b] * (pb - inner) * sign)[use]
    out = np.zeros((grid.n_faces, grid.dim))
    out[np.arange(grid.n_faces), grid.face_axis] = g
    return out


def _rt_gradients(hx: float, hy: float):
    """Physical gradients of the four shape functions at the 2x2 Gauss points.

    Returns an array of shape (4 points, 4 shapes, 2) and the quadrature
    weight per point.  Shape functions are the mean-value Rannacher-Turek
    basis in the order -x, +x, -y, +y.
    """
    pts = [(x, y) for y in _GAUSS for x in _GAUSS]
    grads = np.empty((4, 4, 2))
    for q, (x, y) in enumerate(pts):
        dxi = np.array([-0.5 + 0.75 * x, 0.5 + 0.75 * x, -0.75 * x, -0.75 * x])
        deta = np.array([-0.75 * y, -0.75 * y, -0.5 + 0.75 * y, 0.5 + 0.75 * y])
        grads[q, :, 0] = dxi * 2.0 / hx
        grads[q, :, 1] = deta * 2.0 / hy
    return grads, hx * hy / 4.0


def rt_shape_values(xi, eta):
    """Reference shape functions at (xi, eta) in [-1, 1]^2, order -x, +x, -y, +y."""
    q = 0.375 * (xi * xi - eta * eta)
    return np.array([0.25 - 0.5 * xi + q, 0.25 + 0.5 * xi + q, 0.25 - 0.5 * eta - q, 0.25 + 0.5 * eta - q])


@lru_cache(maxsize=16)
def element_matrix(dim: int, h: tuple, form: str = "symmetric") -> np.ndarray:
    """Local stiffness for unit viscosity, dofs ordered (component, local face)."""
    if form not in VISCOUS_FORMS:
        raise ValueError(f"unknown viscous form {form!r}")
    if dim == 1:
        (hx,) = h
        k = np.array([[1.0, -1.0], [-1.0, 1.0]]) / hx
        return 2.0 * k if form == "symmetric" else k
    grads, w = _rt_gradients(*h)
    lap = w * np.einsum("qad,qbd->ab", grads, grads)
    ke = np.zeros((8, 8))
    for k in range(2):
        ke[4 * k : 4 * k + 4, 4 * k : 4 * k + 4] += lap
        if form == "symmetric":
            for i in range(2):
                # row (k, b), column (i, a): int d_k phi_a d_i phi_b
                ke[4 * k : 4 * k + 4, 4 * i : 4 * i + 4] += w * np.einsum(
                    "qb,qa->ba", grads[:, :, i], grads[:, :, k]
                )
    return ke


@lru_cache(maxsize=16)
def _viscous_matrix_cached(grid: Grid, form: str) -> sp.csr_matrix:
    ke = element_matrix(grid.dim, grid.h, form)
    d, nf = grid.dim, grid.n_faces
    nloc = 2 * d
    dofs = np.concatenate([grid.cell_faces + i * nf for i in range(d)], axis=1)  # (nc, d*nloc)
    rows = np.repeat(dofs, d * nloc, axis=1).ravel()
    cols = np.tile(dofs, (1, d * nloc)).ravel()
    vals = np.tile(ke.ravel(), grid.n_cells)
    return sp.csr_matrix((vals, (rows, cols)), shape=(d * nf, d * nf))


def viscous_matrix(grid: Grid, mu: float = 1.0, form: str = "symmetric") -> sp.csr_matrix:
    """Assembled viscous form A, dofs ordered component-major (i * n_faces + sigma)."""
    return mu * _viscous_matrix_cached(grid, form)


def viscous_operator(grid: Grid, velocity, mu: float, form: str = "symmetric") -> np.ndarray:
    """Explicit viscous force per unit dual volume, -div(mu (grad u + grad u^T))_sigma."""
    velocity = np.asarray(velocity, dtype=float)
    flat = velocity.T.reshape(-1)
    force = viscous_matrix(grid, mu, form) @ flat
    return force.reshape(grid.dim, grid.n_faces).T / grid.dual_volume[:, None]


@lru_cache(maxsize=16)
def coercivity_constant(dim: int, h: tuple) -> float:
    """Largest c with u^T A_K u >= c sum_{eps in K} h^{d-2}(u_sigma - u_sigma')^2.

    A_K is the scalar (Laplacian) element matrix for unit viscosity; the
    right-hand side is the graph Laplacian of the dual faces of one cell.
    Computed as the smallest generalised eigenvalue on the complement of
    constants.
    """
    from ..grid import _LOCAL_PAIRS

    a = element_matrix(dim, h, "laplacian")[: 2 * dim, : 2 * dim]
    lap = np.zeros_like(a)
    for i, j in _LOCAL_PAIRS[dim]:
        lap[i, i] += 1
        lap[j, j] += 1
        lap[i, j] -= 1
        lap[j, i] -= 1
    lap *= max(h) ** (dim - 2)
    n = 2 * dim
    # orthonormal basis of the complement of constants
    q, _ = np.linalg.qr(np.column_stack([np.ones(n), np.eye(n)[:, : n - 1]]))
    basis = q[:, 1:]
    ar, lr = basis.T @ a @ basis, basis.T @ lap @ basis
    lchol = np.linalg.cholesky(lr)
    linv = np.linalg.inv(lchol)
    vals = np.linalg.eigvalsh(linv @ ar @ linv.T)
    return float(vals.min())


def dual_face_viscosity(grid: Grid, mu: float) -> np.ndarray:
    """mu_eps realising the coercivity inequality for the Laplacian viscous form."""
    return np.full(grid.n_dual, mu * coercivity_constant(grid.dim, grid.h))
