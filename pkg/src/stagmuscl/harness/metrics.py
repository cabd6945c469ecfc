"""Post-processing: error norms, observed orders and streamfunction metrics."""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..grid import Grid

log = logging.getLogger(__name__)


def l1_error(weights, computed, exact) -> float:
    """Weighted L1 error, sum_i w_i |computed_i - exact_i| (componentwise summed)."""
    diff = np.abs(np.asarray(computed, dtype=float) - np.asarray(exact, dtype=float))
    if diff.ndim > 1:
        diff = diff.sum(axis=tuple(range(1, diff.ndim)))
    return float(np.sum(np.asarray(weights, dtype=float) * diff))


def observed_orders(h, errors) -> tuple[float, np.ndarray]:
    """Least-squares slope of log(error) against log(h), plus the pairwise orders.

    Returns NaN (order undefined) when any error is zero.
    """
    h = np.asarray(h, dtype=float)
    e = np.asarray(errors, dtype=float)
    if h.size < 2:
        raise ValueError("at least two levels are needed for an order")
    if np.any(e <= 0) or not np.all(np.isfinite(e)):
        return float("nan"), np.full(h.size - 1, np.nan)
    lh, le = np.log(h), np.log(e)
    slope = np.polyfit(lh, le, 1)[0]
    pairwise = np.diff(le) / np.diff(lh)
    return float(slope), pairwise


@dataclass(frozen=True)
class StreamfunctionMetrics:
    psi: np.ndarray  # (nx + 1, ny + 1) vertex values
    amplitude: float
    primary: tuple[float, float]
    secondary: tuple[float, float]
    path_residual: float


def streamfunction(grid: Grid, velocity) -> tuple[np.ndarray, float]:
    """Vertex streamfunction with psi = 0 at the lower-left corner.

    Integrates d psi/dy = u_x up every vertical grid line, starting from the
    bottom row, which is itself integrated with d psi/dx = -u_y.  Returns
    psi and the path-independence residual: the largest mismatch of
    d psi/dx = -u_y on the remaining horizontal lines.
    """
    if grid.dim != 2:
        raise ValueError("the streamfunction needs a 2D grid")
    velocity = np.asarray(velocity, dtype=float)
    hx, hy = grid.h
    ux = velocity[grid.vface_index, 0]  # (nx + 1, ny)
    uy = velocity[grid.hface_index, 1]  # (nx, ny + 1)
    nx, ny = grid.shape
    psi = np.zeros((nx + 1, ny + 1))
    psi[1:, 0] = -hx * np.cumsum(uy[:, 0])
    psi[:, 1:] = psi[:, :1] + hy * np.cumsum(ux, axis=1)
    mismatch = (psi[1:, :] - psi[:-1, :]) + hx * uy
    return psi, float(np.max(np.abs(mismatch)))


def streamfunction_metrics(grid: Grid, velocity, tol: float = 1e-8) -> StreamfunctionMetrics:
    """psi, its amplitude and the primary / lower-right secondary vortex centres.

    The primary vortex is the psi minimum, the secondary the psi maximum in
    the lower-right quadrant; both at vertex resolution.
    """
    psi, residual = streamfunction(grid, velocity)
    scale = max(np.max(np.abs(velocity)), 1e-300) * max(grid.h)
    if residual > tol * scale * 10:
        log.warning("velocity is not discretely divergence-free: path mismatch %.3e", residual)
    xv, yv = grid.vertex_coordinates()
    i, j = np.unravel_index(np.argmin(psi), psi.shape)
    primary = (float(xv[i]), float(yv[j]))
    xmid = grid.origin[0] + 0.5 * grid.extent[0]
    ymid = grid.origin[1] + 0.5 * grid.extent[1]
    quad = (xv[:, None] >= xmid) & (yv[None, :] <= ymid)
    masked = np.where(quad, psi, -np.inf)
    i, j = np.unravel_index(np.argmax(masked), psi.shape)
    secondary = (float(xv[i]), float(yv[j]))
    return StreamfunctionMetrics(
        psi=psi,
        amplitude=float(psi.max() - psi.min()),
        primary=primary,
        secondary=secondary,
        path_residual=residual,
    )
