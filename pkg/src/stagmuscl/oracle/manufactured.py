"""Smooth manufactured solutions of the barotropic Navier-Stokes equations.

The fields are trigonometric; the sources are the exact residuals of the
mass and momentum balances, obtained by symbolic differentiation and
compiled to numpy functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
import sympy as sy

MANUFACTURED_MODELS = ("barotropic",)
FAMILIES = ("travelling", "standing")


@dataclass(frozen=True)
class ManufacturedSolution:
    """Exact fields and sources; every sampler takes ``(points, t)``.

    ``density`` and ``mass_source`` return one value per point, ``velocity``
    and ``momentum_source`` an ``(n, d)`` array.  The momentum source is the
    residual of d(rho u)/dt + div(rho u u) + grad p - div(tau) per unit volume.
    """

    dim: int
    density: Callable
    velocity: Callable
    pressure: Callable
    mass_source: Callable
    momentum_source: Callable


def _compile(args, expr, dim):
    f = sy.lambdify(args, expr, modules="numpy", cse=True)

    def sample(points, t):
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        out = f(*[pts[:, i] for i in range(dim)], float(t))
        return np.broadcast_to(np.asarray(out, dtype=float), (pts.shape[0],)).copy()

    return sample


def _stack(samplers):
    def sample(points, t):
        return np.stack([s(points, t) for s in samplers], axis=1)

    return sample


def manufactured_solution(
    model: str,
    wavenumbers,
    amplitudes,
    *,
    dim: int = 2,
    a: float = 1.0,
    gamma: float = 2.0,
    mu: float = 0.0,
    rho_mean: float = 1.0,
    velocity_mean=None,
    frequency: float = 1.0,
    viscous_form: str = "symmetric",
    family: str = "travelling",
) -> ManufacturedSolution:
    """Build one of two families, with theta = 2 pi frequency t.

    ``travelling``::

        rho = rho_mean + A_rho sin(2 pi k.x - theta),
        u_i = U_i + A_u sin(2 pi k_i x_i) prod_{j != i} cos(2 pi k_j x_j - theta)

    ``standing``::

        rho = rho_mean + A_rho cos(theta) prod_j cos(2 pi k_j x_j),
        u_i = U_i + A_u cos(theta) sin(2 pi k_i x_i) prod_{j != i} cos(2 pi k_j x_j)

    The pressure is a rho^gamma and ``amplitudes = (A_rho, A_u)``.  With
    integer wavenumbers and zero mean velocity the normal velocity vanishes
    on the faces of the unit box, so no mass crosses walls carrying the
    exact (Dirichlet) velocity.  The standing family also has zero normal
    derivatives of rho and of the tangential velocity there.
    """
    if model not in MANUFACTURED_MODELS:
        raise ValueError(f"no manufactured solution for model {model!r}")
    if dim not in (1, 2):
        raise ValueError("dim must be 1 or 2")
    k = [float(v) for v in np.atleast_1d(wavenumbers)]
    if len(k) != dim:
        raise ValueError(f"expected {dim} wavenumbers")
    a_rho, a_u = (float(v) for v in amplitudes)
    if rho_mean <= 0 or abs(a_rho) >= rho_mean:
        raise ValueError("density amplitude must stay below the (positive) mean")
    if viscous_form not in ("symmetric", "laplacian"):
        raise ValueError(f"unknown viscous form {viscous_form!r}")
    if family not in FAMILIES:
        raise ValueError(f"unknown manufactured family {family!r}")
    mean_u = np.zeros(dim) if velocity_mean is None else np.asarray(velocity_mean, dtype=float)

    xs = sy.symbols("x y")[:dim]
    t = sy.Symbol("t")
    theta = 2 * sy.pi * frequency * t
    if family == "travelling":
        phases = [2 * sy.pi * k[j] * xs[j] - theta for j in range(dim)]
        rho = rho_mean + a_rho * sy.sin(sum(2 * sy.pi * k[j] * xs[j] for j in range(dim)) - theta)
        scale = 1
    else:
        phases = [2 * sy.pi * k[j] * xs[j] for j in range(dim)]
        scale = sy.cos(theta)
        rho = rho_mean + a_rho * scale * sy.prod([sy.cos(ph) for ph in phases])
    u = []
    for i in range(dim):
        term = a_u * scale
        for j in range(dim):
            term = term * (sy.sin(2 * sy.pi * k[j] * xs[j]) if j == i else sy.cos(phases[j]))
        u.append(float(mean_u[i]) + term)
    p = a * rho**gamma

    mass = sy.diff(rho, t) + sum(sy.diff(rho * u[j], xs[j]) for j in range(dim))
    momentum = []
    for i in range(dim):
        r = sy.diff(rho * u[i], t) + sum(sy.diff(rho * u[i] * u[j], xs[j]) for j in range(dim))
        r += sy.diff(p, xs[i])
        if mu:
            if viscous_form == "symmetric":
                r -= mu * sum(sy.diff(sy.diff(u[i], xs[j]) + sy.diff(u[j], xs[i]), xs[j]) for j in range(dim))
            else:
                r -= mu * sum(sy.diff(u[i], xs[j], 2) for j in range(dim))
        momentum.append(r)

    args = (*xs, t)
    return ManufacturedSolution(
        dim=dim,
        density=_compile(args, rho, dim),
        velocity=_stack([_compile(args, ui, dim) for ui in u]),
        pressure=_compile(args, p, dim),
        mass_source=_compile(args, mass, dim),
        momentum_source=_stack([_compile(args, ri, dim) for ri in momentum]),
    )
