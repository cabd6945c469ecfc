"""Boundary data and the velocity degrees of freedom they pin."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

import numpy as np

from ..grid import SIDES, Grid
from ..state import State

Value = Union[float, tuple, list, Callable[[np.ndarray, float], np.ndarray]]


class BoundaryConfigError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BoundaryData:
    """Prescribed values per domain side.

    ``velocity`` applies to ``dirichlet`` sides (default 0).  ``density``
    and ``internal_energy`` are used as upwind values where the flow enters
    the domain.  A value is a constant (scalar or d-tuple) or a callable
    ``f(points, t)`` returning one value per point.
    """

    velocity: Mapping[str, Value] = field(default_factory=dict)
    density: Mapping[str, Value] = field(default_factory=dict)
    internal_energy: Mapping[str, Value] = field(default_factory=dict)


def validate_boundary(grid: Grid, bc: BoundaryData, model: str) -> None:
    sides = SIDES[: 2 * grid.dim]
    for name in ("velocity", "density", "internal_energy"):
        unknown = set(getattr(bc, name)) - set(sides)
        if unknown:
            raise BoundaryConfigError(f"{name} given for unknown sides {sorted(unknown)}")
    for side in bc.velocity:
        tag = grid.boundary_tags[SIDES.index(side)]
        if tag != "dirichlet":
            raise BoundaryConfigError(f"velocity prescribed on side {side} tagged {tag!r}")
    if model == "incompressible":
        for side in list(bc.density) + list(bc.internal_energy):
            raise BoundaryConfigError(f"incompressible model takes no density/energy data (side {side})")
    if model != "euler" and bc.internal_energy:
        raise BoundaryConfigError("internal energy data only apply to the euler model")


def _evaluate(value: Value, points: np.ndarray, t: float, width: int) -> np.ndarray:
    if callable(value):
        out = np.asarray(value(points, t), dtype=float)
    else:
        out = np.broadcast_to(np.asarray(value, dtype=float), (points.shape[0],) + ((width,) if width > 1 else ()))
    return out.reshape(points.shape[0], width) if width > 1 else out.reshape(points.shape[0])


def pinned_mask(grid: Grid) -> np.ndarray:
    """(n_faces, d) True where a velocity component has no equation."""
    mask = np.zeros((grid.n_faces, grid.dim), dtype=bool)
    for s, side in enumerate(SIDES[: 2 * grid.dim]):
        faces = grid.side_faces(side)
        tag = grid.boundary_tags[s]
        if tag == "dirichlet":
            mask[faces, :] = True
        elif tag in ("slip_wall", "symmetry"):
            mask[faces, grid.face_axis[faces]] = True
    return mask


def boundary_velocity(grid: Grid, bc: BoundaryData, t: float) -> np.ndarray:
    """Values of the pinned velocity components (0 where unspecified)."""
    out = np.zeros((grid.n_faces, grid.dim))
    for s, side in enumerate(SIDES[: 2 * grid.dim]):
        if grid.boundary_tags[s] != "dirichlet" or side not in bc.velocity:
            continue
        faces = grid.side_faces(side)
        out[faces] = _evaluate(bc.velocity[side], grid.face_centers[faces], t, grid.dim)
    return out


def boundary_scalar(grid: Grid, values: Mapping[str, Value], t: float) -> np.ndarray:
    """Per-face prescribed scalar; NaN on faces without data."""
    out = np.full(grid.n_faces, np.nan)
    for side, value in values.items():
        faces = grid.side_faces(side)
        out[faces] = _evaluate(value, grid.face_centers[faces], t, 1)
    return out


def apply_boundary_conditions(grid: Grid, state: State, bc: BoundaryData, t: float | None = None) -> State:
    """Return a state whose pinned velocity components carry the prescribed values."""
    t = state.time if t is None else t
    mask = pinned_mask(grid)
    vel = np.array(state.velocity, dtype=float)
    vel[mask] = boundary_velocity(grid, bc, t)[mask]
    return state.evolve(velocity=vel)


def outflow_faces(grid: Grid) -> np.ndarray:
    b = grid.boundary_faces
    tags = np.array(grid.boundary_tags)
    return b[tags[grid.face_side[b]] == "neumann_outflow"]
