"""Staggered Cartesian mesh: primal cells, faces, half-diamonds and dual faces.

Enumeration conventions (all deterministic):

* cells are numbered lexicographically, x fastest: ``k = i + nx * j``;
* local faces of a cell are ordered ``-x, +x, -y, +y``;
* faces are numbered by first appearance when looping over cells in order
  and, inside a cell, over its local faces;
* dual faces are numbered cell by cell.  In 2D a cell owns four of them,
  pairing local faces ``(-x,-y), (-x,+y), (+x,-y), (+x,+y)``; in 1D a cell
  owns a single one, pairing ``(-x,+x)``.  The first face of a pair is the
  owner of the stored dual flux orientation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

BOUNDARY_TAGS = ("dirichlet", "neumann_outflow", "slip_wall", "symmetry")
SIDES = ("x-", "x+", "y-", "y+")

_LOCAL_PAIRS = {
    1: ((0, 1),),
    2: ((0, 2), (0, 3), (1, 2), (1, 3)),
}


def scatter_add(out: np.ndarray, index, values) -> None:
    """In-place ``out[index] += values`` with repeated indices accumulated.

    Same result as ``np.add.at`` (up to summation order), built on bincount.
    """
    index = np.asarray(index).ravel()
    values = np.broadcast_to(np.asarray(values, dtype=float), (index.size,) + out.shape[1:])
    n = out.shape[0]
    if out.ndim == 1:
        out += np.bincount(index, weights=values, minlength=n)
        return
    flat = values.reshape(index.size, -1)
    view = out.reshape(n, -1)
    for c in range(flat.shape[1]):
        view[:, c] += np.bincount(index, weights=flat[:, c], minlength=n)


class GridError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Grid:
    dim: int
    shape: tuple[int, ...]
    h: tuple[float, ...]
    origin: tuple[float, ...]
    extent: tuple[float, ...]
    boundary_tags: tuple[str, ...]

    cell_volume: np.ndarray
    cell_centers: np.ndarray
    cell_faces: np.ndarray
    cell_neighbors: np.ndarray

    face_axis: np.ndarray
    face_area: np.ndarray
    face_centers: np.ndarray
    face_cells: np.ndarray
    face_side: np.ndarray
    dual_volume: np.ndarray

    dual_cell: np.ndarray
    dual_pair: np.ndarray
    dual_local: np.ndarray
    dual_opposite: np.ndarray

    vface_index: np.ndarray
    hface_index: np.ndarray | None

    @property
    def n_cells(self) -> int:
        return self.cell_volume.size

    @property
    def n_faces(self) -> int:
        return self.face_area.size

    @property
    def n_dual(self) -> int:
        return self.dual_cell.size

    @property
    def half_diamond(self) -> np.ndarray:
        """Measure |D_{K,sigma}| = |K| / (2d), one value per cell."""
        return self.cell_volume / (2 * self.dim)

    @property
    def boundary_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_side >= 0)

    @property
    def interior_faces(self) -> np.ndarray:
        return np.flatnonzero(self.face_side < 0)

    @property
    def domain_measure(self) -> float:
        return float(np.prod(self.extent))

    def face_tag(self, face: int) -> str | None:
        side = self.face_side[face]
        return None if side < 0 else self.boundary_tags[side]

    def side_faces(self, side: str) -> np.ndarray:
        return np.flatnonzero(self.face_side == SIDES.index(side))

    def owner_sign(self) -> np.ndarray:
        """(n_cells, 2d) array of n_{K,sigma} . e_axis for each local face."""
        sign = np.empty((self.n_cells, 2 * self.dim))
        sign[:, 0::2] = -1.0
        sign[:, 1::2] = 1.0
        return sign

    def h_cell(self) -> float:
        return max(self.h)

    def vertex_coordinates(self) -> tuple[np.ndarray, ...]:
        return tuple(
            self.origin[a] + self.h[a] * np.arange(self.shape[a] + 1) for a in range(self.dim)
        )


def _parse_tags(dim: int, boundary_tags) -> tuple[str, ...]:
    sides = SIDES[: 2 * dim]
    if boundary_tags is None:
        boundary_tags = "dirichlet"
    if isinstance(boundary_tags, str):
        tags = {s: boundary_tags for s in sides}
    else:
        tags = dict(boundary_tags)
        unknown = set(tags) - set(sides)
        if unknown:
            raise GridError(f"unknown boundary sides {sorted(unknown)} for dim={dim}")
        missing = set(sides) - set(tags)
        if missing:
            raise GridError(f"missing boundary tags for sides {sorted(missing)}")
    for s in sides:
        if tags[s] not in BOUNDARY_TAGS:
            raise GridError(f"unknown boundary tag {tags[s]!r} on side {s}")
    return tuple(tags[s] for s in sides)


def build_cartesian(
    dim: int,
    cell_counts,
    origin=None,
    extent=None,
    boundary_tags: str | Mapping[str, str] | None = None,
) -> Grid:
    """Build a uniform axis-aligned staggered grid in one or two dimensions."""
    if dim not in (1, 2):
        raise GridError(f"dim must be 1 or 2, got {dim}")
    counts = tuple(int(c) for c in np.atleast_1d(cell_counts))
    if len(counts) != dim:
        raise GridError(f"expected {dim} cell counts, got {counts}")
    if any(c < 1 for c in counts):
        raise GridError(f"cell counts must be >= 1, got {counts}")
    origin = tuple(float(o) for o in np.atleast_1d(origin if origin is not None else [0.0] * dim))
    extent = tuple(float(e) for e in np.atleast_1d(extent if extent is not None else [1.0] * dim))
    if len(origin) != dim or len(extent) != dim:
        raise GridError("origin and extent must have one entry per axis")
    if any(not np.isfinite(e) or e <= 0.0 for e in extent):
        raise GridError(f"extent must be strictly positive, got {extent}")
    tags = _parse_tags(dim, boundary_tags)
    h = tuple(e / c for e, c in zip(extent, counts))

    if dim == 1:
        return _build_1d(counts, h, origin, extent, tags)
    return _build_2d(counts, h, origin, extent, tags)


def _build_1d(counts, h, origin, extent, tags) -> Grid:
    (nx,) = counts
    (hx,) = h
    nc, nf = nx, nx + 1
    cells = np.arange(nc)
    cell_faces = np.stack([cells, cells + 1], axis=1)
    nbr = np.stack([cells - 1, cells + 1], axis=1)
    nbr[nbr >= nc] = -1

    face_cells = np.stack([np.arange(nf) - 1, np.arange(nf)], axis=1)
    face_cells[face_cells >= nc] = -1
    face_side = np.full(nf, -1)
    face_side[0], face_side[-1] = 0, 1
    face_centers = (origin[0] + hx * np.arange(nf))[:, None]
    cell_volume = np.full(nc, hx)
    hd = cell_volume / 2.0
    dual_volume = np.zeros(nf)
    np.add.at(dual_volume, cell_faces.ravel(), np.repeat(hd, 2))

    dual_cell = cells.copy()
    dual_local = np.tile(np.array([[0, 1]]), (nc, 1))
    dual_pair = cell_faces.copy()
    grid = Grid(
        dim=1,
        shape=counts,
        h=h,
        origin=origin,
        extent=extent,
        boundary_tags=tags,
        cell_volume=cell_volume,
        cell_centers=(origin[0] + hx * (cells + 0.5))[:, None],
        cell_faces=cell_faces,
        cell_neighbors=nbr,
        face_axis=np.zeros(nf, dtype=int),
        face_area=np.ones(nf),
        face_centers=face_centers,
        face_cells=face_cells,
        face_side=face_side,
        dual_volume=dual_volume,
        dual_cell=dual_cell,
        dual_pair=dual_pair,
        dual_local=dual_local,
        dual_opposite=_opposites(cell_faces, nbr, dual_cell, dual_local),
        vface_index=np.arange(nf),
        hface_index=None,
    )
    _freeze(grid)
    return grid


def _build_2d(counts, h, origin, extent, tags) -> Grid:
    nx, ny = counts
    hx, hy = h
    nc = nx * ny
    ci, cj = np.meshgrid(np.arange(nx), np.arange(ny), indexing="xy")
    ci, cj = ci.ravel(), cj.ravel()
    cells = ci + nx * cj

    # first appearance of every vertical face (i, j) and horizontal face (i, j)
    vi, vj = np.meshgrid(np.arange(nx + 1), np.arange(ny), indexing="ij")
    vi, vj = vi.ravel(), vj.ravel()
    v_cell = np.where(vi >= 1, (vi - 1) + nx * vj, vj * nx)
    v_loc = np.where(vi >= 1, 1, 0)
    hi, hj = np.meshgrid(np.arange(nx), np.arange(ny + 1), indexing="ij")
    hi, hj = hi.ravel(), hj.ravel()
    h_cell = np.where(hj >= 1, hi + nx * (hj - 1), hi)
    h_loc = np.where(hj >= 1, 3, 2)

    key_cell = np.concatenate([v_cell, h_cell])
    key_loc = np.concatenate([v_loc, h_loc])
    order = np.lexsort((key_loc, key_cell))
    number = np.empty_like(order)
    number[order] = np.arange(order.size)
    nv = vi.size
    vface_index = number[:nv].reshape(nx + 1, ny)
    hface_index = number[nv:].reshape(nx, ny + 1)
    nf = order.size

    cell_faces = np.stack(
        [
            vface_index[ci, cj],
            vface_index[ci + 1, cj],
            hface_index[ci, cj],
            hface_index[ci, cj + 1],
        ],
        axis=1,
    )
    nbr = np.stack(
        [
            np.where(ci > 0, cells - 1, -1),
            np.where(ci < nx - 1, cells + 1, -1),
            np.where(cj > 0, cells - nx, -1),
            np.where(cj < ny - 1, cells + nx, -1),
        ],
        axis=1,
    )

    face_axis = np.empty(nf, dtype=int)
    face_area = np.empty(nf)
    face_centers = np.empty((nf, 2))
    face_cells = np.full((nf, 2), -1)
    face_side = np.full(nf, -1)

    fv = vface_index.ravel()
    face_axis[fv] = 0
    face_area[fv] = hy
    face_centers[fv, 0] = origin[0] + hx * vi
    face_centers[fv, 1] = origin[1] + hy * (vj + 0.5)
    face_cells[fv, 0] = np.where(vi >= 1, (vi - 1) + nx * vj, -1)
    face_cells[fv, 1] = np.where(vi <= nx - 1, vi + nx * vj, -1)
    face_side[fv] = np.where(vi == 0, 0, np.where(vi == nx, 1, -1))

    fh = hface_index.ravel()
    face_axis[fh] = 1
    face_area[fh] = hx
    face_centers[fh, 0] = origin[0] + hx * (hi + 0.5)
    face_centers[fh, 1] = origin[1] + hy * hj
    face_cells[fh, 0] = np.where(hj >= 1, hi + nx * (hj - 1), -1)
    face_cells[fh, 1] = np.where(hj <= ny - 1, hi + nx * hj, -1)
    face_side[fh] = np.where(hj == 0, 2, np.where(hj == ny, 3, -1))

    cell_volume = np.full(nc, hx * hy)
    hd = cell_volume / 4.0
    dual_volume = np.zeros(nf)
    np.add.at(dual_volume, cell_faces.ravel(), np.repeat(hd, 4))

    pairs = np.array(_LOCAL_PAIRS[2])
    dual_cell = np.repeat(cells, 4)
    dual_local = np.tile(pairs, (nc, 1))
    dual_pair = cell_faces[dual_cell[:, None], dual_local]

    grid = Grid(
        dim=2,
        shape=counts,
        h=h,
        origin=origin,
        extent=extent,
        boundary_tags=tags,
        cell_volume=cell_volume,
        cell_centers=np.stack(
            [origin[0] + hx * (ci + 0.5), origin[1] + hy * (cj + 0.5)], axis=1
        ),
        cell_faces=cell_faces,
        cell_neighbors=nbr,
        face_axis=face_axis,
        face_area=face_area,
        face_centers=face_centers,
        face_cells=face_cells,
        face_side=face_side,
        dual_volume=dual_volume,
        dual_cell=dual_cell,
        dual_pair=dual_pair,
        dual_local=dual_local,
        dual_opposite=_opposites(cell_faces, nbr, dual_cell, dual_local),
        vface_index=vface_index,
        hface_index=hface_index,
    )
    _freeze(grid)
    return grid


def _opposites(cell_faces, nbr, dual_cell, dual_local) -> np.ndarray:
    """Opposite face for each dual face and each choice of upwind side.

    With sigma^- the face at local index ``a`` of cell K and the dual face
    pairing ``(a, b)``, the diamond D_{sigma^-} continues into the
    neighbour N of K across sigma^-.  The dual face of D_{sigma^-} that
    does not touch epsilon lies in N, between sigma^- and the face of N at
    local index ``b ^ 1``.  Absent when sigma^- is a boundary face.
    """
    out = np.full((dual_cell.size, 2), -1)
    for s in (0, 1):
        a = dual_local[:, s]
        b = dual_local[:, 1 - s]
        n = nbr[dual_cell, a]
        ok = n >= 0
        out[ok, s] = cell_faces[n[ok], b[ok] ^ 1]
    return out


def _freeze(grid: Grid) -> None:
    for value in vars(grid).values():
        if isinstance(value, np.ndarray):
            value.setflags(write=False)


def opposite_face(grid: Grid, dual_face: int, upwind_face: int) -> int | None:
    """Face whose dual cell lies across D_{upwind_face} from ``dual_face``.

    Returns None when the upwind dual cell touches the domain boundary and
    no such face exists.
    """
    pair = grid.dual_pair[dual_face]
    if upwind_face == pair[0]:
        side = 0
    elif upwind_face == pair[1]:
        side = 1
    else:
        raise GridError(f"face {upwind_face} is not adjacent to dual face {dual_face}")
    opp = int(grid.dual_opposite[dual_face, side])
    return None if opp < 0 else opp


def dual_faces_of(grid: Grid, face: int) -> np.ndarray:
    """Interior dual faces bounding D_face, in increasing index order."""
    return np.flatnonzero((grid.dual_pair == face).any(axis=1))
