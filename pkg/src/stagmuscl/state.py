"""Discrete unknowns at one time level and equations of state."""
from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .grid import Grid

CELL_COLUMNS_1D = ("x", "rho", "p", "e")
CELL_COLUMNS_2D = ("x", "y", "rho", "p", "e")
FACE_COLUMNS_1D = ("x", "u")
FACE_COLUMNS_2D = ("x", "y", "ux", "uy")


class EosDomainError(ValueError):
    """Raised when an equation of state is evaluated outside its domain."""


@dataclass(frozen=True)
class Eos:
    kind: str = "ideal_gas"
    gamma: float = 1.4
    a: float = 1.0
    rho0: float = 1.0

    def __post_init__(self):
        if self.kind not in ("incompressible", "barotropic", "ideal_gas"):
            raise ValueError(f"unknown eos kind {self.kind!r}")
        if self.kind == "barotropic" and (self.a <= 0 or self.gamma < 1):
            raise ValueError("barotropic law needs a > 0 and gamma >= 1")
        if self.kind == "ideal_gas" and self.gamma <= 1:
            raise ValueError("ideal gas needs gamma > 1")
        if self.kind == "incompressible" and self.rho0 <= 0:
            raise ValueError("incompressible density must be positive")

    @classmethod
    def barotropic(cls, a: float, gamma: float) -> "Eos":
        return cls("barotropic", gamma=gamma, a=a)

    @classmethod
    def ideal_gas(cls, gamma: float) -> "Eos":
        return cls("ideal_gas", gamma=gamma)

    @classmethod
    def incompressible(cls, rho0: float = 1.0) -> "Eos":
        return cls("incompressible", rho0=rho0)


def _check_nonnegative(values, name, strict=False):
    v = np.asarray(values, dtype=float)
    bad = ~(v > 0) if strict else ~(v >= 0)
    if np.any(bad):
        idx = np.flatnonzero(np.atleast_1d(bad))[0]
        val = np.atleast_1d(v)[idx]
        cond = "> 0" if strict else ">= 0"
        raise EosDomainError(f"{name} must be {cond}: cell {idx} has {name}={val!r}")
    return v


def eos_pressure(eos: Eos, rho, e=None):
    rho = _check_nonnegative(rho, "rho", strict=True)
    if eos.kind == "barotropic":
        return eos.a * rho**eos.gamma
    if eos.kind == "ideal_gas":
        if e is None:
            raise EosDomainError("ideal gas pressure needs the internal energy")
        e = _check_nonnegative(e, "e")
        return (eos.gamma - 1.0) * rho * e
    raise EosDomainError("an incompressible fluid has no pressure law")


def internal_energy(eos: Eos, rho, p):
    """Invert the ideal-gas law: e = p / ((gamma - 1) rho)."""
    if eos.kind != "ideal_gas":
        raise EosDomainError("internal energy inversion needs an ideal gas")
    rho = _check_nonnegative(rho, "rho", strict=True)
    p = _check_nonnegative(p, "p")
    return p / ((eos.gamma - 1.0) * rho)


def sound_speed(eos: Eos, rho, p=None):
    rho = _check_nonnegative(rho, "rho", strict=True)
    if eos.kind == "barotropic":
        return np.sqrt(eos.a * eos.gamma * rho ** (eos.gamma - 1.0))
    if eos.kind == "ideal_gas":
        p = _check_nonnegative(p, "p")
        return np.sqrt(eos.gamma * p / rho)
    raise EosDomainError("the sound speed of an incompressible fluid is infinite")


@dataclass(frozen=True, eq=False)
class State:
    rho: np.ndarray
    velocity: np.ndarray
    pressure: np.ndarray
    internal_energy: np.ndarray | None = None
    time: float = 0.0
    # per-cell corrective source carried from the previous Euler step
    correction: np.ndarray | None = field(default=None, repr=False)

    def evolve(self, **changes) -> "State":
        return replace(self, **changes)

    def check(self) -> None:
        if np.any(~(self.rho > 0)):
            k = int(np.flatnonzero(~(self.rho > 0))[0])
            raise EosDomainError(f"non-positive density in cell {k}: {self.rho[k]!r}")
        if self.internal_energy is not None and np.any(~(self.internal_energy >= 0)):
            k = int(np.flatnonzero(~(self.internal_energy >= 0))[0])
            raise EosDomainError(
                f"negative internal energy in cell {k}: {self.internal_energy[k]!r}"
            )


def uniform_state(grid: Grid, rho=1.0, velocity=0.0, pressure=0.0, e=None, time=0.0) -> State:
    vel = np.zeros((grid.n_faces, grid.dim))
    vel[:] = velocity
    ie = None if e is None else np.full(grid.n_cells, float(e))
    return State(
        rho=np.full(grid.n_cells, float(rho)),
        velocity=vel,
        pressure=np.full(grid.n_cells, float(pressure)),
        internal_energy=ie,
        time=time,
    )


def write_fields_csv(grid: Grid, state: State, path) -> tuple[Path, Path]:
    """Dump cell and face fields as two CSV files.

    ``<stem>_cells.csv`` columns: cell-centre coordinates, rho, p, e (blank
    when there is no internal energy).  ``<stem>_faces.csv`` columns:
    face-centre coordinates then the velocity components.
    """
    path = Path(path)
    stem = path.with_suffix("")
    cell_path = stem.parent / f"{stem.name}_cells.csv"
    face_path = stem.parent / f"{stem.name}_faces.csv"
    cell_cols = CELL_COLUMNS_1D if grid.dim == 1 else CELL_COLUMNS_2D
    face_cols = FACE_COLUMNS_1D if grid.dim == 1 else FACE_COLUMNS_2D
    e = state.internal_energy
    with cell_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cell_cols)
        for k in range(grid.n_cells):
            row = [repr(float(x)) for x in grid.cell_centers[k]]
            row += [repr(float(state.rho[k])), repr(float(state.pressure[k]))]
            row.append("" if e is None else repr(float(e[k])))
            w.writerow(row)
    with face_path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(face_cols)
        for f in range(grid.n_faces):
            row = [repr(float(x)) for x in grid.face_centers[f]]
            row += [repr(float(x)) for x in state.velocity[f]]
            w.writerow(row)
    return cell_path, face_path


def read_fields_csv(cell_path, face_path) -> tuple[dict, dict]:
    def _read(p):
        with Path(p).open() as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        cols = {}
        for i, name in enumerate(header):
            vals = [r[i] for r in body]
            cols[name] = np.array([float(v) if v != "" else np.nan for v in vals])
        return cols

    return _read(cell_path), _read(face_path)
