"""Turn a CaseConfig into a grid, an initial state, a model and an exact solution."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..convection import SchemeParams
from ..grid import SIDES, Grid, GridError, build_cartesian
from ..oracle import barotropic_shock_state, euler_shock_state, exact_riemann, manufactured_solution
from ..state import Eos, State, eos_pressure, internal_energy
from ..solvers import BoundaryData, ModelConfig, validate_boundary
from .config import CaseConfig, ConfigError

INITIAL_KINDS = (
    "riemann",
    "uniform",
    "barotropic_shock",
    "euler_shock",
    "manufactured",
    "lid_cavity",
    "backward_step",
)

# exact(t) -> {"rho": per cell, "u": (n_faces, d), "p": per cell}
Exact = Callable[[float], dict]


@dataclass
class Case:
    name: str
    grid: Grid
    state: State
    model: ModelConfig
    final_time: float
    exact: Exact | None = None
    # shock position x(t) for moving-shock cases
    shock_position: Callable[[float], float] | None = None


def _require(cfg: CaseConfig, section: str, key: str):
    value = cfg.get(section, key)
    if value is None:
        raise ConfigError(f"{section}.{key} is required for this case")
    return value


def build_grid(cfg: CaseConfig, cells=None) -> Grid:
    dim = cfg.get("grid", "dim")
    if dim not in (1, 2):
        raise ConfigError("grid.dim must be 1 or 2")
    counts = tuple(cells) if cells is not None else _require(cfg, "grid", "cells")
    if len(counts) == 1 and dim == 2:
        counts = (counts[0], counts[0])
    extent = cfg.get("grid", "extent") or (1.0,) * dim
    origin = cfg.get("grid", "origin") or (0.0,) * dim
    if len(counts) != dim or len(extent) != dim or len(origin) != dim:
        raise ConfigError(f"grid.cells, grid.extent and grid.origin need {dim} entries")
    if cfg.get("grid", "stripe"):
        if dim != 2:
            raise ConfigError("a stripe grid is two-dimensional")
        # one row of square cells
        counts = (counts[0], 1)
        extent = (extent[0], extent[0] / counts[0])
    tags = {side: cfg.get("grid", side) for side in SIDES[: 2 * dim]}
    try:
        return build_cartesian(dim, counts, origin=origin, extent=extent, boundary_tags=tags)
    except GridError as exc:
        raise ConfigError(str(exc)) from None


def _eos(cfg: CaseConfig, model: str) -> Eos | None:
    if model == "incompressible":
        return None
    try:
        if model == "barotropic":
            return Eos.barotropic(_require(cfg, "physics", "a"), cfg.get("physics", "gamma") or 2.0)
        return Eos.ideal_gas(_require(cfg, "physics", "gamma"))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _time_step(cfg: CaseConfig, grid: Grid) -> float:
    dt = cfg.get("scheme", "dt")
    if dt is None:
        ratio = cfg.get("scheme", "dt_over_h")
        if ratio is None:
            raise ConfigError("either scheme.dt or scheme.dt_over_h is required")
        dt = ratio * min(grid.h)
    return float(dt)


def _vector(grid: Grid, values) -> np.ndarray:
    out = np.zeros((grid.n_faces, grid.dim))
    values = np.atleast_1d(np.asarray(values, dtype=float))
    out[:, : values.size] = values
    return out


def _step_profile(x, position, behind, ahead):
    return np.where(x < position, behind, ahead)


def build_case(cfg: CaseConfig, cells=None, scheme: str | None = None) -> Case:
    """Assemble the case; ``cells`` and ``scheme`` override the configured ones."""
    model = _require(cfg, "case", "model")
    kind = cfg.get("initial", "kind")
    if kind not in INITIAL_KINDS:
        raise ConfigError(f"unknown initial kind {kind!r}; expected one of {INITIAL_KINDS}")
    grid = build_grid(cfg, cells)
    eos = _eos(cfg, model)
    mu = cfg.get("physics", "mu")
    xc = grid.cell_centers
    xf = grid.face_centers
    dim = grid.dim
    bc = BoundaryData()
    exact = None
    shock = None
    source = None

    if kind == "riemann":
        if model != "euler":
            raise ConfigError("riemann initial data need the euler model")
        left, right = _require(cfg, "initial", "left"), _require(cfg, "initial", "right")
        if len(left) != 3 or len(right) != 3:
            raise ConfigError("riemann left/right states are rho, u, p")
        x0 = cfg.get("initial", "x0")
        sol = exact_riemann(eos.gamma, left, right)
        rho = _step_profile(xc[:, 0], x0, left[0], right[0])
        p = _step_profile(xc[:, 0], x0, left[2], right[2])
        vel = _vector(grid, 0.0)
        vel[:, 0] = _step_profile(xf[:, 0], x0, left[1], right[1])
        state = State(rho=rho, velocity=vel, pressure=p, internal_energy=internal_energy(eos, rho, p))

        def exact(t, sol=sol, x0=x0):
            r, _, q = sol.sample_xt(xc[:, 0], t, x0)
            u = _vector(grid, 0.0)
            u[:, 0] = sol.sample_xt(xf[:, 0], t, x0)[1]
            return {"rho": r, "u": u, "p": q}

    elif kind == "uniform":
        rho = cfg.get("initial", "rho")
        vel = cfg.get("initial", "velocity") or (0.0,) * dim
        p = cfg.get("initial", "pressure")
        velocity = _vector(grid, vel)
        if model == "incompressible":
            state = State(rho=np.ones(grid.n_cells), velocity=velocity, pressure=np.full(grid.n_cells, p))
        elif model == "barotropic":
            r = np.full(grid.n_cells, rho)
            state = State(rho=r, velocity=velocity, pressure=eos_pressure(eos, r))
        else:
            r = np.full(grid.n_cells, rho)
            pr = np.full(grid.n_cells, p)
            state = State(rho=r, velocity=velocity, pressure=pr, internal_energy=internal_energy(eos, r, pr))
        moving = {s: tuple(vel) for s in SIDES[: 2 * dim] if grid.boundary_tags[SIDES.index(s)] == "dirichlet"}
        bc = BoundaryData(velocity=moving if any(vel) else {})
        exact_state = state

        def exact(t, s=exact_state):
            return {"rho": s.rho, "u": s.velocity, "p": s.pressure}

    elif kind in ("barotropic_shock", "euler_shock"):
        rho0, mach = _require(cfg, "initial", "rho0"), _require(cfg, "initial", "mach")
        if kind == "barotropic_shock":
            if model != "barotropic":
                raise ConfigError("barotropic_shock needs the barotropic model")
            rho_b, u_b, omega = barotropic_shock_state(eos.a, rho0, mach, eos.gamma)
            r = np.full(grid.n_cells, rho0)
            state = State(rho=r, velocity=_vector(grid, 0.0), pressure=eos_pressure(eos, r))
            bc = BoundaryData(velocity={"x-": (u_b,) + (0.0,) * (dim - 1)}, density={"x-": rho_b})
            p_b, p0 = eos.a * rho_b**eos.gamma, eos.a * rho0**eos.gamma
        else:
            if model != "euler":
                raise ConfigError("euler_shock needs the euler model")
            p0 = _require(cfg, "initial", "p0")
            rho_b, u_b, p_b, omega = euler_shock_state(eos.gamma, rho0, p0, mach)
            r = np.full(grid.n_cells, rho0)
            pr = np.full(grid.n_cells, p0)
            state = State(rho=r, velocity=_vector(grid, 0.0), pressure=pr, internal_energy=internal_energy(eos, r, pr))
            e_b = float(internal_energy(eos, rho_b, p_b))
            bc = BoundaryData(
                velocity={"x-": (u_b,) + (0.0,) * (dim - 1)}, density={"x-": rho_b}, internal_energy={"x-": e_b}
            )
        x_start = grid.origin[0]

        def shock(t, omega=omega, x_start=x_start):
            return x_start + omega * t

        def exact(t, shock=shock, rho_b=rho_b, u_b=u_b, p_b=p_b, rho0=rho0, p0=p0):
            xs = shock(t)
            u = _vector(grid, 0.0)
            u[:, 0] = _step_profile(xf[:, 0], xs, u_b, 0.0)
            return {
                "rho": _step_profile(xc[:, 0], xs, rho_b, rho0),
                "u": u,
                "p": _step_profile(xc[:, 0], xs, p_b, p0),
            }

    elif kind == "manufactured":
        if model != "barotropic":
            raise ConfigError("manufactured solutions are available for the barotropic model")
        try:
            sol = manufactured_solution(
                "barotropic",
                _require(cfg, "initial", "wavenumbers"),
                _require(cfg, "initial", "amplitudes"),
                dim=dim,
                a=eos.a,
                gamma=eos.gamma,
                mu=mu,
                rho_mean=cfg.get("initial", "rho"),
                frequency=cfg.get("initial", "frequency"),
                viscous_form=cfg.get("scheme", "viscous_form"),
                family=cfg.get("initial", "family"),
            )
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        r = sol.density(xc, 0.0)
        state = State(rho=r, velocity=sol.velocity(xf, 0.0), pressure=eos_pressure(eos, r))
        walls = [s for s in SIDES[: 2 * dim] if grid.boundary_tags[SIDES.index(s)] == "dirichlet"]
        bc = BoundaryData(velocity={s: sol.velocity for s in walls})

        def source(t, sol=sol):
            return sol.mass_source(xc, t), sol.momentum_source(xf, t)

        def exact(t, sol=sol):
            return {"rho": sol.density(xc, t), "u": sol.velocity(xf, t), "p": sol.pressure(xc, t)}

    elif kind == "lid_cavity":
        if model != "incompressible" or dim != 2:
            raise ConfigError("lid_cavity is a 2D incompressible case")
        state = State(rho=np.ones(grid.n_cells), velocity=_vector(grid, 0.0), pressure=np.zeros(grid.n_cells))
        bc = BoundaryData(velocity={"y+": (cfg.get("initial", "lid_velocity"), 0.0)})

    else:  # backward_step
        if model != "incompressible" or dim != 2:
            raise ConfigError("backward_step is a 2D incompressible case")
        step_h = _require(cfg, "initial", "step_height")
        top = grid.origin[1] + grid.extent[1]
        peak = cfg.get("initial", "inlet_velocity")

        def inlet(points, t, step_h=step_h, top=top, peak=peak):
            y = points[:, 1]
            ux = np.where(y > step_h, 4.0 * peak * (y - step_h) * (top - y) / (top - step_h) ** 2, 0.0)
            return np.stack([ux, np.zeros_like(ux)], axis=1)

        state = State(rho=np.ones(grid.n_cells), velocity=_vector(grid, 0.0), pressure=np.zeros(grid.n_cells))
        bc = BoundaryData(velocity={"x-": inlet})

    try:
        validate_boundary(grid, bc, model)
        params = SchemeParams(
            dt=_time_step(cfg, grid),
            scheme=scheme or cfg.get("scheme", "scheme"),
            xi_plus=cfg.get("scheme", "xi_plus"),
            xi_minus=cfg.get("scheme", "xi_minus"),
            nu=cfg.get("scheme", "nu"),
        )
        model_cfg = ModelConfig(
            model=model,
            params=params,
            eos=eos,
            mu=mu,
            time_stepping=cfg.get("scheme", "time_stepping"),
            boundary=bc,
            viscous_form=cfg.get("scheme", "viscous_form"),
            mass_scheme=cfg.get("scheme", "mass_scheme"),
            corrective=cfg.get("scheme", "corrective"),
            linear_solver=cfg.get("scheme", "linear_solver"),
            prediction_solver=cfg.get("scheme", "prediction_solver"),
            linear_tol=cfg.get("scheme", "linear_tol"),
            source=source,
            scalar_xi=(cfg.get("scheme", "scalar_xi_plus"), cfg.get("scheme", "scalar_xi_minus")),
            energy_face=cfg.get("scheme", "energy_face"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    final_time = _require(cfg, "case", "final_time")
    return Case(
        name=cfg.get("case", "name"),
        grid=grid,
        state=state,
        model=model_cfg,
        final_time=float(final_time),
        exact=exact,
        shock_position=shock,
    )
