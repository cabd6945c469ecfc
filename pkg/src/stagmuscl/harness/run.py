"""Time loop, diagnostics, outputs and convergence studies."""
from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from ..fluxes import face_density
from ..grid import Grid
from ..state import EosDomainError, State, write_fields_csv
from ..solvers import LinearSolverError, ModelConfig, PositivityError, step
from .cases import Case, build_case
from .config import CaseConfig, ConfigError
from .metrics import l1_error, observed_orders

log = logging.getLogger(__name__)

EXIT_OK, EXIT_CONFIG, EXIT_POSITIVITY, EXIT_SOLVER = 0, 2, 3, 4

DIAGNOSTIC_COLUMNS = (
    "step",
    "time",
    "cfl",
    "tau",
    "mass",
    "kinetic_energy",
    "internal_energy",
    "total_energy",
    "identity_residual",
    "corrective_sum",
    "boundary_mass",
    "linear_residual",
    "max_divergence",
    "velocity_change",
)


@dataclass
class RunReport:
    """Outcome of one run.  ``exit_code`` follows EXIT_* above."""

    name: str
    exit_code: int = EXIT_OK
    message: str = "ok"
    steps: int = 0
    time: float = 0.0
    steady: bool = False
    state: State | None = None
    grid: Grid | None = None
    diagnostics: list = field(default_factory=list)
    errors: dict = field(default_factory=dict)
    mass_balance: float = 0.0

    @property
    def ok(self) -> bool:
        return self.exit_code == EXIT_OK

    def to_text(self) -> str:
        lines = [
            f"case: {self.name}",
            f"exit_code: {self.exit_code}",
            f"message: {self.message}",
            f"steps: {self.steps}",
            f"time: {self.time!r}",
            f"steady: {str(self.steady).lower()}",
            f"mass_balance_residual: {self.mass_balance!r}",
        ]
        if self.diagnostics:
            last = self.diagnostics[-1]
            lines.append(f"max_cfl: {max(d['cfl'] for d in self.diagnostics)!r}")
            lines.append(f"final_mass: {last['mass']!r}")
            lines.append(f"final_total_energy: {last['total_energy']!r}")
        for key, value in self.errors.items():
            lines.append(f"l1_error_{key}: {value!r}")
        return "\n".join(lines) + "\n"


def energies(grid: Grid, state: State, model: ModelConfig) -> tuple[float, float, float]:
    """(mass, kinetic, internal) integrals of a state.

    Kinetic energy uses the diamond densities; the internal energy is
    rho e for the Euler model and the barotropic potential
    a rho^gamma / (gamma - 1) for the barotropic one.
    """
    rho = np.asarray(state.rho, dtype=float)
    mass = float(np.sum(grid.cell_volume * rho))
    rd = face_density(grid, rho)
    kinetic = float(0.5 * np.sum(grid.dual_volume * rd * np.sum(state.velocity**2, axis=1)))
    if model.model == "euler":
        internal = float(np.sum(grid.cell_volume * rho * state.internal_energy))
    elif model.model == "barotropic":
        eos = model.eos
        internal = float(np.sum(grid.cell_volume * eos.a * rho**eos.gamma) / (eos.gamma - 1.0))
    else:
        internal = 0.0
    return mass, kinetic, internal


def case_errors(case: Case, state: State) -> dict:
    """L1 errors of rho, u and p against the exact solution at the state time."""
    if case.exact is None:
        return {}
    ex = case.exact(state.time)
    g = case.grid
    out = {"u": l1_error(g.dual_volume, state.velocity, ex["u"])}
    if case.model.model != "incompressible":
        out["rho"] = l1_error(g.cell_volume, state.rho, ex["rho"])
        out["p"] = l1_error(g.cell_volume, state.pressure, ex["p"])
    return out


def _snapshot_times(final_time: float, count: int) -> list[float]:
    if count <= 0:
        return []
    return [final_time * (k + 1) / count for k in range(count)]


def _write_diagnostics(path: Path, rows: list[dict]) -> None:
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAGNOSTIC_COLUMNS)
        for row in rows:
            w.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in DIAGNOSTIC_COLUMNS])


def run_built_case(
    case: Case,
    output_dir=None,
    snapshots: int = 0,
    every: int = 1,
    max_steps: int | None = None,
    steady_tol: float | None = None,
    diagnostics: bool = True,
) -> RunReport:
    """March ``case`` to its final time (or to a steady state).

    The last step is shortened to land exactly on the final time.  A
    steady state is declared when the largest velocity change relative to
    the largest velocity drops below ``steady_tol``.
    """
    grid, state, model = case.grid, case.state, case.model
    report = RunReport(name=case.name, grid=grid, state=state)
    out = Path(output_dir) if output_dir is not None else None
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
    pending = _snapshot_times(case.final_time, snapshots)
    mass0 = energies(grid, state, model)[0]
    outflow = 0.0
    dt = model.dt
    n = 0
    cfg = model
    try:
        while state.time < case.final_time * (1 - 1e-12):
            if max_steps is not None and n >= max_steps:
                break
            remaining = case.final_time - state.time
            if remaining < dt * (1 - 1e-9):
                cfg = replace(model, params=replace(model.params, dt=remaining))
            new, info = step(grid, state, cfg)
            n += 1
            outflow += info.boundary_mass - info.source_mass
            change = float(np.max(np.abs(new.velocity - state.velocity)) / max(np.max(np.abs(new.velocity)), 1e-300))
            state = new
            steady = steady_tol is not None and change < steady_tol
            last = steady or state.time >= case.final_time * (1 - 1e-12)
            if diagnostics and (n % every == 0 or last):
                mass, kin, internal = energies(grid, state, model)
                report.diagnostics.append(
                    {
                        "step": n,
                        "time": float(state.time),
                        "cfl": float(info.cfl),
                        "tau": float(info.tau),
                        "mass": mass,
                        "kinetic_energy": kin,
                        "internal_energy": internal,
                        "total_energy": kin + internal,
                        "identity_residual": float(info.identity_residual),
                        "corrective_sum": float(info.corrective_sum),
                        "boundary_mass": float(info.boundary_mass),
                        "linear_residual": float(info.linear_residual),
                        "max_divergence": float(info.extra.get("max_divergence", np.nan)),
                        "velocity_change": change,
                    }
                )
            while pending and state.time >= pending[0] * (1 - 1e-12):
                if out is not None:
                    write_fields_csv(grid, state, out / f"fields_{pending[0]:.6g}.csv")
                pending.pop(0)
            if steady:
                report.steady = True
                break
    except (PositivityError, EosDomainError) as exc:
        report.exit_code, report.message = EXIT_POSITIVITY, f"positivity failure at step {n + 1}: {exc}"
    except LinearSolverError as exc:
        report.exit_code = EXIT_SOLVER
        report.message = f"linear solver failure at step {n + 1}: {exc} (residual {exc.residual:.3e})"
    report.steps, report.time, report.state = n, float(state.time), state
    if model.model != "incompressible":
        report.mass_balance = energies(grid, state, model)[0] - (mass0 - outflow)
    if report.ok:
        report.errors = case_errors(case, state)
    if out is not None:
        if report.steady and snapshots > 0:
            write_fields_csv(grid, state, out / f"fields_{state.time:.6g}.csv")
        if diagnostics:
            _write_diagnostics(out / "diagnostics.csv", report.diagnostics)
        (out / "run_report").write_text(report.to_text())
    return report


def run_case(cfg: CaseConfig, output_dir=None, **overrides) -> RunReport:
    """Build and run a configured case; configuration errors give exit code 2."""
    try:
        case = build_case(cfg)
    except ConfigError as exc:
        report = RunReport(name=str(cfg.get("case", "name")), exit_code=EXIT_CONFIG, message=f"config error: {exc}")
        if output_dir is not None:
            Path(output_dir).mkdir(parents=True, exist_ok=True)
            (Path(output_dir) / "run_report").write_text(report.to_text())
        return report
    options = dict(
        snapshots=cfg.get("output", "snapshots"),
        every=cfg.get("output", "every"),
        max_steps=cfg.get("case", "max_steps"),
        steady_tol=cfg.get("case", "steady_tol"),
        diagnostics=cfg.get("output", "diagnostics"),
    )
    options.update(overrides)
    return run_built_case(case, output_dir, **options)


class StudyError(RuntimeError):
    """A refinement level failed; ``exit_code`` is the failing run's code."""

    def __init__(self, message, exit_code):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass
class OrderTable:
    """Per-level L1 errors and least-squares orders, one entry per scheme."""

    levels: tuple
    h: np.ndarray
    errors: dict  # scheme -> variable -> array over levels
    orders: dict  # scheme -> variable -> least-squares order
    pairwise: dict  # scheme -> variable -> array of pairwise orders

    def write_csv(self, path) -> None:
        with Path(path).open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scheme", "variable", "level", "h", "l1_error", "pairwise_order", "lsq_order"])
            for scheme, by_var in self.errors.items():
                for var, errs in by_var.items():
                    for i, n in enumerate(self.levels):
                        pair = "" if i == 0 else repr(float(self.pairwise[scheme][var][i - 1]))
                        w.writerow([scheme, var, n, repr(float(self.h[i])), repr(float(errs[i])), pair,
                                    repr(self.orders[scheme][var])])


def convergence_study(cfg: CaseConfig, levels=None, schemes=None, output_dir=None) -> OrderTable:
    """Run the case on each refinement level and fit the observed orders.

    ``levels`` are cell counts per direction; ``schemes`` defaults to the
    configured scheme.  Raises ConfigError with fewer than two levels, and
    StudyError if a level fails.
    """
    levels = tuple(levels if levels is not None else (cfg.get("study", "levels") or ()))
    if len(levels) < 2:
        raise ConfigError("a convergence study needs at least two refinement levels")
    if schemes is None:
        listed = cfg.get("study", "schemes")
        schemes = [s.strip() for s in listed.split(",")] if listed else [cfg.get("scheme", "scheme")]
    dim = cfg.get("grid", "dim")
    errors: dict = {}
    h = None
    for scheme in schemes:
        rows = []
        hs = []
        for n in levels:
            case = build_case(cfg, cells=(n,) * dim, scheme=scheme)
            report = run_built_case(case, diagnostics=False)
            if not report.ok:
                raise StudyError(f"level {n} ({scheme}) failed: {report.message}", report.exit_code)
            rows.append(report.errors)
            hs.append(max(case.grid.h))
            log.info("level %d %s: %s", n, scheme, report.errors)
        h = np.array(hs)
        errors[scheme] = {var: np.array([r[var] for r in rows]) for var in rows[0]}
    orders = {s: {} for s in errors}
    pairwise = {s: {} for s in errors}
    for s, by_var in errors.items():
        for var, errs in by_var.items():
            orders[s][var], pairwise[s][var] = observed_orders(h, errs)
    table = OrderTable(levels=levels, h=h, errors=errors, orders=orders, pairwise=pairwise)
    if output_dir is not None:
        Path(output_dir).mkdir(parents=True, exist_ok=True)
        table.write_csv(Path(output_dir) / "orders.csv")
    return table
