"""Model configuration shared by the three time-marching schemes."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..convection import SchemeParams
from ..state import Eos
from .boundary import BoundaryData
from .linsolve import METHODS
from .operators import VISCOUS_FORMS

MODELS = ("incompressible", "barotropic", "euler")
TIME_STEPPING = ("forward_euler", "heun")
ENERGY_FACE = ("conserved", "internal")


class PositivityError(RuntimeError):
    def __init__(self, message, cell=-1, cfl=np.nan):
        super().__init__(message)
        self.cell = cell
        self.cfl = cfl


class ModelConfigError(ValueError):
    pass


Source = Callable[[float], tuple]


@dataclass(frozen=True, eq=False)
class ModelConfig:
    """Everything a step needs besides the grid and the state.

    ``source(t)`` (optional) returns ``(mass, momentum)`` with one mass
    source per cell and a ``(n_faces, d)`` momentum source, both per unit
    volume.  ``mass_scheme`` selects the face values of cell scalars (density
    and internal energy); it defaults to the momentum scheme, with
    ``centered`` mapped to ``muscl`` to keep the scalar updates monotone.

    ``linear_solver`` is used for the pressure Poisson system of the
    projection scheme and ``prediction_solver`` for its implicit-viscosity
    velocity system (mass dominated, so cg converges in a few sweeps).

    ``scalar_xi`` holds the (xi+, xi-) pair used for the cell scalars.  The
    bound xi+ <= 1 matters for the kinetic energy only, so scalars default to
    the less limited (1, 2).  ``energy_face`` selects how the internal energy
    face value is built: ``conserved`` limits rho e and divides by the mass
    face density, ``internal`` limits e directly.
    """

    model: str
    params: SchemeParams
    eos: Eos | None = None
    mu: float = 0.0
    time_stepping: str = "forward_euler"
    boundary: BoundaryData = field(default_factory=BoundaryData)
    viscous_form: str = "symmetric"
    mass_scheme: str | None = None
    corrective: bool = True
    linear_solver: str = "cg"
    prediction_solver: str = "cg"
    linear_tol: float = 1e-10
    source: Source | None = None
    check_identity: bool = False
    scalar_xi: tuple = (1.0, 2.0)
    energy_face: str = "conserved"

    def __post_init__(self):
        if self.model not in MODELS:
            raise ModelConfigError(f"unknown model {self.model!r}")
        if self.time_stepping not in TIME_STEPPING:
            raise ModelConfigError(f"unknown time stepping {self.time_stepping!r}")
        if self.model == "incompressible" and self.time_stepping != "forward_euler":
            raise ModelConfigError("the incompressible model only uses the projection scheme")
        expected = {"incompressible": None, "barotropic": "barotropic", "euler": "ideal_gas"}[self.model]
        if expected is not None and (self.eos is None or self.eos.kind != expected):
            raise ModelConfigError(f"model {self.model!r} needs a {expected} equation of state")
        if self.mu < 0:
            raise ModelConfigError("mu must be >= 0")
        if self.viscous_form not in VISCOUS_FORMS:
            raise ModelConfigError(f"unknown viscous form {self.viscous_form!r}")
        for solver in (self.linear_solver, self.prediction_solver):
            if solver not in METHODS:
                raise ModelConfigError(f"unknown linear solver {solver!r}")
        if self.mass_scheme is not None and self.mass_scheme not in ("upwind", "centered", "muscl"):
            raise ModelConfigError(f"unknown mass scheme {self.mass_scheme!r}")
        if len(self.scalar_xi) != 2 or not all(0.0 <= float(x) <= 2.0 for x in self.scalar_xi):
            raise ModelConfigError("scalar_xi must be two values in [0, 2]")
        if self.energy_face not in ENERGY_FACE:
            raise ModelConfigError(f"unknown energy face value {self.energy_face!r}")

    @property
    def scalar_scheme(self) -> str:
        if self.mass_scheme is not None:
            return self.mass_scheme
        return "muscl" if self.params.scheme == "centered" else self.params.scheme

    @property
    def scalar_limiter(self) -> tuple[float, float]:
        if self.scalar_scheme == "upwind":
            return 0.0, 0.0
        return float(self.scalar_xi[0]), float(self.scalar_xi[1])

    @property
    def dt(self) -> float:
        return self.params.dt


@dataclass
class StepInfo:
    """Per-step diagnostics.

    ``boundary_mass`` is the mass that left the domain during the step;
    ``source_mass`` the mass injected by volume sources; ``tau`` is the
    stability time-step bound of the convection-diffusion estimate (infinite
    without viscosity) and ``eta = dt / tau``.
    """

    cfl: float = 0.0
    tau: float = np.inf
    eta: float = 0.0
    boundary_mass: float = 0.0
    source_mass: float = 0.0
    identity_residual: float = np.nan
    corrective_sum: float = 0.0
    linear_residual: float = 0.0
    extra: dict = field(default_factory=dict)
