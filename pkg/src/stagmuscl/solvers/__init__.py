"""Time-marching schemes and the spatial operators they share."""
from .boundary import BoundaryConfigError, BoundaryData, apply_boundary_conditions, pinned_mask, validate_boundary
from .compressible import barotropic_step, euler_step
from .incompressible import incompressible_step
from .linsolve import LinearSolveContract, LinearSolverError
from .model import ModelConfig, ModelConfigError, PositivityError, StepInfo
from .operators import (
    pressure_gradient,
    velocity_divergence,
    viscous_matrix,
    viscous_operator,
)

STEPPERS = {
    "incompressible": incompressible_step,
    "barotropic": barotropic_step,
    "euler": euler_step,
}


def step(grid, state, config: ModelConfig):
    """Advance one time step with the scheme of ``config.model``."""
    return STEPPERS[config.model](grid, state, config)


__all__ = [
    "BoundaryConfigError",
    "BoundaryData",
    "apply_boundary_conditions",
    "pinned_mask",
    "validate_boundary",
    "barotropic_step",
    "euler_step",
    "incompressible_step",
    "LinearSolveContract",
    "LinearSolverError",
    "ModelConfig",
    "ModelConfigError",
    "PositivityError",
    "StepInfo",
    "pressure_gradient",
    "velocity_divergence",
    "viscous_matrix",
    "viscous_operator",
    "STEPPERS",
    "step",
]
