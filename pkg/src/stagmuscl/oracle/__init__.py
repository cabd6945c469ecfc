"""Reference solutions used by the tests and the harness (never by the solvers)."""
from .manufactured import ManufacturedSolution, manufactured_solution
from .riemann import RiemannSolution, VacuumError, exact_riemann
from .shocks import NoShockError, barotropic_shock_state, euler_shock_state, jump_residuals

__all__ = [
    "ManufacturedSolution",
    "manufactured_solution",
    "RiemannSolution",
    "VacuumError",
    "exact_riemann",
    "NoShockError",
    "barotropic_shock_state",
    "euler_shock_state",
    "jump_residuals",
]
