"""Named benchmark cases, stored as configuration text."""
from __future__ import annotations

from .config import CaseConfig, ConfigError, parse_config

# Shock tube with a strong left rarefaction, a contact and a right shock.
RIEMANN_TEST3 = """
[case]
name = riemann_test3
model = euler
final_time = 0.012

[grid]
dim = 1
cells = 1000

[physics]
gamma = 1.4

[scheme]
scheme = muscl
dt_over_h = 0.01

[initial]
kind = riemann
left = 1, 0, 1000
right = 1, 0, 0.001
x0 = 0.5

[study]
levels = 250, 500, 1000
"""

# Same tube on a single row of square cells with slip walls on top and
# bottom.  nu is a relaxation rate (see convection.dual_viscosity); 100 u_max
# rho_max with u_max = 19.6 and rho_max = 6 damps the odd-even mode between
# normal and tangential velocity dofs; larger values smear the waves again.
RIEMANN_TEST3_STRIPE = """
[case]
name = riemann_test3_stripe
model = euler
final_time = 0.012

[grid]
dim = 2
cells = 1000
stripe = true
y- = slip_wall
y+ = slip_wall

[physics]
gamma = 1.4

[scheme]
scheme = muscl
dt_over_h = 0.005
nu = 11760

[initial]
kind = riemann
left = 1, 0, 1000
right = 1, 0, 0.001
x0 = 0.5
"""

_CAVITY = """
[case]
name = cavity_re5000_{n}
model = incompressible
final_time = 200
steady_tol = 1e-6

[grid]
dim = 2
cells = {n}, {n}

[physics]
mu = 0.0002

[scheme]
scheme = muscl
dt = 0.0025
linear_solver = direct

[initial]
kind = lid_cavity
lid_velocity = 1

[output]
every = 100

[study]
schemes = upwind, centered, muscl
"""

BACKWARD_FACING_STEP = """
[case]
name = backward_facing_step
model = incompressible
final_time = 20

[grid]
dim = 2
cells = 250, 50
extent = 20, 1.9423
x+ = neumann_outflow

[physics]
mu = 0.001

[scheme]
scheme = muscl
dt = 0.01
linear_solver = direct

[initial]
kind = backward_step
step_height = 0.9423
inlet_velocity = 1

[output]
snapshots = 4
every = 20
"""

# Mach 2 shock entering gas at rest; a = 9.81 / 2, rho0 = 0.2.
BAROTROPIC_SHOCK_1D = """
[case]
name = barotropic_shock_1d
model = barotropic
final_time = 0.25

[grid]
dim = 1
cells = 500
x+ = neumann_outflow

[physics]
a = 4.905
gamma = 2

[scheme]
scheme = muscl
dt_over_h = 0.05

[initial]
kind = barotropic_shock
rho0 = 0.2
mach = 2
"""

# Same shock in an ideal gas with gamma = 2 and e0 = a rho0, so p0 = 0.1962.
EULER_SHOCK_1D = """
[case]
name = euler_shock_1d
model = euler
final_time = 0.25

[grid]
dim = 1
cells = 500
x+ = neumann_outflow

[physics]
gamma = 2

[scheme]
scheme = muscl
dt_over_h = 0.05

[initial]
kind = euler_shock
rho0 = 0.2
p0 = 0.1962
mach = 2
"""

# Smooth barotropic flow in the unit square driven by source terms.  The
# standing family keeps the normal velocity and the normal derivatives of
# rho and of the tangential velocity zero on the walls.
MANUFACTURED_2D = """
[case]
name = manufactured_2d
model = barotropic
final_time = 0.05

[grid]
dim = 2
cells = 32, 32

[physics]
a = 1
gamma = 2
mu = 0.005

[scheme]
scheme = muscl
xi_minus = 2
dt_over_h = 0.03125
time_stepping = heun

[initial]
kind = manufactured
family = standing
rho = 1
wavenumbers = 1, 1
amplitudes = 0.05, 1

[study]
levels = 32, 64, 128, 256
schemes = muscl, upwind
"""

MANUFACTURED_1D = """
[case]
name = manufactured_1d
model = barotropic
final_time = 0.1

[grid]
dim = 1
cells = 64

[physics]
a = 4
gamma = 2
mu = 0.005

[scheme]
scheme = muscl
dt_over_h = 0.03125
time_stepping = heun

[initial]
kind = manufactured
rho = 1
wavenumbers = 1
amplitudes = 0.05, 2

[study]
levels = 64, 128, 256, 512
schemes = muscl, upwind
"""

PRESETS: dict[str, str] = {
    "riemann_test3": RIEMANN_TEST3,
    "riemann_test3_stripe": RIEMANN_TEST3_STRIPE,
    "cavity_re5000_128": _CAVITY.format(n=128),
    "cavity_re5000_256": _CAVITY.format(n=256),
    "backward_facing_step": BACKWARD_FACING_STEP,
    "barotropic_shock_1d": BAROTROPIC_SHOCK_1D,
    "euler_shock_1d": EULER_SHOCK_1D,
    "manufactured_2d": MANUFACTURED_2D,
    "manufactured_1d": MANUFACTURED_1D,
}


def preset(name: str) -> CaseConfig:
    try:
        text = PRESETS[name]
    except KeyError:
        raise ConfigError(f"unknown preset {name!r}; available: {', '.join(sorted(PRESETS))}") from None
    return parse_config(text)


def preset_summary(name: str) -> str:
    cfg = preset(name)
    cells = "x".join(str(c) for c in cfg.get("grid", "cells"))
    return f"{name}: {cfg.get('case', 'model')}, {cfg.get('grid', 'dim')}D {cells}, T = {cfg.get('case', 'final_time')}"
