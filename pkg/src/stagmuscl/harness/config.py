"""Case configuration: a sectioned ``key = value`` text format.

Example::

    [case]
    model = euler
    final_time = 0.012

    [grid]
    dim = 1
    cells = 1000

    [initial]
    kind = riemann
    left = 1, 0, 1000
    right = 1, 0, 0.001

Lines starting with ``#`` or ``;`` are comments.  Every section and key
must appear in ``SCHEMA``; anything else is rejected before allocation.
Values are parsed by the type in the schema: ``float``, ``int``, ``bool``,
``str``, ``floats`` (comma separated) or ``ints``.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field
from pathlib import Path


class ConfigError(ValueError):
    pass


# section -> key -> (type, default); a default of None means "unset"
SCHEMA: dict[str, dict[str, tuple[str, object]]] = {
    "case": {
        "name": ("str", "case"),
        "model": ("str", None),
        "final_time": ("float", None),
        "max_steps": ("int", None),
        "steady_tol": ("float", None),
    },
    "grid": {
        "dim": ("int", 1),
        "cells": ("ints", None),
        "origin": ("floats", None),
        "extent": ("floats", None),
        # one row of square cells: ny = 1 and the y extent equals hx
        "stripe": ("bool", False),
        # per side: dirichlet | neumann_outflow | slip_wall | symmetry
        "x-": ("str", "dirichlet"),
        "x+": ("str", "dirichlet"),
        "y-": ("str", "dirichlet"),
        "y+": ("str", "dirichlet"),
    },
    "physics": {
        "gamma": ("float", None),
        "a": ("float", None),
        "mu": ("float", 0.0),
    },
    "scheme": {
        "scheme": ("str", "muscl"),
        "xi_plus": ("float", 1.0),
        "xi_minus": ("float", 1.0),
        "nu": ("float", 0.0),
        "dt": ("float", None),
        # dt as a multiple of the smallest cell size (used when dt is unset)
        "dt_over_h": ("float", None),
        "time_stepping": ("str", "forward_euler"),
        "mass_scheme": ("str", None),
        "scalar_xi_plus": ("float", 1.0),
        "scalar_xi_minus": ("float", 2.0),
        "energy_face": ("str", "conserved"),
        "corrective": ("bool", True),
        "viscous_form": ("str", "symmetric"),
        "linear_solver": ("str", "cg"),
        "prediction_solver": ("str", "cg"),
        "linear_tol": ("float", 1e-10),
    },
    "initial": {
        # riemann | uniform | barotropic_shock | euler_shock | manufactured | lid_cavity | backward_step
        "kind": ("str", "uniform"),
        "left": ("floats", None),
        "right": ("floats", None),
        "x0": ("float", 0.5),
        "rho": ("float", 1.0),
        "velocity": ("floats", None),
        "pressure": ("float", 0.0),
        "rho0": ("float", None),
        "p0": ("float", None),
        "mach": ("float", None),
        "lid_velocity": ("float", 1.0),
        "inlet_velocity": ("float", 1.0),
        "step_height": ("float", None),
        "wavenumbers": ("floats", None),
        "amplitudes": ("floats", None),
        "frequency": ("float", 1.0),
        # manufactured family: travelling | standing
        "family": ("str", "travelling"),
    },
    "output": {
        "snapshots": ("int", 0),
        "diagnostics": ("bool", True),
        "every": ("int", 1),
    },
    "study": {
        "levels": ("ints", None),
        "schemes": ("str", None),
    },
}

TYPES = ("float", "int", "bool", "str", "floats", "ints")


def _parse_value(kind: str, text: str, where: str):
    text = text.strip()
    try:
        if kind == "float":
            return float(text)
        if kind == "int":
            return int(text)
        if kind == "bool":
            low = text.lower()
            if low in ("true", "yes", "on", "1"):
                return True
            if low in ("false", "no", "off", "0"):
                return False
            raise ValueError(text)
        if kind == "str":
            return text
        if kind == "floats":
            return tuple(float(v) for v in text.split(",") if v.strip())
        if kind == "ints":
            return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise ConfigError(f"{where}: cannot read {text!r} as {kind}") from None
    raise ConfigError(f"{where}: unknown type {kind}")


def _format_value(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, tuple):
        return ", ".join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


@dataclass
class CaseConfig:
    """Validated case description.  ``values[section][key]`` holds parsed values."""

    values: dict = field(default_factory=dict)

    def get(self, section: str, key: str):
        if section not in SCHEMA or key not in SCHEMA[section]:
            raise ConfigError(f"unknown key {section}.{key}")
        return self.values.get(section, {}).get(key, SCHEMA[section][key][1])

    def is_set(self, section: str, key: str) -> bool:
        return key in self.values.get(section, {})

    def with_overrides(self, overrides: dict) -> "CaseConfig":
        """Copy with ``{"section.key": value}`` overrides (values already typed or text)."""
        values = {s: dict(v) for s, v in self.values.items()}
        for dotted, value in overrides.items():
            section, _, key = dotted.partition(".")
            if section not in SCHEMA or key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {dotted}")
            if isinstance(value, str):
                value = _parse_value(SCHEMA[section][key][0], value, dotted)
            values.setdefault(section, {})[key] = value
        return CaseConfig(values)

    def to_text(self) -> str:
        lines = []
        for section in SCHEMA:
            items = self.values.get(section)
            if not items:
                continue
            lines.append(f"[{section}]")
            for key in SCHEMA[section]:
                if key in items and items[key] is not None:
                    lines.append(f"{key} = {_format_value(items[key])}")
            lines.append("")
        return "\n".join(lines)


def parse_config(text: str) -> CaseConfig:
    """Parse and validate configuration text."""
    parser = configparser.ConfigParser(
        delimiters=("=",), comment_prefixes=("#", ";"), inline_comment_prefixes=("#",),
        interpolation=None, default_section="__none__",
    )
    parser.optionxform = str
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(f"malformed configuration: {exc}") from None
    values: dict = {}
    for section in parser.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key, raw in parser.items(section):
            if key not in SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
            values.setdefault(section, {})[key] = _parse_value(SCHEMA[section][key][0], raw, f"{section}.{key}")
    return CaseConfig(values)


def load_config(path) -> CaseConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    return parse_config(text)
