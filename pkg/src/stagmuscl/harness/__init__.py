"""Configuration, benchmark cases, runs, convergence studies and metrics."""
from .cases import Case, build_case, build_grid
from .config import SCHEMA, CaseConfig, ConfigError, load_config, parse_config
from .metrics import StreamfunctionMetrics, l1_error, observed_orders, streamfunction, streamfunction_metrics
from .presets import PRESETS, preset
from .run import (
    DIAGNOSTIC_COLUMNS,
    EXIT_CONFIG,
    EXIT_OK,
    EXIT_POSITIVITY,
    EXIT_SOLVER,
    OrderTable,
    RunReport,
    StudyError,
    convergence_study,
    energies,
    run_built_case,
    run_case,
)

__all__ = [
    "Case",
    "build_case",
    "build_grid",
    "SCHEMA",
    "CaseConfig",
    "ConfigError",
    "load_config",
    "parse_config",
    "StreamfunctionMetrics",
    "l1_error",
    "observed_orders",
    "streamfunction",
    "streamfunction_metrics",
    "PRESETS",
    "preset",
    "DIAGNOSTIC_COLUMNS",
    "EXIT_CONFIG",
    "EXIT_OK",
    "EXIT_POSITIVITY",
    "EXIT_SOLVER",
    "OrderTable",
    "RunReport",
    "StudyError",
    "convergence_study",
    "energies",
    "run_built_case",
    "run_case",
]
