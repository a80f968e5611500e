"""Quantum and classical friction in the driven Prandtl-Tomlinson model."""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    ConfigError,
    DimensionlessConfig,
    PhysicalParams,
    SweepSpec,
    load_config,
    load_sweep,
    nondimensionalize,
)
from .quantum import PropagationError, run_quantum, summarize_first_period  # noqa: E402
from .classical import EnsembleError, run_ensemble  # noqa: E402
from .sweep import run_point, run_sweep  # noqa: E402

__all__ = [
    "ConfigError",
    "DimensionlessConfig",
    "EnsembleError",
    "PhysicalParams",
    "PropagationError",
    "SweepSpec",
    "load_config",
    "load_sweep",
    "nondimensionalize",
    "run_ensemble",
    "run_point",
    "run_quantum",
    "run_sweep",
    "summarize_first_period",
]
