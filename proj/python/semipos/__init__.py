"""Python bindings for the semipos radial solver."""

import json

from ._semipos import (
    ConfigError,
    InvalidArgument,
    Nonlinearity,
    NumericalError,
    Shifted,
    SweepReport,
    SweepRow,
    Weight,
    check_primitive_gap,
    critical_exponent,
    grid_nodes,
    integrate,
    laplacian,
    riesz_solve,
    ring_kernel_value,
    sphere_area,
    volume_weights,
    weak_lp_profile,
)
from ._semipos import config_json as _config_json
from ._semipos import run_sweep as _run_sweep

__all__ = [
    "ConfigError",
    "InvalidArgument",
    "Nonlinearity",
    "NumericalError",
    "Shifted",
    "SweepReport",
    "SweepRow",
    "Weight",
    "check_primitive_gap",
    "critical_exponent",
    "grid_nodes",
    "integrate",
    "laplacian",
    "parse_config",
    "riesz_solve",
    "ring_kernel_value",
    "run_sweep",
    "sphere_area",
    "volume_weights",
    "weak_lp_profile",
]


def parse_config(text):
    """Resolved config for INI text, as a dict."""
    return json.loads(_config_json(text))


def run_sweep(text):
    """Run the sweep described by INI text. Returns (report, summary dict)."""
    report = _run_sweep(text)
    return report, json.loads(report.summary_json())
