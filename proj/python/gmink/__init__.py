"""Gaussian Minkowski problem solvers on sampled support functions."""

import json

from ._gmink import (
    Body,
    FlowConfig,
    GminkError,
    Grid,
    HomotopyConfig,
    Measure,
    RunConfig,
    SolveReport,
    ball,
    ball_gaussian_volume,
    constant_root,
    flow_residual,
    functional_F,
    gaussian_volume,
    load_config,
    make_grid,
    parse_config,
    run_flow,
    solve,
    support,
    surface_density,
    tau,
    total_measure,
    verify_json,
)


def verify(config):
    """Run the verification suite and return the report as a dict."""
    if not isinstance(config, RunConfig):
        config = load_config(config)
    return json.loads(verify_json(config))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]
