"""Convex geometry, exploratory measures and IDS simulation."""

from ._core import (
    ConvexBody,
    Error,
    cli,
    epsilon_grid,
    isotropy_residual,
    msa_transform,
    pi_far,
    project,
    properties,
    psi_avg,
    psi_point,
    ray_clip,
    regret_bound,
    replay_trial,
    run_property,
    run_sweep,
)

__all__ = [
    "ConvexBody",
    "Error",
    "cli",
    "epsilon_grid",
    "isotropy_residual",
    "msa_transform",
    "pi_far",
    "project",
    "properties",
    "psi_avg",
    "psi_point",
    "ray_clip",
    "regret_bound",
    "replay_trial",
    "run_property",
    "run_sweep",
]
