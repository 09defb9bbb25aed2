"""Normalized gradient descent for GLM and Gaussian mixture estimation."""

from ._core import (
    DegenerateCurvature,
    GlmObjective,
    GmmObjective,
    InputError,
    NumericalError,
    UnsupportedRegime,
    cli,
    double_factorial,
    gauss_hermite,
    glm_pop_loss,
    gmm_pop_hessian_eigs,
    linfit,
    normgd_step,
    power_iteration,
    run,
    run_checks,
    slope_experiment,
    sym_eig_all,
)

__all__ = [
    "DegenerateCurvature",
    "GlmObjective",
    "GmmObjective",
    "InputError",
    "NumericalError",
    "UnsupportedRegime",
    "cli",
    "double_factorial",
    "gauss_hermite",
    "glm_pop_loss",
    "gmm_pop_hessian_eigs",
    "linfit",
    "normgd_step",
    "power_iteration",
    "run",
    "run_checks",
    "slope_experiment",
    "sym_eig_all",
]
