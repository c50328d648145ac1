"""Zeroth-order optimization on the probability simplex with Dirichlet perturbations."""
from .dirichlet import DirichletSampler, dirichlet_covariance, empirical_moments
from .errors import *  # noqa: F401,F403
from .estimator import BiasReport, EstimatorConfig, EstimatorSample, bias_check, estimate_raw, estimate_scaled
from .objectives import (
    Objective,
    descent_lemma_check,
    finite_diff_grad,
    from_id,
    make_linear,
    make_psd_quadratic,
    make_quadratic_distance,
    numerical_minimizer,
    smoothness_check,
)
from .optimizers import RunTrace, Schedule, average_iterate, ew_step, exact_gradient_run, pgd_step, run
from .simplex import SimplexPoint, center, first_order_gap, mix, project_to_simplex, uniform_point, validate_simplex

__version__ = "0.1.0"
