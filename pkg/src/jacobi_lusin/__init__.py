"""Jacobi trigonometric polynomial expansions: Poisson semigroup kernels,
mixed Lusin area integrals, the majorant machinery that dominates every
derivative kernel, and numerical verification suites for the associated
Calderon-Zygmund standard estimates."""

__version__ = "0.1.0"

from .jacobi_core import (JacobiParams, SpectralTruncation, TrigTerm,
                          basis_term, delta_star, delta_star_eval, delta_term,
                          delta_terms, eigenvalue, eval_jacobi,
                          eval_normalized, eval_terms, normalizing_constant)
from .measure_geometry import (Ball, GridFunction, ball_volume,
                               ball_volume_surrogate, density,
                               measure_interval, measure_total, omega)
from .poisson_kernel import (DerivativeSpec, KernelValue, NonConvergenceError,
                             iden1_expansion, kernel_derivative,
                             poisson_kernel, semigroup_apply, semigroup_coeffs)
from .upsilon_estimates import (PiMeasureRule, UpsilonSpec, pi_rule, q_fn,
                                upsilon, upsilon_bnorm)
from .area_integrals import (AreaNormEngine, BNormSpec, ConeGrid, area_integral,
                             area_l2_norm, b_norm, g_function, g_l2_norm,
                             s_kernel)
from .cz_verifier import (GammaChoice, VerificationReport, check_growth,
                          check_lemma, check_smoothness_phi,
                          check_smoothness_theta, l2_operator_check)

__all__ = [
    "JacobiParams", "SpectralTruncation", "TrigTerm", "basis_term",
    "delta_star", "delta_star_eval", "delta_term", "delta_terms",
    "eigenvalue", "eval_jacobi", "eval_normalized", "eval_terms",
    "normalizing_constant",
    "Ball", "GridFunction", "ball_volume", "ball_volume_surrogate", "density",
    "measure_interval", "measure_total", "omega",
    "DerivativeSpec", "KernelValue", "NonConvergenceError", "iden1_expansion",
    "kernel_derivative", "poisson_kernel", "semigroup_apply", "semigroup_coeffs",
    "PiMeasureRule", "UpsilonSpec", "pi_rule", "q_fn", "upsilon", "upsilon_bnorm",
    "AreaNormEngine", "BNormSpec", "ConeGrid", "area_integral", "area_l2_norm",
    "b_norm", "g_function", "g_l2_norm", "s_kernel",
    "GammaChoice", "VerificationReport", "check_growth", "check_lemma",
    "check_smoothness_phi", "check_smoothness_theta", "l2_operator_check",
]
