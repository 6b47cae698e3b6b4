"""Conditional moments of anticipative stable processes.

Exact conditional means, variances, skewness and kurtosis of
alpha-stable anticipative AR(1), Ornstein-Uhlenbeck and aggregated
processes, together with path simulators and independent numerical
cross-checks.
"""

from .errors import (DegenerateModelError, DivergenceError, DomainError,
                     InsufficientDataError, MomentExistenceError,
                     NumericalError, ParameterError, StableAnticipateError,
                     UnsupportedError)
from .models import (AR1, AR2, AggComponent, Aggregated, BivariateConstants,
                     MomentResult, OU, PathConfig, QuadResult, Regime,
                     SpectralRep, StableParams, ThetaPair, ThetaSet)
from .moments import (asymptotic_moments, bernoulli_summary, build_thetas,
                      cond_moment, cond_summary, kurtosis_min_horizon,
                      linearity_check)
from .oracles import (CfMomentResult, McMomentResult,
                      cf_conditional_moment_oracle, cf_joint_pdf,
                      marginal_params, mc_conditional_moment)
from .quadrature import (clear_basis_cache, eval_H, eval_HcHs, eval_U, eval_V,
                         eval_W, moment_basis, set_basis_cache_capacity)
from .simulate import (rng_stream, simulate_agg, simulate_ar1, simulate_ar2,
                       simulate_ou)
from .spectral import (agg_spectral, ar1_spectral, ar2_ma_coefficients,
                       bivariate_constants, closed_form_constants,
                       ma_spectral, nu_integral, ou_spectral, spectral_rep)
from .stable import (make_stable_params, sample_stable, skewed_tail_asymptote,
                     stable_char_fn, stable_pdf)
from .validation import SUITE_NAMES, run_suite

__version__ = "0.1.0"

__all__ = [
    "AR1", "AR2", "AggComponent", "Aggregated", "BivariateConstants",
    "DegenerateModelError", "DivergenceError", "DomainError",
    "InsufficientDataError", "MomentExistenceError", "MomentResult",
    "NumericalError", "OU", "ParameterError", "PathConfig", "QuadResult",
    "Regime", "SUITE_NAMES", "SpectralRep", "StableAnticipateError",
    "StableParams", "CfMomentResult", "McMomentResult", "ThetaPair",
    "ThetaSet",
    "UnsupportedError", "agg_spectral", "ar1_spectral",
    "ar2_ma_coefficients", "asymptotic_moments", "bernoulli_summary",
    "bivariate_constants", "build_thetas", "cf_conditional_moment_oracle",
    "cf_joint_pdf", "clear_basis_cache", "closed_form_constants",
    "cond_moment", "cond_summary", "eval_H", "eval_HcHs", "eval_U",
    "eval_V", "eval_W", "kurtosis_min_horizon", "linearity_check",
    "ma_spectral", "make_stable_params", "marginal_params",
    "mc_conditional_moment", "moment_basis", "nu_integral", "ou_spectral",
    "rng_stream", "run_suite", "sample_stable", "set_basis_cache_capacity",
    "simulate_agg", "simulate_ar1", "simulate_ar2", "simulate_ou",
    "skewed_tail_asymptote", "spectral_rep", "stable_char_fn", "stable_pdf",
]
