"""Poincare-type inequalities on the Gaussian space with explicit constants."""

from .checks import (
    LipschitzBound,
    NORM_PAIRS,
    centered,
    chi2_bound_check,
    cosh_gauss2_bound_check,
    covariance_bound_check,
    first_version_check,
    gauss_poincare_check,
    lipschitz_constant,
    lipschitz_subexp_bound,
    lipschitz_subexp_check,
    llogl_bound_check,
    lp_bound_check,
    mgf_bound_check,
    ou_selfadjoint_check,
    selfadjoint_time_integral,
)
from .constants import C1, C2, C3, gaussian_moment, kappa_residual, kappa_star
from .report import CSV_FIELDS, InequalityReport, InequalityRow
from .suite import Catalog, CatalogEntry, SuiteConfig, load_catalog, run_suite, thread_count

__all__ = [
    "C1",
    "C2",
    "C3",
    "CSV_FIELDS",
    "Catalog",
    "CatalogEntry",
    "InequalityReport",
    "InequalityRow",
    "LipschitzBound",
    "NORM_PAIRS",
    "SuiteConfig",
    "centered",
    "chi2_bound_check",
    "cosh_gauss2_bound_check",
    "covariance_bound_check",
    "first_version_check",
    "gauss_poincare_check",
    "gaussian_moment",
    "kappa_residual",
    "kappa_star",
    "lipschitz_constant",
    "lipschitz_subexp_bound",
    "lipschitz_subexp_check",
    "llogl_bound_check",
    "load_catalog",
    "lp_bound_check",
    "mgf_bound_check",
    "ou_selfadjoint_check",
    "run_suite",
    "selfadjoint_time_integral",
    "thread_count",
]
