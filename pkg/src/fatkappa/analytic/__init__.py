"""Closed-form and semi-analytic kappa results."""

from __future__ import annotations

from .cubic import cubic_kappa, cubic_mad, cubic_pdf, cubic_sum_pdf
from .exponential import exponential_kappa_n, exponential_log_limit, exponential_mad
from .lognormal import (
    LognormalCumulants,
    LognormalKappa,
    PearsonIVFit,
    lognormal_cumulants,
    lognormal_kappa,
    lognormal_kappa_star,
    pearson_fit,
    pearson_kappa,
    pearson_mad,
    pearson_cumulants,
    pearson_mad_quadrature,
)
from .mixtures import kurtosis_boundary_separation, mean_mixture_kappa1, mixture_kurtosis
from .table1 import (
    kappa1_exponential,
    kappa1_lognormal_approx,
    kappa1_pareto,
    kappa1_student,
    kappa1_switching_variance,
    kappa_from_ratio,
    pareto_mad_ratio,
)

__all__ = [name for name in dir() if not name.startswith("_") and name != "annotations"]
