"""Exponential and gamma sums: the n-fold sum of Exp(lambda) is Gamma(n, lambda)."""

from __future__ import annotations

import math

from ..errors import DomainError, ParameterDomainError
from ..specfun import log_stirling_ratio


def exponential_mad(n: int, lam: float = 1.0) -> float:
    """``M(n) = 2 e^-n n^n / (lambda Gamma(n))``."""
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")
    if not lam > 0:
        raise ParameterDomainError("lambda must be > 0")
    # log(n^n e^-n / Gamma(n)) = log n - log(n! e^n / n^n)
    return 2.0 * math.exp(math.log(n) - log_stirling_ratio(n)) / lam


def exponential_kappa_n(n: int) -> float:
    """``kappa(1, n) = 2 - log n / (n log n - n - log Gamma(n) + 1)``.

    The denominator equals ``log n + 1 - log(n! e^n / n^n)`` and is
    evaluated in that form, which keeps full accuracy at large ``n``.
    """
    if int(n) != n or n < 2:
        raise DomainError("n must be an integer >= 2")
    denom = math.log(n) + 1.0 - log_stirling_ratio(n)
    return 2.0 - math.log(n) / denom


def exponential_log_limit() -> float:
    """Limit of ``log(n) kappa(1, n)``: ``4 - 2 log(2 pi)``."""
    return 4.0 - 2.0 * math.log(2.0 * math.pi)
