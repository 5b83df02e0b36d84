"""Closed forms for two-component Gaussian mixtures."""

from __future__ import annotations

import math

from ..errors import ParameterDomainError


def mixture_kurtosis(mu1: float, mu2: float, sigma1: float, sigma2: float) -> float:
    """Kurtosis of the equal-weight mixture of N(mu1, sigma1^2) and N(mu2, sigma2^2)."""
    if not (sigma1 > 0 and sigma2 > 0 and math.isfinite(mu1) and math.isfinite(mu2)):
        raise ParameterDomainError("need sigma1, sigma2 > 0 and finite means")
    d = mu1 - mu2
    s1, s2 = sigma1 * sigma1, sigma2 * sigma2
    num = d**4 - 6.0 * (s1 - s2) ** 2
    den = (d * d + 2.0 * (s1 + s2)) ** 2
    return 3.0 - 2.0 * num / den


def kurtosis_boundary_separation(sigma1: float, sigma2: float) -> float:
    """``|d|`` at which the mixture kurtosis equals 3, ``6^(1/4) sqrt(|sigma1^2 - sigma2^2|)``."""
    return 6.0 ** 0.25 * math.sqrt(abs(sigma1 * sigma1 - sigma2 * sigma2))


def mean_mixture_kappa1(d: float, sigma: float) -> float:
    """kappa(1, 2) for the equal-weight mixture of N(0, sigma^2) and N(d, sigma^2).

    The common factor ``exp(d^2 / 4 sigma^2)`` is divided out of the ratio so
    large separations do not overflow.
    """
    if not (sigma > 0 and math.isfinite(d)):
        raise ParameterDomainError("need sigma > 0 and finite d")
    d = abs(d)
    if d == 0.0:
        return 2.0 - math.log(2.0) / math.log(math.sqrt(2.0))
    u = d * d / (4.0 * sigma * sigma)
    num = math.sqrt(math.pi) * d * math.erf(d / (2 * sigma)) + 2 * sigma + 2 * sigma * math.exp(-u)
    den = d * math.erf(d / (2 * math.sqrt(2.0) * sigma)) + 2 * math.sqrt(2 / math.pi) * sigma * math.exp(-u / 2)
    return math.log(4.0) / (math.log(math.pi) - 2.0 * math.log(num / den)) + 2.0
