"""Two-summand kappa, ``kappa_1 = kappa(1, 2)``, for the catalog families."""

from __future__ import annotations

import math
import warnings

from scipy import integrate

from ..errors import NumericError, ParameterDomainError
from ..specfun import incomplete_beta_difference

LOG2 = math.log(2.0)


def kappa_from_ratio(ratio: float, n: float = 2, n0: float = 1) -> float:
    """Solve ``M(n)/M(n0) = (n/n0)^(1/(2-kappa))`` for kappa."""
    return 2.0 - (math.log(n) - math.log(n0)) / math.log(ratio)


def kappa1_student(alpha: float) -> float:
    """``2 - 2 log 2 / (2 log(2^(2-a) Gamma(a-1/2) / Gamma(a/2)^2) + log pi)``."""
    if not alpha > 1:
        raise ParameterDomainError("alpha must be > 1")
    inner = (2 - alpha) * LOG2 + math.lgamma(alpha - 0.5) - 2.0 * math.lgamma(0.5 * alpha)
    return 2.0 - 2.0 * LOG2 / (2.0 * inner + math.log(math.pi))


def kappa1_exponential() -> float:
    """``2 - log 2 / (2 log 2 - 1)``, the same for every rate and gamma shape 1."""
    return 2.0 - LOG2 / (2.0 * LOG2 - 1.0)


def pareto_mad_ratio(alpha: float, quad=None) -> float:
    """``M(2)/M(1)`` for the one-tailed Pareto by convolution quadrature."""
    from ..distributions import Pareto
    from ..mad import mad_convolution

    spec = Pareto(alpha)
    return mad_convolution(spec, 2, quad).value / spec.mad1()


def pareto_mad_ratio_incomplete_beta(alpha: float) -> float:
    """``M(2)/M(1)`` from the incomplete-beta integral representation.

    ``(a-1)^(2-a) a^(a-1) int_0^{2/(a-1)} -2 a^2 (y+2)^(-2a-1) (2/(a-1) - y)
    [B_{1/(y+2)}(-a, 1-a) - B_{(y+1)/(y+2)}(-a, 1-a)] dy``. The incomplete
    beta difference is finite although each term diverges for ``a > 0``.
    """
    a = float(alpha)
    if not a > 1:
        raise ParameterDomainError("alpha must be > 1")
    top = 2.0 / (a - 1.0)

    def integrand(y):
        if y <= 0.0:
            return 0.0
        diff = incomplete_beta_difference(-a, 1.0 - a, 1.0 / (y + 2.0), (y + 1.0) / (y + 2.0))
        return 2.0 * a * a * (y + 2.0) ** (-2.0 * a - 1.0) * (top - y) * diff

    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, _ = integrate.quad(integrand, 0.0, top, epsabs=0.0, epsrel=1e-11, limit=200)
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"incomplete-beta Pareto integral failed at alpha={a}: {exc}") from exc
    return (a - 1.0) ** (2.0 - a) * a ** (a - 1.0) * val


def kappa1_pareto(alpha: float, quad=None, cross_check: bool = False) -> float:
    """Pareto ``kappa_1`` from the convolution quadrature.

    With ``cross_check`` the incomplete-beta representation is evaluated too
    and a warning is issued when the two differ by more than ``1e-8``.
    """
    if not alpha > 1:
        raise ParameterDomainError("alpha must be > 1")
    k = kappa_from_ratio(pareto_mad_ratio(alpha, quad))
    if cross_check:
        k2 = kappa_from_ratio(pareto_mad_ratio_incomplete_beta(alpha))
        if abs(k - k2) > 1e-8:
            warnings.warn(f"Pareto kappa_1 representations differ at alpha={alpha}: "
                          f"convolution {k:.10f}, incomplete beta {k2:.10f}")
    return k


def kappa1_switching_variance(sigma: float, a: float, p: float) -> float:
    """Gaussian with variance ``sigma^2 + a`` w.p. ``p``, else ``sigma^2 + a p/(p-1)``."""
    if not (sigma > 0 and a >= 0 and 0 < p < 1):
        raise ParameterDomainError("need sigma > 0, a >= 0, 0 < p < 1")
    low = a * p / (p - 1.0) + sigma * sigma
    if low < -1e-12 * sigma * sigma:
        raise ParameterDomainError("low-regime variance sigma^2 + a p/(p-1) is negative")
    s_low = math.sqrt(max(low, 0.0))
    s_high = math.sqrt(a + sigma * sigma)
    s_cross = math.sqrt(max(2.0 * a * (1.0 / (p - 1.0) + 2.0) + 4.0 * sigma * sigma, 0.0))
    num = math.sqrt(2.0) * (s_low + p * (-2.0 * s_low + p * (s_low - s_cross + s_high) + s_cross))
    den = p * s_high - (p - 1.0) * s_low
    return 2.0 - LOG2 / math.log(num / den)


def kappa1_lognormal_approx(sigma: float) -> float:
    """``2 - log 2 / log(2 erf(sqrt(log((e^s2 + 1)/2)) / (2 sqrt 2)) / erf(sigma / (2 sqrt 2)))``."""
    if not sigma > 0:
        raise ParameterDomainError("sigma must be > 0")
    inner = math.sqrt(math.log(0.5 * (math.exp(sigma * sigma) + 1.0)))
    ratio = 2.0 * math.erf(inner / (2.0 * math.sqrt(2.0))) / math.erf(sigma / (2.0 * math.sqrt(2.0)))
    return 2.0 - LOG2 / math.log(ratio)
