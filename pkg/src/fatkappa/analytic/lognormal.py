"""Lognormal sums: cumulants, the moment-preserving bound and a Pearson fit.

The Pearson density solves ``f'(x) = -(a0 + a1 x) / (b0 + b1 x + b2 x^2) f(x)``.
With ``a1 = 1`` the coefficients below match the first four cumulants of the
n-fold lognormal sum. The mean deviation then follows from the identity
``E|X - m| = 2 (b0 + b1 m + b2 m^2) f(m) / (a1 - 2 b2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np
from scipy import integrate, special

from ..errors import DomainError, NumericError, ParameterDomainError

SQRT2 = math.sqrt(2.0)
# Pearson fit is considered accurate below this sigma.
PEARSON_SIGMA_MAX = 0.3
# Above this sigma the moment-preserving lognormal bound is used.
KAPPA_STAR_SIGMA_MIN = 2.0
# The fitted mean must reproduce K1; larger drift signals cancellation.
MEAN_RTOL = 1e-8


def _check(mu: float, sigma: float, n: int) -> None:
    if not (math.isfinite(mu) and math.isfinite(sigma) and sigma > 0):
        raise ParameterDomainError("need finite mu and sigma > 0")
    if int(n) != n or n < 1:
        raise DomainError("n must be a positive integer")


@dataclass(frozen=True)
class LognormalCumulants:
    K1: float
    K2: float
    K3: float
    K4: float
    skewness: float
    kurtosis: float
    n: int
    mu: float
    sigma: float


def lognormal_cumulants(mu: float, sigma: float, n: int = 1) -> LognormalCumulants:
    """First four cumulants of the sum of ``n`` i.i.d. lognormals."""
    _check(mu, sigma, n)
    s = sigma * sigma
    em = math.expm1(s)
    k1 = n * math.exp(mu + 0.5 * s)
    k2 = n * em * math.exp(2 * mu + s)
    k3 = n * em**2 * (math.exp(s) + 2.0) * math.exp(3 * mu + 1.5 * s)
    poly = math.exp(4 * s) + 2 * math.exp(3 * s) + 3 * math.exp(2 * s) - 6.0
    k4 = n * poly * em**2 * math.exp(4 * mu + 2 * s)
    skew = math.sqrt(em) * (math.exp(s) + 2.0) / math.sqrt(n)
    kurt = 3.0 + (math.exp(2 * s) * (math.exp(s) * (math.exp(s) + 2.0) + 3.0) - 6.0) / n
    return LognormalCumulants(k1, k2, k3, k4, skew, kurt, int(n), float(mu), float(sigma))


def lognormal_kappa_star(sigma: float, n: int) -> float:
    """kappa(1, n) when the n-sum is replaced by the lognormal with the same two moments."""
    _check(0.0, sigma, n)
    if n < 2:
        raise DomainError("n must be >= 2")
    s = sigma * sigma
    inner = math.sqrt(math.log1p(math.expm1(s) / n))
    ratio = n * math.erf(inner / (2 * SQRT2)) / math.erf(sigma / (2 * SQRT2))
    return 2.0 - math.log(n) / math.log(ratio)


# --- Pearson fit ---------------------------------------------------------------------

@dataclass(frozen=True)
class PearsonIVFit:
    """Pearson ODE coefficients fitted to the n-fold lognormal sum.

    The density is ``normalization * exp(-Phi(x))`` on ``support`` where
    ``Phi`` is the antiderivative of ``(a0 + a1 x)/(b0 + b1 x + b2 x^2)``.
    For real roots ``r1 < r2`` of the quadratic this is
    ``(x - r2)^p (x - r1)^q``; for complex roots it is the type IV form with
    an arctangent term.
    """

    a0: float
    a1: float
    b0: float
    b1: float
    b2: float
    m: float
    normalization: float  # may be inf for tight fits; pdf works in log space
    mu: float
    sigma: float
    n: int
    root_type: str
    support: tuple[float, float]
    in_recommended_range: bool
    exponents: tuple[float, float] | None = None
    roots: tuple[float, float] | None = None
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def quadratic(self, x):
        return self.b0 + self.b1 * x + self.b2 * x * x

    def log_kernel(self, x):
        """``-Phi(x)``, the unnormalized log density (up to a constant)."""
        x = np.asarray(x, dtype=float)
        if self.root_type == "real":
            r1, r2 = self.roots
            p, q = self.exponents
            return p * np.log(x - r2) + q * np.log(x - r1)
        return _log_kernel_complex(self.a0, self.a1, self.b0, self.b1, self.b2, x)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.support
        inside = (x > lo) & (x < hi)
        xx = np.where(inside, x, self.m)
        with np.errstate(divide="ignore", invalid="ignore"):
            val = np.exp(self.log_kernel(xx) - self.metadata["log_shift"]
                         + self.metadata["log_normalization"])
        return np.where(inside, val, 0.0)


def _pearson_coefficients(mu: float, sigma: float, n: int) -> tuple[float, float, float, float]:
    s = sigma * sigma
    e = math.exp
    den = 2.0 * (6 * (n - 1) + e(2 * s) * (e(s) * (5 * e(s) + 4) - 3))
    a0 = e(mu + s / 2) * (
        -12 * n * n + (3 - 10 * n) * e(4 * s) + 6 * (n - 1) * e(s) + 12 * (n - 1) * e(2 * s)
        - (8 * n + 1) * e(3 * s) + 3 * e(5 * s) + e(6 * s) + 12
    ) / den
    b2 = e(2 * s) * math.expm1(s) * (2 * e(s) + 3) / den
    b1 = math.expm1(s) * e(mu + s / 2) * (
        e(s) * (e(s) * (e(s) * (-4 * n + e(s) * (e(s) + 4) + 7) - 6 * n + 6) + 6 * (n - 1))
        + 12 * (n - 1)
    ) / den
    b0 = -n * math.expm1(s) * e(2 * (mu + s)) * (
        e(s) * (-2 * (n - 1) * e(s) - 3 * n + e(3 * s) + 3) + 6 * (n - 1)
    ) / den
    return a0, b0, b1, b2


def _log_kernel_complex(a0, a1, b0, b1, b2, x):
    # int (a0 + a1 x)/(b2 x^2 + b1 x + b0) dx for 4 b0 b2 > b1^2
    disc = math.sqrt(4 * b0 * b2 - b1 * b1)
    quad = b0 + b1 * x + b2 * x * x
    phi = (a1 / (2 * b2)) * np.log(quad) + (a0 - a1 * b1 / (2 * b2)) * (2.0 / disc) * np.arctan(
        (2 * b2 * x + b1) / disc)
    return -phi


def pearson_fit(mu: float, sigma: float, n: int) -> PearsonIVFit:
    """Fit the Pearson ODE to the cumulants of ``n`` summed lognormals."""
    _check(mu, sigma, n)
    n = int(n)
    a0, b0, b1, b2 = _pearson_coefficients(mu, sigma, n)
    a1 = 1.0
    if abs(a1 - 2 * b2) < 1e-14:
        raise NumericError("degenerate Pearson fit: a1 - 2 b2 = 0")
    m = (b1 - a0) / (1 - 2 * b2)
    k1 = n * math.exp(mu + 0.5 * sigma * sigma)
    if not abs(m / k1 - 1.0) < MEAN_RTOL:
        # The coefficient formulas cancel catastrophically at large sigma.
        raise NumericError(f"Pearson coefficients lost precision at sigma={sigma}: "
                           f"fitted mean {m:.6g} vs {k1:.6g}")
    disc = b1 * b1 - 4 * b0 * b2
    in_range = sigma <= PEARSON_SIGMA_MAX
    if disc > 0:
        sq = math.sqrt(disc)
        # Stable quadratic roots.
        qq = -0.5 * (b1 + math.copysign(sq, b1))
        roots = sorted((qq / b2, b0 / qq))
        r1, r2 = roots
        if not r2 < m:
            raise NumericError("Pearson fit: mean lies outside the support")
        # Partial fractions (a0 + x)/(b2 (x - r1)(x - r2)).
        p = -(a0 + r2) / (b2 * (r2 - r1))
        q = -(a0 + r1) / (b2 * (r1 - r2))
        shape_b = -p - q - 1.0
        if not (p > -1.0 and shape_b > 0.0):
            raise NumericError(
                f"fitted Pearson density is not integrable (p={p:.4g}, b2={b2:.4g}) at sigma={sigma}")
        # int_{r2}^inf (x-r2)^p (x-r1)^q dx = (r2-r1)^(p+q+1) B(p+1, -p-q-1)
        log_norm = -((p + q + 1.0) * math.log(r2 - r1) + special.betaln(p + 1.0, shape_b))
        log_shift = 0.0
        norm = math.exp(log_norm) if log_norm < 700 else math.inf
        fit = PearsonIVFit(a0, a1, b0, b1, b2, m, norm, float(mu), float(sigma), n,
                           "real", (r2, math.inf), in_range, (p, q), (r1, r2),
                           {"log_shift": log_shift, "log_normalization": log_norm})
        return fit
    if b2 <= 0 or b2 >= 0.5:
        raise NumericError(f"fitted Pearson IV density is not integrable (b2={b2:.4g})")
    # Complex roots: normalize numerically around the mean.
    log_shift = float(_log_kernel_complex(a0, a1, b0, b1, b2, np.array(m)))
    kern = lambda x: math.exp(float(_log_kernel_complex(a0, a1, b0, b1, b2, np.array(x))) - log_shift)
    scale = math.sqrt(max(b0 + b1 * m + b2 * m * m, 1e-300))
    total = 0.0
    for lo, hi in ((-np.inf, m - scale), (m - scale, m), (m, m + scale), (m + scale, np.inf)):
        v, _ = integrate.quad(kern, lo, hi, epsabs=0.0, epsrel=1e-12, limit=400)
        total += v
    if not (math.isfinite(total) and total > 0):
        raise NumericError("Pearson IV normalization failed")
    return PearsonIVFit(a0, a1, b0, b1, b2, m, 1.0 / total, float(mu), float(sigma), n,
                        "complex", (-math.inf, math.inf), in_range, None, None,
                        {"log_shift": log_shift, "log_normalization": -math.log(total)})


def pearson_mad(fit: PearsonIVFit) -> float:
    """``E|X - m| = 2 (b0 + b1 m + b2 m^2) f(m) / (a1 - 2 b2)``."""
    fm = float(fit.pdf(fit.m))
    return 2.0 * fit.quadratic(fit.m) * fm / (fit.a1 - 2.0 * fit.b2)


def pearson_mad_quadrature(fit: PearsonIVFit) -> float:
    """``2 int_m^inf (x - m) f(x) dx`` by direct quadrature (identity check)."""
    m = fit.m
    lo = fit.support[0]
    w = m - lo if math.isfinite(lo) else math.sqrt(fit.quadratic(m))
    # x = m + w (e^u - 1) spreads the long right tail.
    g = lambda u: (w * math.expm1(u)) * float(fit.pdf(m + w * math.expm1(u))) * w * math.exp(u)
    total = 0.0
    edges = [0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0]
    for a, b in zip(edges[:-1], edges[1:]):
        v, _ = integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-12, limit=200)
        total += v
    return 2.0 * total


def pearson_kappa(sigma: float, n: int, mu: float = 0.0, n0: int = 1) -> float:
    """kappa(n0, n) with both mean deviations taken from Pearson fits."""
    if n <= n0:
        raise DomainError("need n > n0")
    r = pearson_mad(pearson_fit(mu, sigma, n)) / pearson_mad(pearson_fit(mu, sigma, n0))
    return 2.0 - (math.log(n) - math.log(n0)) / math.log(r)


@dataclass(frozen=True)
class LognormalKappa:
    sigma: float
    n: int
    kappa: float
    method: str
    kappa_star: float
    pearson: float | None
    monte_carlo: Any = None  # KappaResult when simulated
    std_error: float = 0.0


def lognormal_kappa(sigma: float, n: int = 2, mu: float = 0.0, mc_config=None) -> LognormalKappa:
    """kappa(1, n) for the lognormal routed by sigma regime.

    ``sigma < 0.3``: Pearson fit. ``sigma > 2``: the moment-preserving bound
    kappa*. In between both are reported next to a Monte Carlo estimate,
    which is the value returned.
    """
    from ..distributions import Lognormal
    from ..kappa import kappa as kappa_mc
    from ..mad import McConfig

    _check(mu, sigma, n)
    ks = lognormal_kappa_star(sigma, n)
    try:
        kp = pearson_kappa(sigma, n, mu)
    except NumericError:
        kp = None
    if sigma < PEARSON_SIGMA_MAX and kp is not None:
        return LognormalKappa(sigma, n, kp, "pearson", ks, kp)
    if sigma > KAPPA_STAR_SIGMA_MIN:
        return LognormalKappa(sigma, n, ks, "kappa_star", ks, kp)
    res = kappa_mc(Lognormal(mu, sigma), 1, n, "mc", mc_config or McConfig())
    return LognormalKappa(sigma, n, res.kappa, "monte_carlo", ks, kp, res, res.std_error)


def pearson_cumulants(fit: PearsonIVFit) -> tuple[float, float, float, float]:
    """First four cumulants of the fitted density by quadrature (cumulant-matching check)."""
    m = fit.m
    lo = fit.support[0]
    w = m - lo if math.isfinite(lo) else math.sqrt(fit.quadratic(m))
    edges = [-40.0, -16.0, -8.0, -4.0, -2.0, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0]

    def moment(k: int) -> float:
        if math.isfinite(lo):
            # x = lo + w e^u covers (lo, inf).
            g = lambda u: (lo + w * math.exp(u) - m) ** k * float(fit.pdf(lo + w * math.exp(u))) * w * math.exp(u)
        else:
            g = lambda u: (w * math.sinh(u)) ** k * float(fit.pdf(m + w * math.sinh(u))) * w * math.cosh(u)
        return sum(integrate.quad(g, a, b, epsabs=0.0, epsrel=1e-13, limit=200)[0]
                   for a, b in zip(edges[:-1], edges[1:]))

    c0, c1, c2, c3, c4 = (moment(k) for k in range(5))
    c1, c2, c3, c4 = c1 / c0, c2 / c0, c3 / c0, c4 / c0
    mean = m + c1
    var = c2 - c1**2
    mu3 = c3 - 3 * c1 * c2 + 2 * c1**3
    mu4 = c4 - 4 * c1 * c3 + 6 * c1**2 * c2 - 3 * c1**4
    return mean, var, mu3, mu4 - 3 * var**2
