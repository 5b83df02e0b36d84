"""Special functions needed by the closed forms.

Log-gamma and the error function come from the standard library; the
regularized upper incomplete gamma at large order is delegated to
:func:`scipy.special.gammaincc` (uniform asymptotic expansion).  The
exponential integral of negative integer order with complex argument and the
incomplete beta function with negative parameters are evaluated here because
library routines either lack complex support or reject negative parameters.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import integrate, special

from .errors import NumericError

# Above this order the Stirling series is used for log(n!) + n - n log n.
_STIRLING_SWITCH = 200
# Above this order the Poisson probability switches to the asymptotic route.
_POISSON_SWITCH = 1000


def log_stirling_ratio(n: float) -> float:
    """``log(n!) + n - n*log(n)``, i.e. ``log(n! e**n / n**n)``.

    Direct evaluation loses about ``n*eps`` absolute accuracy to cancellation,
    so large ``n`` uses the Stirling series
    ``0.5*log(2*pi*n) + 1/(12n) - 1/(360n^3) + 1/(1260n^5) - 1/(1680n^7)``.
    """
    if n <= 0:
        raise ValueError("n must be positive")
    if n < _STIRLING_SWITCH:
        return math.lgamma(n + 1.0) + n - n * math.log(n)
    inv = 1.0 / n
    inv2 = inv * inv
    series = inv * (1 / 12 - inv2 * (1 / 360 - inv2 * (1 / 1260 - inv2 / 1680)))
    return 0.5 * math.log(2.0 * math.pi * n) + series


def poisson_below_mean(n: int) -> float:
    """``P(N < n)`` for ``N ~ Poisson(n)``, equal to ``Q(n, n)``.

    ``Q`` is the regularized upper incomplete gamma function, so this is also
    ``e**-n * sum(n**m / m! for m < n)``.  Small orders sum the Poisson terms
    in log space; large orders use the uniform asymptotic expansion behind
    :func:`scipy.special.gammaincc`, which stays accurate where the partial
    sum would need ``n`` terms of wildly different magnitude.
    """
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if n > _POISSON_SWITCH:
        return float(special.gammaincc(n, n))
    m = np.arange(n, dtype=float)
    log_terms = m * math.log(n) - special.gammaln(m + 1.0) - n
    return float(np.exp(special.logsumexp(log_terms)))


def poisson_below_mean_asymptotic(n: float) -> float:
    """Two-term Poisson central-limit approximation ``1/2 - 1/(3 sqrt(2 pi n))``."""
    return 0.5 - 1.0 / (3.0 * math.sqrt(2.0 * math.pi * n))


def expint_neg_order_scaled(order: int, z: complex) -> complex:
    """``exp(z) * E_{-order}(z)`` for a nonnegative integer order.

    ``E_{-n}(z) = Gamma(n+1, z) / z**(n+1) = n! e**-z sum_{k<=n} z**k/k! / z**(n+1)``.
    The terms ``n!/k! z**(k-n-1)`` are generated downward from ``k = n``,
    which is stable whenever ``|z| >= n``.
    """
    if order < 0:
        raise ValueError("order must be a nonnegative integer")
    if z == 0:
        raise ZeroDivisionError("E_{-n}(z) is singular at z = 0")
    term = 1.0 / z
    total = term
    for k in range(order, 0, -1):
        term = term * k / z
        total += term
    return complex(total)


def expint_neg_order(order: int, z: complex) -> complex:
    """Exponential integral ``E_{-order}(z) = int_1^inf e**(-z t) t**order dt``."""
    return complex(np.exp(-z) * expint_neg_order_scaled(order, z))


def incomplete_beta_difference(a: float, b: float, z1: float, z2: float) -> float:
    """``B_{z2}(a, b) - B_{z1}(a, b)`` for ``0 < z1 <= z2 < 1``.

    Each term diverges at zero when ``a <= 0``, but the difference is the
    finite integral ``int_{z1}^{z2} t**(a-1) (1-t)**(b-1) dt``, computed by
    direct quadrature of the defining integrand.
    """
    if not 0.0 < z1 <= z2 < 1.0:
        raise ValueError("need 0 < z1 <= z2 < 1")
    if z1 == z2:
        return 0.0
    val, err = integrate.quad(
        lambda t: t ** (a - 1.0) * (1.0 - t) ** (b - 1.0),
        z1, z2, epsabs=0.0, epsrel=1e-12, limit=200,
    )
    if not math.isfinite(val) or err > 1e-8 * max(abs(val), 1e-300):
        raise NumericError(f"incomplete beta quadrature failed (value={val}, err={err})")
    return val


def erf(x: float) -> float:
    return math.erf(x)
