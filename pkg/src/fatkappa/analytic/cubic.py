"""Student t with three degrees of freedom: exact sums.

The density is ``6 sqrt(3) / (pi (3 + x^2)^2)`` and the characteristic
function ``(1 + sqrt(3)|t|) exp(-sqrt(3)|t|)``. Writing
``e^n n^-n Gamma(n+1, n) - 1 = (n! e^n / n^n) Q(n, n)`` removes the
cancellation in the mean-deviation formula, so every quantity below is
evaluated without loss at any ``n``.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import DomainError, NumericError
from ..specfun import expint_neg_order_scaled, log_stirling_ratio, poisson_below_mean

SQRT3 = math.sqrt(3.0)
MAD1 = 2.0 * SQRT3 / math.pi


def _check(n: int, lo: int = 1) -> int:
    if int(n) != n or n < lo:
        raise DomainError(f"n must be an integer >= {lo}")
    return int(n)


def cubic_pdf(x):
    x = np.asarray(x, dtype=float)
    return 6.0 * SQRT3 / (math.pi * (3.0 + x * x) ** 2)


def cubic_cf(t, n: int = 1):
    """Characteristic function of the n-fold sum."""
    a = SQRT3 * np.abs(np.asarray(t, dtype=float))
    return ((1.0 + a) * np.exp(-a)) ** n


def log_mad_ratio(n: int) -> float:
    """``log(M(n)/M(1)) = log(n! e^n / n^n) + log Q(n, n)``."""
    n = _check(n)
    return log_stirling_ratio(n) + math.log(poisson_below_mean(n))


def cubic_mad(n: int) -> float:
    """``M(n)`` for the unit-scale cubic Student t."""
    return MAD1 * math.exp(log_mad_ratio(n))


def cubic_kappa(n: int) -> float:
    """``kappa(1, n) = 2 - log n / log(M(n)/M(1))``."""
    n = _check(n, 2)
    return 2.0 - math.log(n) / log_mad_ratio(n)


def cubic_sum_pdf(y, n: int) -> float:
    """Density of the n-fold sum via exponential integrals of order ``-n``.

    With ``z = n + i y / sqrt(3)`` the density is
    ``(e^z E_-n(z) + e^conj(z) E_-n(conj z)) / (2 sqrt(3) pi)``, whose two
    terms are complex conjugates.
    """
    n = _check(n)
    y = float(y)
    z = complex(n, y / SQRT3)
    plus = expint_neg_order_scaled(n, z)
    minus = expint_neg_order_scaled(n, z.conjugate())
    total = plus + minus
    if not (math.isfinite(total.real) and math.isfinite(total.imag)):
        raise NumericError(f"exponential integral evaluation failed at y={y}, n={n}")
    if abs(total.imag) > 1e-10 * max(abs(total.real), 1e-300):
        raise NumericError(f"imaginary residual {total.imag:.3e} in summed density")
    return max(total.real, 0.0) / (2.0 * SQRT3 * math.pi)
