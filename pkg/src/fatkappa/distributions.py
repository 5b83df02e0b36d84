"""Catalog of finite-mean parametric families.

Every family is an immutable dataclass exposing the closed-form mean, the
first mean absolute deviation ``E|X - EX|``, density, characteristic function
and the sampler description consumed by the Monte Carlo kernels.

Samplers are rejection free and read a fixed number of uniforms per draw
(see ``uniforms_per_draw``), so a (seed, stream) pair fixes the whole
uniform sequence and both compiled and numpy backends consume it in the same
order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, fields
from typing import Any, ClassVar, Union

import numpy as np
from scipy import special

from .errors import CapabilityError, ConfigError, FallbackRequired, ParameterDomainError

SQRT2 = math.sqrt(2.0)
SQRT_2_OVER_PI = math.sqrt(2.0 / math.pi)

# Sampler codes shared with the compiled kernels.
K_GAUSSIAN = 0
K_STUDENT = 1
K_PARETO = 2
K_EXPONENTIAL = 3
K_GAMMA = 4
K_LOGNORMAL = 5
K_STABLE = 6
K_VARMIX = 7
K_MEANMIX = 8

UNIFORMS_PER_DRAW = {
    K_GAUSSIAN: 2,
    K_STUDENT: 2,
    K_PARETO: 1,
    K_EXPONENTIAL: 1,
    K_GAMMA: 1,
    K_LOGNORMAL: 2,
    K_STABLE: 2,
    K_VARMIX: 3,
    K_MEANMIX: 3,
}

N_KERNEL_PARAMS = 8


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise ParameterDomainError(msg)


def _finite(*vals: float) -> bool:
    return all(math.isfinite(v) for v in vals)


def _gauss_abs(delta, sigma):
    """``E|N(delta, sigma^2)|``, vectorized."""
    delta = np.asarray(delta, dtype=float)
    z = delta / (sigma * SQRT2)
    return delta * special.erf(z) + sigma * SQRT_2_OVER_PI * np.exp(-z * z)


def _gauss_lower_partial(u, mu, sigma):
    """``E(u - Y)^+`` for ``Y ~ N(mu, sigma^2)``."""
    d = (np.asarray(u, dtype=float) - mu) / sigma
    return (u - mu) * special.ndtr(d) + sigma * np.exp(-0.5 * d * d) / math.sqrt(2 * math.pi)


def _cexpm1(z):
    """``exp(z) - 1`` for complex ``z`` without cancellation near 0."""
    a, b = np.real(z), np.imag(z)
    h = np.sin(0.5 * b)
    return (np.expm1(a) * np.cos(b) - 2.0 * h * h) + 1j * (np.exp(a) * np.sin(b))


def _clog1p(w):
    """``log(1 + w)`` for complex ``w``; numpy's complex log1p loses accuracy near 0."""
    x, y = np.real(w), np.imag(w)
    with np.errstate(divide="ignore", invalid="ignore"):
        re = 0.5 * np.log1p(x * (2.0 + x) + y * y)
    return re + 1j * np.arctan2(y, 1.0 + x)


class _Family:
    """Shared behaviour. Subclasses are frozen dataclasses."""

    family: ClassVar[str] = ""
    kernel_code: ClassVar[int] = -1

    # --- description -------------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, "params": _params_to_json(self)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def label(self) -> str:
        """Compact mini-language form, usable as a row key."""
        params = ",".join(f"{k}={_fmt(v)}" for k, v in _params_to_json(self).items())
        return f"{self.family}:{params}" if params else self.family

    # --- analytic properties ------------------------------------------------
    @property
    def symmetric(self) -> bool:
        return False

    @property
    def tail_exponent(self) -> float:
        """Power-law tail exponent; ``inf`` for light or subexponential tails."""
        return math.inf

    @property
    def basin_index(self) -> float:
        """Stable index reached under summation: ``min(tail exponent, 2)``."""
        return min(self.tail_exponent, 2.0)

    @property
    def heavy_tail(self) -> bool:
        """True when |X| has infinite variance."""
        return self.tail_exponent < 2.0

    def mean(self) -> float:
        raise NotImplementedError

    def mad1(self) -> float:
        raise NotImplementedError

    def pdf(self, x):
        raise CapabilityError(f"{self.family}: density not available")

    def lower_partial_moment(self, u):
        """``E(u - X)^+``, used for the two-summand convolution."""
        raise FallbackRequired(f"{self.family}: no closed form for E(u - X)^+")

    def mad_about(self, u):
        """``E|X - u|`` for scalar or array ``u``."""
        u = np.asarray(u, dtype=float)
        return self.mean() - u + 2.0 * self.lower_partial_moment(u)

    def support(self) -> tuple[float, float]:
        return (-math.inf, math.inf)

    def scale_hint(self) -> float:
        """Characteristic width, used to place quadrature breakpoints."""
        return self.mad1()

    # --- characteristic function --------------------------------------------
    has_cf: ClassVar[bool] = False
    slow_cf: ClassVar[bool] = False

    def log_cf(self, t):
        raise CapabilityError(f"{self.family}: characteristic function not available")

    def log_cf_centered(self, t):
        """``log E exp(i t (X - EX))``; branch may differ from the principal one."""
        t = np.asarray(t, dtype=float)
        return self.log_cf(t) - 1j * t * self.mean()

    def cf(self, t):
        with np.errstate(divide="ignore"):
            out = np.exp(self.log_cf(np.asarray(t, dtype=float)))
        return complex(out) if np.ndim(out) == 0 else out

    def cf_envelope(self, t) -> tuple[float, float]:
        """``(atom, r)`` with ``|cf(s) - atom| <= r`` for all ``|s| >= t``.

        ``atom`` is the mass of a point atom located at the mean (its
        contribution to the CF never decays); ``r`` is nonincreasing in ``t``.
        """
        raise CapabilityError(f"{self.family}: characteristic function not available")

    # --- sampling -------------------------------------------------------------
    def kernel_params(self) -> tuple[int, np.ndarray]:
        """Sampler code and parameter vector ``p``; ``p[6:8]`` is an affine map."""
        raise NotImplementedError

    @property
    def uniforms_per_draw(self) -> int:
        return UNIFORMS_PER_DRAW[self.kernel_params()[0]]


def _pack(*vals: float, scale: float = 1.0, shift: float = 0.0) -> np.ndarray:
    p = np.zeros(N_KERNEL_PARAMS)
    p[: len(vals)] = vals
    p[6] = scale
    p[7] = shift
    return p


def _fmt(v: Any) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


@dataclass(frozen=True)
class Gaussian(_Family):
    mu: float = 0.0
    sigma: float = 1.0
    family: ClassVar[str] = "gaussian"
    has_cf: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.mu, self.sigma), "gaussian: parameters must be finite")
        _require(self.sigma > 0, "gaussian: sigma must be > 0")

    @property
    def symmetric(self) -> bool:
        return True

    def mean(self) -> float:
        return float(self.mu)

    def mad1(self) -> float:
        return SQRT_2_OVER_PI * self.sigma

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.mu) / self.sigma
        return np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))

    def lower_partial_moment(self, u):
        return _gauss_lower_partial(u, self.mu, self.sigma)

    def log_cf(self, t):
        t = np.asarray(t, dtype=float)
        return 1j * self.mu * t - 0.5 * (self.sigma * t) ** 2

    def log_cf_centered(self, t):
        t = np.asarray(t, dtype=float)
        return -0.5 * (self.sigma * t) ** 2 + 0j

    def cf_envelope(self, t):
        return 0.0, math.exp(-0.5 * (self.sigma * t) ** 2)

    def kernel_params(self):
        return K_GAUSSIAN, _pack(self.mu, self.sigma)


@dataclass(frozen=True)
class StudentT(_Family):
    """Student t with ``alpha`` degrees of freedom, centred at zero."""

    alpha: float
    scale: float = 1.0
    family: ClassVar[str] = "studentt"

    def __post_init__(self):
        _require(_finite(self.alpha, self.scale), "studentt: parameters must be finite")
        _require(self.alpha > 1, "studentt: alpha must be > 1 for a finite mean")
        _require(self.scale > 0, "studentt: scale must be > 0")

    @property
    def symmetric(self) -> bool:
        return True

    @property
    def tail_exponent(self) -> float:
        return float(self.alpha)

    @property
    def is_cubic(self) -> bool:
        return self.alpha == 3.0

    @property
    def has_cf(self) -> bool:  # type: ignore[override]
        return self.is_cubic

    def mean(self) -> float:
        return 0.0

    def mad1(self) -> float:
        nu = self.alpha
        log_m = (
            math.log(2.0) + 0.5 * math.log(nu) + math.lgamma(0.5 * (nu + 1))
            - 0.5 * math.log(math.pi) - math.log(nu - 1) - math.lgamma(0.5 * nu)
        )
        return self.scale * math.exp(log_m)

    def _std_pdf(self, z):
        nu = self.alpha
        log_c = (math.lgamma(0.5 * (nu + 1)) - math.lgamma(0.5 * nu)
                 - 0.5 * math.log(nu * math.pi))
        return np.exp(log_c - 0.5 * (nu + 1) * np.log1p(z * z / nu))

    def pdf(self, x):
        z = np.asarray(x, dtype=float) / self.scale
        return self._std_pdf(z) / self.scale

    def lower_partial_moment(self, u):
        # E(z - T)^+ = z F(z) + (nu + z^2) f(z) / (nu - 1) for standard T.
        nu = self.alpha
        z = np.asarray(u, dtype=float) / self.scale
        cdf = special.stdtr(nu, z)
        return self.scale * (z * cdf + (nu + z * z) / (nu - 1) * self._std_pdf(z))

    def _no_cf(self):
        raise CapabilityError(
            "studentt: characteristic function implemented only for alpha=3"
        )

    def log_cf(self, t):
        if not self.is_cubic:
            self._no_cf()
        a = math.sqrt(3.0) * self.scale * np.abs(np.asarray(t, dtype=float))
        return np.log1p(a) - a + 0j

    def cf_envelope(self, t):
        if not self.is_cubic:
            self._no_cf()
        a = math.sqrt(3.0) * self.scale * abs(t)
        return 0.0, (1.0 + a) * math.exp(-a)

    def kernel_params(self):
        return K_STUDENT, _pack(self.alpha, self.scale)


@dataclass(frozen=True)
class Pareto(_Family):
    """One-tailed Pareto with survival ``(xmin/x)**alpha`` on ``[xmin, inf)``."""

    alpha: float
    xmin: float = 1.0
    family: ClassVar[str] = "pareto"

    def __post_init__(self):
        _require(_finite(self.alpha, self.xmin), "pareto: parameters must be finite")
        _require(self.alpha > 1, "pareto: alpha must be > 1 for a finite mean")
        _require(self.xmin > 0, "pareto: xmin must be > 0")

    @property
    def tail_exponent(self) -> float:
        return float(self.alpha)

    def support(self):
        return (float(self.xmin), math.inf)

    def mean(self) -> float:
        return self.alpha * self.xmin / (self.alpha - 1)

    def mad1(self) -> float:
        a = self.alpha
        return 2.0 * self.xmin * (a - 1) ** (a - 2) * a ** (1 - a)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        a, lo = self.alpha, self.xmin
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x >= lo, a * lo**a / np.where(x > 0, x, 1.0) ** (a + 1), 0.0)
        return out

    def lower_partial_moment(self, u):
        a, lo = self.alpha, self.xmin
        u = np.asarray(u, dtype=float)
        uu = np.maximum(u, lo)
        val = (uu - lo) - lo**a * (uu ** (1 - a) - lo ** (1 - a)) / (1 - a)
        return np.where(u > lo, val, 0.0)

    def scale_hint(self) -> float:
        return self.xmin

    def kernel_params(self):
        return K_PARETO, _pack(self.alpha, self.xmin)


@dataclass(frozen=True)
class Gamma(_Family):
    shape: float
    rate: float = 1.0
    family: ClassVar[str] = "gamma"
    has_cf: ClassVar[bool] = True
    slow_cf: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.shape, self.rate), "gamma: parameters must be finite")
        _require(self.shape > 0, "gamma: shape must be > 0")
        _require(self.rate > 0, "gamma: rate must be > 0")

    @property
    def _k(self) -> float:
        return float(self.shape)

    @property
    def _lam(self) -> float:
        return float(self.rate)

    def support(self):
        return (0.0, math.inf)

    def mean(self) -> float:
        return self._k / self._lam

    def mad_sum(self, n: int) -> float:
        """Exact ``M(n)``: the n-fold sum is Gamma(n*shape, rate)."""
        a = n * self._k
        return math.exp(math.log(2.0) + a * math.log(a) - a - math.lgamma(a)) / self._lam

    def mad1(self) -> float:
        return self.mad_sum(1)

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        k, lam = self._k, self._lam
        with np.errstate(divide="ignore", invalid="ignore"):
            logp = k * math.log(lam) + (k - 1) * np.log(np.where(x > 0, x, 1.0)) - lam * x - math.lgamma(k)
        return np.where(x > 0, np.exp(logp), 0.0)

    def lower_partial_moment(self, u):
        k, lam = self._k, self._lam
        u = np.asarray(u, dtype=float)
        uu = np.maximum(u, 0.0)
        val = uu * special.gammainc(k, lam * uu) - (k / lam) * special.gammainc(k + 1, lam * uu)
        return np.where(u > 0, val, 0.0)

    def log_cf(self, t):
        t = np.asarray(t, dtype=float)
        return -self._k * np.log(1.0 - 1j * t / self._lam)

    def cf_envelope(self, t):
        return 0.0, (1.0 + (t / self._lam) ** 2) ** (-0.5 * self._k)

    def kernel_params(self):
        return K_GAMMA, _pack(self._k, self._lam)


@dataclass(frozen=True)
class Exponential(Gamma):
    """Exponential with rate ``lam`` (JSON / CLI key ``lambda``)."""

    shape: float = field(default=1.0, init=False, repr=False)
    rate: float = field(default=1.0, init=False, repr=False)
    lam: float = 1.0
    family: ClassVar[str] = "exponential"

    def __post_init__(self):
        _require(math.isfinite(self.lam) and self.lam > 0, "exponential: lambda must be > 0")
        object.__setattr__(self, "rate", float(self.lam))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x >= 0, self.lam * np.exp(-self.lam * np.maximum(x, 0.0)), 0.0)

    def lower_partial_moment(self, u):
        u = np.asarray(u, dtype=float)
        uu = np.maximum(u, 0.0)
        return np.where(u > 0, uu + np.expm1(-self.lam * uu) / self.lam, 0.0)

    def kernel_params(self):
        return K_EXPONENTIAL, _pack(self.lam)


@dataclass(frozen=True)
class Lognormal(_Family):
    mu: float = 0.0
    sigma: float = 1.0
    family: ClassVar[str] = "lognormal"

    def __post_init__(self):
        _require(_finite(self.mu, self.sigma), "lognormal: parameters must be finite")
        _require(self.sigma > 0, "lognormal: sigma must be > 0")

    def support(self):
        return (0.0, math.inf)

    def mean(self) -> float:
        return math.exp(self.mu + 0.5 * self.sigma**2)

    def mad1(self) -> float:
        return 2.0 * self.mean() * math.erf(self.sigma / (2.0 * SQRT2))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            lx = np.log(np.where(x > 0, x, 1.0))
            z = (lx - self.mu) / self.sigma
            dens = np.exp(-0.5 * z * z - lx) / (self.sigma * math.sqrt(2 * math.pi))
        return np.where(x > 0, dens, 0.0)

    def lower_partial_moment(self, u):
        u = np.asarray(u, dtype=float)
        with np.errstate(divide="ignore"):
            d = (np.log(np.where(u > 0, u, 1.0)) - self.mu) / self.sigma
        val = u * special.ndtr(d) - self.mean() * special.ndtr(d - self.sigma)
        return np.where(u > 0, val, 0.0)

    def scale_hint(self) -> float:
        return math.exp(self.mu) * min(1.0, self.sigma)

    def kernel_params(self):
        return K_LOGNORMAL, _pack(self.mu, self.sigma)


@dataclass(frozen=True)
class Stable(_Family):
    """Stable law with CF ``exp(i mu t - |sigma t|^a (1 - i beta tan(pi a/2) sgn t))``."""

    alpha_tilde: float
    beta: float = 0.0
    mu: float = 0.0
    sigma: float = 1.0
    family: ClassVar[str] = "stable"
    has_cf: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.alpha_tilde, self.beta, self.mu, self.sigma),
                 "stable: parameters must be finite")
        _require(1.0 < self.alpha_tilde <= 2.0, "stable: alpha_tilde must lie in (1, 2]")
        _require(-1.0 <= self.beta <= 1.0, "stable: beta must lie in [-1, 1]")
        _require(self.sigma > 0, "stable: sigma must be > 0")

    @property
    def symmetric(self) -> bool:
        return self.beta == 0.0 or self.alpha_tilde == 2.0

    @property
    def tail_exponent(self) -> float:
        return math.inf if self.alpha_tilde == 2.0 else float(self.alpha_tilde)

    @property
    def _skew(self) -> float:
        return self.beta * math.tan(0.5 * math.pi * self.alpha_tilde)

    def mean(self) -> float:
        return float(self.mu)

    def mad1(self) -> float:
        a = self.alpha_tilde
        k = self._skew
        return (
            2.0 * self.sigma / math.pi * math.gamma(1.0 - 1.0 / a)
            * (1.0 + k * k) ** (0.5 / a) * math.cos(math.atan(k) / a)
        )

    def pdf(self, x):
        raise CapabilityError("stable: density is not implemented")

    def log_cf(self, t):
        t = np.asarray(t, dtype=float)
        return 1j * self.mu * t + self.log_cf_centered(t)

    def log_cf_centered(self, t):
        t = np.asarray(t, dtype=float)
        p = np.abs(self.sigma * t) ** self.alpha_tilde
        return -p + 1j * p * self._skew * np.sign(t)

    def cf_envelope(self, t):
        return 0.0, math.exp(-abs(self.sigma * t) ** self.alpha_tilde)

    def kernel_params(self):
        return K_STABLE, _pack(self.alpha_tilde, self.beta, self.mu, self.sigma)


@dataclass(frozen=True)
class GaussianVarianceMix(_Family):
    """Centred Gaussian with variance ``sigma2 + a`` w.p. ``p``, else ``sigma2 - a p/(1-p)``."""

    sigma2: float
    a: float
    p: float
    family: ClassVar[str] = "varmix"
    has_cf: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.sigma2, self.a, self.p), "varmix: parameters must be finite")
        _require(self.sigma2 > 0, "varmix: sigma2 must be > 0")
        _require(self.a >= 0, "varmix: a must be >= 0")
        _require(0 < self.p < 1, "varmix: p must lie in (0, 1)")
        raw = self.sigma2 - self.a * self.p / (1.0 - self.p)
        _require(raw >= -1e-12 * self.sigma2,
                 "varmix: low-regime variance sigma2 - a p/(1-p) is negative")

    @property
    def v1(self) -> float:
        return self.sigma2 + self.a

    @property
    def v2(self) -> float:
        raw = self.sigma2 - self.a * self.p / (1.0 - self.p)
        # Round-off at the boundary a = sigma2 (1-p)/p collapses to a point mass.
        return raw if raw > 1e-15 * self.sigma2 else 0.0

    @property
    def symmetric(self) -> bool:
        return True

    def mean(self) -> float:
        return 0.0

    def mad1(self) -> float:
        return SQRT_2_OVER_PI * (self.p * math.sqrt(self.v1) + (1 - self.p) * math.sqrt(self.v2))

    def pdf(self, x):
        x = np.asarray(x, dtype=float)
        out = self.p * Gaussian(0.0, math.sqrt(self.v1)).pdf(x)
        if self.v2 > 0:
            out = out + (1 - self.p) * Gaussian(0.0, math.sqrt(self.v2)).pdf(x)
        return out

    def lower_partial_moment(self, u):
        u = np.asarray(u, dtype=float)
        out = self.p * _gauss_lower_partial(u, 0.0, math.sqrt(self.v1))
        if self.v2 > 0:
            return out + (1 - self.p) * _gauss_lower_partial(u, 0.0, math.sqrt(self.v2))
        return out + (1 - self.p) * np.maximum(u, 0.0)

    def scale_hint(self) -> float:
        return math.sqrt(self.sigma2)

    def log_cf(self, t):
        t2 = np.asarray(t, dtype=float) ** 2
        w = self.p * np.expm1(-0.5 * self.v1 * t2) + (1 - self.p) * np.expm1(-0.5 * self.v2 * t2)
        with np.errstate(divide="ignore"):
            return np.log1p(w) + 0j

    def cf_envelope(self, t):
        t2 = t * t
        if self.v2 == 0.0:
            return 1.0 - self.p, self.p * math.exp(-0.5 * self.v1 * t2)
        return 0.0, self.p * math.exp(-0.5 * self.v1 * t2) + (1 - self.p) * math.exp(-0.5 * self.v2 * t2)

    def kernel_params(self):
        return K_VARMIX, _pack(self.p, math.sqrt(self.v1), math.sqrt(self.v2))


@dataclass(frozen=True)
class GaussianMeanMix(_Family):
    """``N(mu1, sigma1^2)`` w.p. ``p``, else ``N(mu2, sigma2^2)``."""

    mu1: float
    mu2: float
    sigma1: float
    sigma2: float
    p: float = 0.5
    family: ClassVar[str] = "meanmix"
    has_cf: ClassVar[bool] = True

    def __post_init__(self):
        _require(_finite(self.mu1, self.mu2, self.sigma1, self.sigma2, self.p),
                 "meanmix: parameters must be finite")
        _require(self.sigma1 > 0 and self.sigma2 > 0, "meanmix: sigmas must be > 0")
        _require(0 < self.p < 1, "meanmix: p must lie in (0, 1)")

    @property
    def symmetric(self) -> bool:
        if self.mu1 == self.mu2:
            return True
        return self.p == 0.5 and self.sigma1 == self.sigma2

    def mean(self) -> float:
        return self.p * self.mu1 + (1 - self.p) * self.mu2

    def mad1(self) -> float:
        return float(self.mad_about(self.mean()))

    def mad_about(self, u):
        u = np.asarray(u, dtype=float)
        return (self.p * _gauss_abs(self.mu1 - u, self.sigma1)
                + (1 - self.p) * _gauss_abs(self.mu2 - u, self.sigma2))

    def lower_partial_moment(self, u):
        return (self.p * _gauss_lower_partial(u, self.mu1, self.sigma1)
                + (1 - self.p) * _gauss_lower_partial(u, self.mu2, self.sigma2))

    def pdf(self, x):
        return (self.p * Gaussian(self.mu1, self.sigma1).pdf(x)
                + (1 - self.p) * Gaussian(self.mu2, self.sigma2).pdf(x))

    def scale_hint(self) -> float:
        return min(self.sigma1, self.sigma2)

    def log_cf(self, t):
        return self.mean() * 1j * np.asarray(t, dtype=float) + self.log_cf_centered(t)

    def log_cf_centered(self, t):
        t = np.asarray(t, dtype=float)
        m = self.mean()
        w = (self.p * _cexpm1(1j * (self.mu1 - m) * t - 0.5 * (self.sigma1 * t) ** 2)
             + (1 - self.p) * _cexpm1(1j * (self.mu2 - m) * t - 0.5 * (self.sigma2 * t) ** 2))
        return _clog1p(w)

    def cf_envelope(self, t):
        return 0.0, (self.p * math.exp(-0.5 * (self.sigma1 * t) ** 2)
                     + (1 - self.p) * math.exp(-0.5 * (self.sigma2 * t) ** 2))

    def kernel_params(self):
        return K_MEANMIX, _pack(self.p, self.mu1, self.sigma1, self.mu2, self.sigma2)


@dataclass(frozen=True)
class Affine(_Family):
    """``shift + scale * base`` for any catalog family."""

    base: "DistributionSpec"
    scale: float = 1.0
    shift: float = 0.0
    family: ClassVar[str] = "affine"

    def __post_init__(self):
        _require(_finite(self.scale, self.shift), "affine: parameters must be finite")
        _require(self.scale != 0, "affine: scale must be nonzero")
        _require(isinstance(self.base, _Family), "affine: base must be a distribution")

    @property
    def has_cf(self) -> bool:  # type: ignore[override]
        return bool(self.base.has_cf)

    @property
    def slow_cf(self) -> bool:  # type: ignore[override]
        return bool(self.base.slow_cf)

    @property
    def symmetric(self) -> bool:
        return self.base.symmetric

    @property
    def tail_exponent(self) -> float:
        return self.base.tail_exponent

    @property
    def basin_index(self) -> float:
        return self.base.basin_index

    def support(self):
        lo, hi = self.base.support()
        ends = sorted((self.shift + self.scale * lo, self.shift + self.scale * hi))
        return (ends[0], ends[1])

    def mean(self) -> float:
        return self.shift + self.scale * self.base.mean()

    def mad1(self) -> float:
        return abs(self.scale) * self.base.mad1()

    def mad_sum(self, n: int) -> float:
        return abs(self.scale) * self.base.mad_sum(n)  # type: ignore[attr-defined]

    def pdf(self, x):
        z = (np.asarray(x, dtype=float) - self.shift) / self.scale
        return self.base.pdf(z) / abs(self.scale)

    def mad_about(self, u):
        z = (np.asarray(u, dtype=float) - self.shift) / self.scale
        return abs(self.scale) * self.base.mad_about(z)

    def lower_partial_moment(self, u):
        u = np.asarray(u, dtype=float)
        return 0.5 * (self.mad_about(u) - (self.mean() - u))

    def scale_hint(self) -> float:
        return abs(self.scale) * self.base.scale_hint()

    def log_cf(self, t):
        t = np.asarray(t, dtype=float)
        return 1j * self.shift * t + self.base.log_cf(self.scale * t)

    def log_cf_centered(self, t):
        return self.base.log_cf_centered(self.scale * np.asarray(t, dtype=float))

    def cf_envelope(self, t):
        return self.base.cf_envelope(abs(self.scale) * t)

    def kernel_params(self):
        code, p = self.base.kernel_params()
        p = p.copy()
        p[7] = self.shift + self.scale * p[7]
        p[6] = self.scale * p[6]
        return code, p


DistributionSpec = Union[
    Gaussian, StudentT, Pareto, Exponential, Gamma, Lognormal, Stable,
    GaussianVarianceMix, GaussianMeanMix, Affine,
]

FAMILIES: dict[str, type] = {
    "gaussian": Gaussian,
    "studentt": StudentT,
    "pareto": Pareto,
    "exponential": Exponential,
    "gamma": Gamma,
    "lognormal": Lognormal,
    "stable": Stable,
    "varmix": GaussianVarianceMix,
    "meanmix": GaussianMeanMix,
    "affine": Affine,
}

_FAMILY_ALIASES = {
    "normal": "gaussian",
    "student": "studentt",
    "t": "studentt",
    "exp": "exponential",
    "gaussianvariancemix": "varmix",
    "gaussianmeanmix": "meanmix",
}

# JSON/CLI key -> dataclass field, per family.
_KEY_ALIASES = {
    "exponential": {"lambda": "lam", "rate": "lam"},
    "stable": {"alpha": "alpha_tilde"},
    "studentt": {"nu": "alpha", "df": "alpha"},
}


def _init_fields(cls: type) -> list[str]:
    return [f.name for f in fields(cls) if f.init]


def _params_to_json(spec: _Family) -> dict[str, Any]:
    if isinstance(spec, Affine):
        return {"base": spec.base.to_dict(), "scale": spec.scale, "shift": spec.shift}
    out = {}
    rev = {"lam": "lambda"} if spec.family == "exponential" else {}
    for name in _init_fields(type(spec)):
        out[rev.get(name, name)] = float(getattr(spec, name))
    return out


def _resolve_family(name: str) -> str:
    key = name.strip().lower().replace("_", "").replace("-", "")
    key = _FAMILY_ALIASES.get(key, key)
    if key not in FAMILIES:
        raise ConfigError(f"unknown distribution family {name!r}")
    return key


def from_dict(obj: dict[str, Any]) -> DistributionSpec:
    """Build a spec from ``{"family": ..., "params": {...}}``."""
    if not isinstance(obj, dict) or "family" not in obj:
        raise ConfigError("distribution JSON needs a 'family' key")
    fam = _resolve_family(str(obj["family"]))
    params = dict(obj.get("params", {}) or {})
    cls = FAMILIES[fam]
    if fam == "affine":
        base = from_dict(params.pop("base"))
        return Affine(base, **{k: float(v) for k, v in params.items()})
    aliases = _KEY_ALIASES.get(fam, {})
    allowed = _init_fields(cls)
    kwargs = {}
    for key, val in params.items():
        name = aliases.get(key, key)
        if name not in allowed:
            raise ConfigError(f"{fam}: unknown parameter {key!r} (expected one of {allowed})")
        try:
            kwargs[name] = float(val)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{fam}: parameter {key!r} is not numeric") from exc
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"{fam}: {exc}") from exc


def from_json(text: str) -> DistributionSpec:
    return from_dict(json.loads(text))


def parse_spec(text: str) -> DistributionSpec:
    """Parse ``family:key=val,key=val`` (parameters optional) or a JSON object."""
    text = text.strip()
    if text.startswith("{"):
        return from_json(text)
    fam, _, rest = text.partition(":")
    params: dict[str, str] = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise ConfigError(f"malformed spec parameter {item!r}; expected key=value")
        params[key.strip()] = val.strip()
    return from_dict({"family": fam, "params": params})


# --- module-level operations -------------------------------------------------

def mean(spec: DistributionSpec) -> float:
    return spec.mean()


def mad1(spec: DistributionSpec) -> float:
    return spec.mad1()


def pdf(spec: DistributionSpec, x):
    out = spec.pdf(x)
    return float(out) if np.ndim(out) == 0 else out


def cf(spec: DistributionSpec, t):
    return spec.cf(t)


def sample(spec: DistributionSpec, count: int, seed: int, stream: int = 0) -> np.ndarray:
    """Draw ``count`` i.i.d. values, deterministic for a given ``(seed, stream)``."""
    from . import backend
    from .rng import bit_generator

    if int(count) < 1:
        raise ParameterDomainError("count must be >= 1")
    code, params = spec.kernel_params()
    return backend.fill_draws(bit_generator(seed, stream), code, params, int(count))


__all__ = [
    "Affine", "DistributionSpec", "Exponential", "FAMILIES", "Gamma", "Gaussian",
    "GaussianMeanMix", "GaussianVarianceMix", "Lognormal", "Pareto", "Stable",
    "StudentT", "cf", "from_dict", "from_json", "mad1", "mean", "parse_spec",
    "pdf", "sample",
]
