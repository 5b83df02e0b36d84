"""Mean absolute deviation of i.i.d. sums, ``M(n) = E|S_n - E S_n|``.

Four evaluation routes are available:

* closed forms (Gaussian, stable, Student t with 3 degrees of freedom or
  ``n = 2``, exponential and gamma, every family at ``n = 1``);
* characteristic-function quadrature,
  ``E|Y| = (2/pi) int_0^inf (1 - Re chi_Y(t)) / t^2 dt`` with
  ``chi_Y = exp(n log chi_{X - EX})``, valid for any finite-mean law;
* one-dimensional convolution quadrature at ``n = 2`` using the closed-form
  ``E|X - u|`` of the catalog families;
* Monte Carlo with batch means, optionally with the control variate
  ``sum_j |X_j - EX|`` whose expectation ``n M(1)`` is known exactly.
"""

from __future__ import annotations

import enum
import json
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Any, Iterable, Sequence

import numpy as np
from scipy import integrate

from . import backend
from .distributions import (
    Affine, DistributionSpec, Exponential, Gamma, Gaussian, Stable, StudentT,
)
from .errors import CapabilityError, ConfigError, DomainError, FallbackRequired, NumericError
from .rng import bit_generator

# Robust scale factor turning a median absolute deviation into a Gaussian sigma.
MAD_TO_SIGMA = 1.4826022185056018
MIN_ROBUST_BATCHES = 31


class Method(str, enum.Enum):
    CLOSED_FORM = "closed_form"
    CF_QUADRATURE = "cf_quadrature"
    CONVOLUTION = "convolution_quadrature"
    MONTE_CARLO = "monte_carlo"

    def __str__(self) -> str:
        return self.value


EXACT_METHODS = (Method.CLOSED_FORM, Method.CF_QUADRATURE, Method.CONVOLUTION)


@dataclass(frozen=True)
class MadEstimate:
    """A value of ``M(n)`` with provenance.

    ``std_error`` is zero for deterministic methods; their numerical
    tolerance is kept in ``metadata["abs_error"]``.
    """

    value: float
    n: int
    method: Method
    std_error: float = 0.0
    samples_used: int = 0
    seed: int | None = None
    heavy_tail: bool = False
    metadata: dict[str, Any] = field(default_factory=dict, compare=False)

    def to_dict(self) -> dict[str, Any]:
        out = asdict(self)
        out["method"] = self.method.value
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    Attributes
    ----------
    samples : int
        Total replicates of ``S_n``, split evenly over ``batches``.
    batches : int
        Batch count for the batch-means error; batch ``b`` reads stream ``b``.
    seed : int
        Root seed. Equal seeds give common random numbers across specs.
    antithetic : bool
        Pair each replicate with its reflected-uniform partner. Only allowed
        for symmetric families.
    estimator : {"auto", "plain", "control_variate"}
        ``auto`` uses the control variate when the tail exponent is below 4
        and otherwise keeps, per checkpoint, whichever estimator shows the
        smaller batch-means error.
    threads : int
        Worker threads over batches; results do not depend on it.
    """

    samples: int = 1_000_000
    batches: int = 32
    seed: int = 0
    antithetic: bool = False
    estimator: str = "auto"
    threads: int = 1

    def __post_init__(self):
        if int(self.samples) < 1 or int(self.batches) < 1:
            raise ConfigError("samples and batches must be positive")
        if self.batches < 16:
            raise ConfigError("batches must be >= 16")
        if self.samples % self.batches:
            raise ConfigError("samples must be divisible by batches")
        if self.antithetic and (self.samples // self.batches) % 2:
            raise ConfigError("antithetic sampling needs an even number of samples per batch")
        if self.estimator not in ("auto", "plain", "control_variate"):
            raise ConfigError(f"unknown estimator {self.estimator!r}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")
        if not 0 <= int(self.seed) < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")

    @property
    def per_batch(self) -> int:
        return self.samples // self.batches


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-10
    max_subdivisions: int = 200

    def __post_init__(self):
        if not 0 < self.rel_tol < 1:
            raise ConfigError("rel_tol must lie in (0, 1)")
        if self.max_subdivisions < 10:
            raise ConfigError("max_subdivisions must be >= 10")


DEFAULT_QUAD = QuadratureConfig()
# Largest relative error accepted from the deterministic quadratures.
REPORTED_TOL = 1e-8


def _check_n(n: int) -> int:
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return int(n)


# --- closed forms ----------------------------------------------------------------

def student_mad_ratio_2(alpha: float) -> float:
    """``M(2)/M(1)`` for the Student t: ``2^(2-a) sqrt(pi) Gamma(a - 1/2) / Gamma(a/2)^2``."""
    return math.exp((2 - alpha) * math.log(2.0) + 0.5 * math.log(math.pi)
                    + math.lgamma(alpha - 0.5) - 2 * math.lgamma(0.5 * alpha))


def has_closed_form(spec: DistributionSpec, n: int) -> bool:
    try:
        closed_form_value(spec, n)
    except FallbackRequired:
        return False
    return True


def closed_form_value(spec: DistributionSpec, n: int) -> float:
    """Exact ``M(n)``; raises :class:`FallbackRequired` when none is known."""
    n = _check_n(n)
    if isinstance(spec, Affine):
        return abs(spec.scale) * closed_form_value(spec.base, n)
    if n == 1:
        return spec.mad1()
    if isinstance(spec, Gaussian):
        return spec.sigma * math.sqrt(2.0 * n / math.pi)
    if isinstance(spec, Stable):
        return n ** (1.0 / spec.alpha_tilde) * spec.mad1()
    if isinstance(spec, Gamma):  # includes Exponential
        return spec.mad_sum(n)
    if isinstance(spec, StudentT):
        if spec.is_cubic:
            from .analytic.cubic import cubic_mad
            return spec.scale * cubic_mad(n)
        if n == 2:
            return spec.mad1() * student_mad_ratio_2(spec.alpha)
    raise FallbackRequired(f"no closed form for M({n}) of {spec.label()}")


def mad_closed_form(spec: DistributionSpec, n: int) -> MadEstimate:
    n = _check_n(n)
    return MadEstimate(closed_form_value(spec, n), n, Method.CLOSED_FORM,
                       heavy_tail=spec.heavy_tail)


# --- characteristic-function quadrature ---------------------------------------------

def _cf_integrand(spec: DistributionSpec, n: int):
    def g(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            L = n * spec.log_cf_centered(t)
            re = np.real(L)
            h = np.sin(0.5 * np.imag(L))
            val = -np.expm1(re) + 2.0 * np.exp(re) * h * h
        return val / (t * t)
    return lambda t: float(g(t))


def _slow_cf_split(spec: DistributionSpec) -> tuple[Gamma, float, float]:
    """For (affine) gamma laws: base law, scale and centring offset."""
    if isinstance(spec, Gamma):
        return spec, 1.0, spec.mean()
    if isinstance(spec, Affine):
        base, a, _ = _slow_cf_split(spec.base)
        return base, a * spec.scale, a * spec.scale * base.mean()
    raise CapabilityError(f"{spec.family}: no oscillatory tail decomposition")


def _slow_tail(spec: DistributionSpec, n: int, T: float, quad: QuadratureConfig,
               epsabs: float) -> tuple[float, float]:
    """``int_T^inf Re chi_Y(t) / t^2 dt`` by Fourier-weighted quadrature.

    ``chi_Y(t) = chi_B(a t)^n exp(-i w t)`` with ``w = n a E[B]``; the smooth
    factor is integrated against ``cos(w t)`` and ``sin(w t)``.
    """
    base, a, off = _slow_cf_split(spec)
    w = n * off

    def smooth(t):
        return np.exp(n * base.log_cf(a * t))

    re_part = lambda t: float(np.real(smooth(t))) / (t * t)
    im_part = lambda t: float(np.imag(smooth(t))) / (t * t)
    limit = quad.max_subdivisions
    if w == 0.0:
        v, e = integrate.quad(re_part, T, np.inf, limit=limit, epsabs=epsabs)
        return v, e
    aw = abs(w)
    sgn = 1.0 if w > 0 else -1.0
    c, ec = integrate.quad(re_part, T, np.inf, weight="cos", wvar=aw, limlst=100,
                           limit=limit, epsabs=0.5 * epsabs)
    s, es = integrate.quad(im_part, T, np.inf, weight="sin", wvar=aw, limlst=100,
                           limit=limit, epsabs=0.5 * epsabs)
    # Re(z e^{-iwt}) = Re z cos(wt) + Im z sin(wt)
    return c + sgn * s, ec + es


def mad_from_cf(spec: DistributionSpec, n: int, quad: QuadratureConfig | None = None) -> MadEstimate:
    """``M(n)`` by quadrature of the characteristic function.

    The integral over ``[0, T]`` is split into geometric panels. Beyond ``T``
    the ``1/t^2`` part is added exactly and the CF part is bounded by the
    family envelope, ``T`` being chosen so that bound stays below half the
    tolerance. Slowly decaying gamma-type CFs use Fourier-weighted (QAWF)
    quadrature for the tail instead.
    """
    n = _check_n(n)
    quad = quad or DEFAULT_QUAD
    if not spec.has_cf:
        raise CapabilityError(f"{spec.family}: characteristic function not available")
    g = _cf_integrand(spec, n)
    floor = spec.mad1()  # M(n) >= M(1) bounds the absolute tolerance
    tol_abs = quad.rel_tol * floor * (math.pi / 2)
    width = spec.scale_hint()

    slow = bool(spec.slow_cf)
    if slow:
        T = 50.0 / width
    else:
        T = 1.0 / width
        for _ in range(200):
            atom, r = spec.cf_envelope(T)
            if (atom + r) ** n - atom**n <= 0.25 * tol_abs * T:
                break
            T *= 1.5
        else:
            raise NumericError(f"characteristic function of {spec.label()} decays too slowly")
    atom, _ = spec.cf_envelope(T)

    # Geometric panels from T downwards; the last panel reaches 0.
    edges = [T]
    while edges[-1] > 1e-3 / width and len(edges) < 60:
        edges.append(edges[-1] / 4.0)
    edges.append(0.0)
    head = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for hi, lo in zip(edges[:-1], edges[1:]):
                v, e = integrate.quad(g, lo, hi, epsabs=0.1 * tol_abs / len(edges),
                                      epsrel=0.1 * quad.rel_tol, limit=quad.max_subdivisions)
                head += v
                err += e
            if slow:
                tv, te = _slow_tail(spec, n, T, quad, 0.1 * tol_abs)
                tail = (1.0 - atom**n) / T - tv
                err += te
            else:
                r = spec.cf_envelope(T)[1]
                tail = (1.0 - atom**n) / T
                err += ((atom + r) ** n - atom**n) / T
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"CF quadrature failed for {spec.label()}, n={n}: {exc}") from exc
    value = 2.0 / math.pi * (head + tail)
    abs_err = 2.0 / math.pi * err
    if not math.isfinite(value) or value <= 0:
        raise NumericError(f"CF quadrature produced {value} for {spec.label()}, n={n}")
    rel = abs_err / value
    if rel > max(REPORTED_TOL, quad.rel_tol):
        raise NumericError(
            f"CF quadrature error {rel:.2e} exceeds tolerance for {spec.label()}, n={n}")
    return MadEstimate(value, n, Method.CF_QUADRATURE, heavy_tail=spec.heavy_tail,
                       metadata={"abs_error": abs_err, "rel_error": rel, "truncation": T})


# --- two-summand convolution -------------------------------------------------------

def mad_convolution(spec: DistributionSpec, n: int = 2, quad: QuadratureConfig | None = None) -> MadEstimate:
    """``M(2) = M(1) + int f(x) (E|X - (2m - x)| - |x - m|) dx``.

    The bracket vanishes wherever ``2m - x`` lies below the support, so for
    one-sided laws the integral has finite range; breakpoints sit at the
    kinks ``m`` and ``2m - lo`` and at the support edge.
    """
    n = _check_n(n)
    quad = quad or DEFAULT_QUAD
    if n == 1:
        return replace(mad_closed_form(spec, 1), method=Method.CONVOLUTION)
    if n != 2:
        raise CapabilityError("convolution quadrature is implemented for n = 2 only")
    m = spec.mean()
    m1 = spec.mad1()
    lo, hi = spec.support()
    s = spec.scale_hint()

    def h(x):
        return float(spec.pdf(x) * (spec.mad_about(2.0 * m - x) - abs(x - m)))

    if math.isfinite(lo):
        # One-sided support: the bracket is zero for x > 2m - lo.
        span = m - lo
        pts = {lo, m, 2.0 * m - lo, 1.5 * m - 0.5 * lo}
        pts.update(lo + span * 2.0**-k for k in range(1, 40))
        grid = sorted(pts)
    else:
        pts = {m}
        pts.update(m + sgn * s * 2.0**k for k in range(-2, 40) for sgn in (-1.0, 1.0))
        grid = [-np.inf] + sorted(pts) + [np.inf]
    total = 0.0
    err = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            for a, b in zip(grid[:-1], grid[1:]):
                if a == b:
                    continue
                v, e = integrate.quad(h, a, b, epsabs=1e-3 * quad.rel_tol * m1,
                                      epsrel=quad.rel_tol, limit=quad.max_subdivisions)
                total += v
                err += e
        except integrate.IntegrationWarning as exc:
            raise NumericError(f"convolution quadrature failed for {spec.label()}: {exc}") from exc
    value = m1 + total
    rel = err / value
    if not math.isfinite(value) or rel > max(REPORTED_TOL, quad.rel_tol):
        raise NumericError(f"convolution quadrature error {rel:.2e} for {spec.label()}")
    return MadEstimate(value, 2, Method.CONVOLUTION, heavy_tail=spec.heavy_tail,
                       metadata={"abs_error": err, "rel_error": rel})


def has_convolution(spec: DistributionSpec) -> bool:
    try:
        spec.lower_partial_moment(np.array([spec.mean()]))
        spec.pdf(spec.mean())
    except (FallbackRequired, CapabilityError):
        return False
    return True


# --- Monte Carlo --------------------------------------------------------------------

@dataclass(frozen=True)
class McRun:
    """Per-batch replicate means at each checkpoint."""

    checkpoints: np.ndarray
    plain: np.ndarray  # (batches, checkpoints)
    cv: np.ndarray     # (batches, checkpoints), residual part only
    mad1: float
    config: McConfig
    backend: str

    def batch_values(self, estimator: str) -> np.ndarray:
        if estimator == "plain":
            return self.plain
        return self.checkpoints[None, :] * self.mad1 + self.cv


def _run_batch(spec: DistributionSpec, code: int, params: np.ndarray, center: float,
               checkpoints: np.ndarray, config: McConfig, b: int) -> tuple[np.ndarray, np.ndarray]:
    k = checkpoints.size
    plain = np.zeros(k)
    cv = np.zeros(k)
    backend.mc_accumulate(bit_generator(config.seed, b), code, params, center,
                          config.per_batch, checkpoints, config.antithetic, plain, cv)
    return plain / config.per_batch, cv / config.per_batch


def mc_run(spec: DistributionSpec, checkpoints: Iterable[int], config: McConfig) -> McRun:
    """Simulate ``config.samples`` replicates of the partial sums up to the largest checkpoint."""
    cps = np.array(sorted({_check_n(c) for c in checkpoints}), dtype=np.int64)
    if cps.size == 0:
        raise DomainError("at least one checkpoint is required")
    if config.antithetic and not spec.symmetric:
        raise ConfigError("antithetic sampling is only offered for symmetric families")
    code, params = spec.kernel_params()
    center = spec.mean()
    work = lambda b: _run_batch(spec, code, params, center, cps, config, b)
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(work, range(config.batches)))
    else:
        results = [work(b) for b in range(config.batches)]
    plain = np.array([r[0] for r in results])
    cv = np.array([r[1] for r in results])
    return McRun(cps, plain, cv, spec.mad1(), config, backend.name)


def batch_std_error(values: np.ndarray, robust: bool) -> float:
    """Standard error of the mean from batch means (robust: MAD-scaled spread)."""
    values = np.asarray(values, dtype=float)
    b = values.size
    if robust:
        spread = MAD_TO_SIGMA * np.median(np.abs(values - np.median(values)))
    else:
        spread = np.std(values, ddof=1)
    return float(spread / math.sqrt(b))


def choose_estimator(spec: DistributionSpec, run: McRun, j: int) -> str:
    est = run.config.estimator
    if est != "auto":
        return est
    if spec.tail_exponent < 4:
        return "control_variate"
    se_plain = batch_std_error(run.plain[:, j], False)
    se_cv = batch_std_error(run.batch_values("control_variate")[:, j], False)
    return "control_variate" if se_cv < se_plain else "plain"


def estimates_from_run(spec: DistributionSpec, run: McRun) -> list[MadEstimate]:
    out = []
    for j, k in enumerate(run.checkpoints):
        est = choose_estimator(spec, run, j)
        vals = run.batch_values(est)[:, j]
        # Plain estimator with infinite-variance |S_n|: robust spread of batch means.
        robust = est == "plain" and spec.heavy_tail
        meta = {"estimator": est, "batches": run.config.batches, "backend": run.backend,
                "se_method": "robust_batch_means" if robust else "batch_means"}
        if robust and run.config.batches < MIN_ROBUST_BATCHES:
            meta["warning"] = f"robust error bar needs >= {MIN_ROBUST_BATCHES} batches"
        out.append(MadEstimate(
            value=float(np.mean(vals)), n=int(k), method=Method.MONTE_CARLO,
            std_error=batch_std_error(vals, robust), samples_used=run.config.samples,
            seed=int(run.config.seed), heavy_tail=spec.heavy_tail, metadata=meta,
        ))
    return out


def mad_monte_carlo(spec: DistributionSpec, n: int, config: McConfig) -> MadEstimate:
    """Batch-means Monte Carlo estimate centred at the exact mean ``n E X``."""
    n = _check_n(n)
    if config is None:
        raise ConfigError("Monte Carlo needs an McConfig")
    return estimates_from_run(spec, mc_run(spec, [n], config))[0]


def mad_monte_carlo_multi(spec: DistributionSpec, ns: Sequence[int], config: McConfig) -> dict[int, MadEstimate]:
    """Estimates at several ``n`` from the same replicates (common random numbers)."""
    run = mc_run(spec, ns, config)
    return {e.n: e for e in estimates_from_run(spec, run)}


# --- dispatcher -----------------------------------------------------------------------

PREFERENCES = ("auto", "closed_form", "cf", "convolution", "mc")


def resolve_method(spec: DistributionSpec, n: int, preference: str = "auto") -> Method:
    """Method that :func:`mad` would use for ``(spec, n, preference)``."""
    if preference not in PREFERENCES:
        raise ConfigError(f"unknown method preference {preference!r}")
    if preference == "closed_form":
        return Method.CLOSED_FORM
    if preference == "cf":
        return Method.CF_QUADRATURE
    if preference == "convolution":
        return Method.CONVOLUTION
    if preference == "mc":
        return Method.MONTE_CARLO
    if has_closed_form(spec, n):
        return Method.CLOSED_FORM
    if spec.symmetric and spec.has_cf:
        return Method.CF_QUADRATURE
    if n == 2 and has_convolution(spec):
        return Method.CONVOLUTION
    return Method.MONTE_CARLO


def mad(spec: DistributionSpec, n: int, preference: str = "auto",
        mc_config: McConfig | None = None, quad: QuadratureConfig | None = None) -> MadEstimate:
    """``M(n)`` by the requested or best available method.

    Under ``auto`` Monte Carlo uses ``mc_config`` or, when omitted, the default
    :class:`McConfig`; an explicit ``"mc"`` preference requires a config.
    """
    n = _check_n(n)
    method = resolve_method(spec, n, preference)
    if method is Method.CLOSED_FORM:
        return mad_closed_form(spec, n)
    if method is Method.CF_QUADRATURE:
        return mad_from_cf(spec, n, quad)
    if method is Method.CONVOLUTION:
        return mad_convolution(spec, n, quad)
    if mc_config is None:
        if preference == "mc":
            raise ConfigError("preference 'mc' requires an McConfig")
        mc_config = McConfig()
    return mad_monte_carlo(spec, n, mc_config)
