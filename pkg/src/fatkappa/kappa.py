"""The kappa metric ``kappa(n0, n) = 2 - (log n - log n0) / log(M(n) / M(n0))``.

``kappa`` is the exponent for which ``M(n) / M(n0) = (n / n0)^(1 / (2 - kappa))``:
zero for the Gaussian, ``2 - alpha`` for an alpha-stable law and close to one
for the fattest finite-mean tails. Values can be negative for laws whose sums
concentrate faster than the Gaussian rate.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable, Sequence

import numpy as np

from .distributions import Affine, DistributionSpec, Gaussian, Stable
from .errors import ConfigError, DomainError
from .mad import (
    MadEstimate, McConfig, McRun, Method, QuadratureConfig, batch_std_error, estimates_from_run,
    mad, mc_run, resolve_method,
)
from .rng import generator


@dataclass(frozen=True)
class KappaResult:
    n0: int
    n: int
    kappa: float
    method: str
    std_error: float = 0.0
    degenerate: bool = False
    mad_n0: float = math.nan
    mad_n: float = math.nan
    seed: int | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, default=str)


@dataclass(frozen=True)
class KappaChain:
    """Local ``kappa(i, i + 1)`` for ``i = 1 .. n_max - 1`` and the composed ``kappa(1, n_max)``."""

    local: list[KappaResult]
    composed: KappaResult

    def to_dict(self) -> dict[str, Any]:
        return {"local": [r.to_dict() for r in self.local], "composed": self.composed.to_dict()}


def _check_pair(n0: int, n: int) -> tuple[int, int]:
    if int(n0) != n0 or int(n) != n:
        raise DomainError("n0 and n must be integers")
    n0, n = int(n0), int(n)
    if not 1 <= n0 < n:
        raise DomainError(f"need n > n0 >= 1, got n0={n0}, n={n}")
    return n0, n


def kappa_from_mads(mad_n0: float, mad_n: float, n0: int, n: int) -> float:
    """Solve ``M(n)/M(n0) = (n/n0)^(1/(2-kappa))`` for kappa (NaN unless ``M(n) > M(n0)``)."""
    ratio = mad_n / mad_n0
    if not ratio > 1.0:
        return math.nan
    return 2.0 - (math.log(n) - math.log(n0)) / math.log(ratio)


def compose_local(local: Sequence[float], n0: int = 1) -> float:
    """Compose consecutive local kappas ``kappa(i, i+1)``, ``i = n0, n0+1, ...`` into ``kappa(n0, n)``."""
    steps = np.arange(n0, n0 + len(local), dtype=float)
    logs = np.log1p(1.0 / steps)
    total = float(np.sum(logs / (2.0 - np.asarray(local, dtype=float))))
    n = n0 + len(local)
    return 2.0 - (math.log(n) - math.log(n0)) / total


def _exact_stable_kappa(spec: DistributionSpec) -> float | None:
    """``2 - alpha`` for (affine images of) Gaussian and stable laws, else None."""
    while isinstance(spec, Affine):
        spec = spec.base
    if isinstance(spec, Gaussian):
        return 0.0
    if isinstance(spec, Stable):
        return 2.0 - spec.alpha_tilde
    return None


def _log_ratio_se(run: McRun, spec: DistributionSpec, j0: int, j1: int,
                  est0: MadEstimate, est1: MadEstimate) -> float:
    """Delta-method standard error of ``log(M(n)/M(n0))`` from paired batch means."""
    b0 = run.batch_values(est0.metadata["estimator"])[:, j0]
    b1 = run.batch_values(est1.metadata["estimator"])[:, j1]
    z = b1 / est1.value - b0 / est0.value
    robust = "robust" in est1.metadata.get("se_method", "") or "robust" in est0.metadata.get("se_method", "")
    return batch_std_error(z, robust)


def _mc_results(spec: DistributionSpec, n0: int, ns: Sequence[int], config: McConfig) -> list[KappaResult]:
    run = mc_run(spec, [n0, *ns], config)
    ests = estimates_from_run(spec, run)
    e0 = ests[0]
    out = []
    for j, e1 in enumerate(ests[1:], start=1):
        n = e1.n
        k = kappa_from_mads(e0.value, e1.value, n0, n)
        meta = {"backend": run.backend, "samples": config.samples, "batches": config.batches,
                "estimator_n0": e0.metadata["estimator"], "estimator_n": e1.metadata["estimator"],
                "mad_n0_se": e0.std_error, "mad_n_se": e1.std_error, "heavy_tail": spec.heavy_tail}
        if math.isnan(k):
            meta["warning"] = "M(n) <= M(n0) in simulation; kappa undefined"
            out.append(KappaResult(n0, n, math.nan, Method.MONTE_CARLO.value, math.nan, True,
                                   e0.value, e1.value, int(config.seed), meta))
            continue
        log_r = math.log(e1.value / e0.value)
        se = (math.log(n) - math.log(n0)) / log_r**2 * _log_ratio_se(run, spec, 0, j, e0, e1)
        out.append(KappaResult(n0, n, k, Method.MONTE_CARLO.value, float(se), False,
                               e0.value, e1.value, int(config.seed), meta))
    return out


def _exact_result(spec: DistributionSpec, e0: MadEstimate, e1: MadEstimate) -> KappaResult:
    n0, n = e0.n, e1.n
    k = kappa_from_mads(e0.value, e1.value, n0, n)
    if math.isnan(k):
        raise DomainError(f"M({n}) <= M({n0}); kappa is undefined for this distribution")
    exact = _exact_stable_kappa(spec)
    if exact is not None and e0.method == e1.method == Method.CLOSED_FORM:
        # M(n) = n^(1/alpha) M(1); avoid rounding in the ratio.
        k = exact
    method = e0.method.value if e0.method == e1.method else f"{e0.method.value}+{e1.method.value}"
    return KappaResult(n0, n, k, method, 0.0, False, e0.value, e1.value, None,
                       {"method_n0": e0.method.value, "method_n": e1.method.value})


def _needs_mc(spec: DistributionSpec, ns: Iterable[int], preference: str,
              mc_config: McConfig | None) -> McConfig | None:
    if not any(resolve_method(spec, k, preference) is Method.MONTE_CARLO for k in ns):
        return None
    if mc_config is None:
        if preference == "mc":
            raise ConfigError("preference 'mc' requires an McConfig")
        mc_config = McConfig()
    return mc_config


def kappa_grid(spec: DistributionSpec, ns: Sequence[int], n0: int = 1, preference: str = "auto",
               mc_config: McConfig | None = None,
               quad: QuadratureConfig | None = None) -> list[KappaResult]:
    """``kappa(n0, n)`` for every ``n`` in ``ns``, simulated in a single run when needed."""
    ns = [(_check_pair(n0, n)[1]) for n in ns]
    n0 = int(n0)
    if not spec.mad1() > 0:
        raise DomainError("degenerate distribution: M(1) = 0")
    config = _needs_mc(spec, [n0, *ns], preference, mc_config)
    if config is not None:
        by_n = {r.n: r for r in _mc_results(spec, n0, sorted(set(ns)), config)}
        return [by_n[n] for n in ns]
    e0 = mad(spec, n0, preference, quad=quad)
    return [_exact_result(spec, e0, mad(spec, n, preference, quad=quad)) for n in ns]


def kappa(spec: DistributionSpec, n0: int, n: int, preference: str = "auto",
          mc_config: McConfig | None = None, quad: QuadratureConfig | None = None) -> KappaResult:
    """``kappa(n0, n)`` with both MADs from the same preference.

    When either side needs simulation both are taken from one run (common
    random numbers), and the error bar propagates the paired batch means.
    A simulated ``M(n) <= M(n0)`` gives a flagged NaN result.
    """
    n0, n = _check_pair(n0, n)
    return kappa_grid(spec, [n], n0, preference, mc_config, quad)[0]


def kappa_chain(spec: DistributionSpec, n_max: int, preference: str = "auto",
                mc_config: McConfig | None = None, quad: QuadratureConfig | None = None) -> KappaChain:
    """Local ``kappa(i, i+1)`` for ``i < n_max`` and their composition ``kappa(1, n_max)``."""
    if int(n_max) != n_max or n_max < 2:
        raise DomainError("n_max must be an integer >= 2")
    n_max = int(n_max)
    ns = list(range(1, n_max + 1))
    methods = {resolve_method(spec, k, preference) for k in ns}
    mc_config = _needs_mc(spec, ns, preference, mc_config)
    if mc_config is not None:
        run = mc_run(spec, ns, mc_config)
        ests = estimates_from_run(spec, run)
        local = []
        for j in range(n_max - 1):
            e0, e1 = ests[j], ests[j + 1]
            k = kappa_from_mads(e0.value, e1.value, j + 1, j + 2)
            if math.isnan(k):
                local.append(KappaResult(j + 1, j + 2, math.nan, "monte_carlo", math.nan, True,
                                         e0.value, e1.value, int(mc_config.seed)))
                continue
            se = math.log1p(1.0 / (j + 1)) / math.log(e1.value / e0.value) ** 2 * \
                _log_ratio_se(run, spec, j, j + 1, e0, e1)
            local.append(KappaResult(j + 1, j + 2, k, "monte_carlo", float(se), False,
                                     e0.value, e1.value, int(mc_config.seed)))
        e0, e1 = ests[0], ests[-1]
        kc = kappa_from_mads(e0.value, e1.value, 1, n_max)
        if math.isnan(kc):
            composed = KappaResult(1, n_max, math.nan, "monte_carlo", math.nan, True,
                                   e0.value, e1.value, int(mc_config.seed))
        else:
            se = math.log(n_max) / math.log(e1.value / e0.value) ** 2 * \
                _log_ratio_se(run, spec, 0, n_max - 1, e0, e1)
            if all(not r.degenerate for r in local):
                kc = compose_local([r.kappa for r in local])
            composed = KappaResult(1, n_max, kc, "monte_carlo", float(se), False,
                                   e0.value, e1.value, int(mc_config.seed), {"composed": True})
        return KappaChain(local, composed)
    ests = [mad(spec, k, preference, quad=quad) for k in ns]
    exact = _exact_stable_kappa(spec) if methods == {Method.CLOSED_FORM} else None
    local = []
    for j in range(n_max - 1):
        k = kappa_from_mads(ests[j].value, ests[j + 1].value, j + 1, j + 2)
        if math.isnan(k):
            raise DomainError(f"M({j + 2}) <= M({j + 1}); kappa is undefined")
        if exact is not None:
            k = exact
        local.append(KappaResult(j + 1, j + 2, k, ests[j + 1].method.value, 0.0, False,
                                 ests[j].value, ests[j + 1].value))
    kc = compose_local([r.kappa for r in local]) if exact is None else exact
    composed = KappaResult(1, n_max, kc, ests[-1].method.value, 0.0, False,
                           ests[0].value, ests[-1].value, None, {"composed": True})
    return KappaChain(local, composed)


def stable_kappa(alpha_tilde: float) -> float:
    """``kappa = 2 - alpha`` for every ``(n0, n)`` in the alpha-stable basin."""
    if not (1.0 < alpha_tilde <= 2.0):
        raise DomainError("alpha_tilde must lie in (1, 2]")
    return 2.0 - float(alpha_tilde)


# --- empirical estimator ---------------------------------------------------------------

BLOCK_SCHEMES = ("disjoint", "circular-bootstrap")


def _block_mad(x: np.ndarray, csum: np.ndarray, k: int, center: float, scheme: str,
               rng: np.random.Generator | None) -> float:
    n = x.size
    if scheme == "disjoint":
        m = n // k
        sums = x[: m * k].reshape(m, k).sum(axis=1)
    else:
        # Circular blocks at random starts; prefix sums over the doubled series.
        starts = rng.integers(0, n, size=n)
        sums = csum[starts + k] - csum[starts]
    return float(np.mean(np.abs(sums - k * center)))


def _empirical_pair(x: np.ndarray, n0: int, n: int, scheme: str, rng) -> tuple[float, float]:
    center = float(np.mean(x))
    csum = None
    if scheme != "disjoint":
        csum = np.concatenate(([0.0], np.cumsum(np.concatenate((x, x[:n])))))
    return (_block_mad(x, csum, n0, center, scheme, rng), _block_mad(x, csum, n, center, scheme, rng))


def empirical_kappa(data: Iterable[float], n0: int, n: int, blocks: str = "disjoint",
                    seed: int = 0, bootstrap: int = 100) -> KappaResult:
    """kappa(n0, n) from an observed i.i.d. series.

    ``M(k)`` is the mean of ``|block sum - k * grand mean|`` over disjoint
    blocks of length ``k`` or over circular blocks at random starts. The
    error bar is the spread of the estimate over ``bootstrap`` resampled
    series built from randomly placed circular blocks of length ``n``.
    """
    n0, n = _check_pair(n0, n)
    if blocks not in BLOCK_SCHEMES:
        raise ConfigError(f"blocks must be one of {BLOCK_SCHEMES}")
    x = np.asarray(list(data) if not isinstance(data, np.ndarray) else data, dtype=float).ravel()
    if x.size < 10 * n:
        raise DomainError(f"need at least {10 * n} observations, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise DomainError("data contain non-finite values")
    rng = generator(seed, 0)
    m0, m1 = _empirical_pair(x, n0, n, blocks, rng)
    k = kappa_from_mads(m0, m1, n0, n)
    boot = []
    if bootstrap > 0:
        brng = generator(seed, 1)
        nb = x.size // n
        idx_base = np.arange(n)
        for _ in range(int(bootstrap)):
            starts = brng.integers(0, x.size, size=nb)
            xb = x[(starts[:, None] + idx_base[None, :]) % x.size].ravel()
            b0, b1 = _empirical_pair(xb, n0, n, blocks, brng)
            boot.append(kappa_from_mads(b0, b1, n0, n))
    boot = np.asarray(boot)
    finite = boot[np.isfinite(boot)]
    se = float(np.std(finite, ddof=1)) if finite.size > 1 else math.nan
    meta = {"blocks": blocks, "observations": int(x.size), "bootstrap": int(bootstrap),
            "bootstrap_degenerate": int(boot.size - finite.size)}
    return KappaResult(n0, n, k, "empirical", se, math.isnan(k), m0, m1, int(seed), meta)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_series(source: str | os.PathLike, column: str | int | None = None) -> np.ndarray:
    """Read numbers from a newline-delimited text file or one column of a CSV file.

    ``column`` selects a CSV column by header name or zero-based index; the
    first column is used by default. Blank lines and lines starting with
    ``#`` are skipped.
    """
    with open(source, newline="") as fh:
        text = fh.read()
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise DomainError(f"no data in {source}")
    if not any("," in ln for ln in lines) and column in (None, 0):
        try:
            return np.array([float(ln.split()[0]) for ln in lines])
        except ValueError as exc:
            raise DomainError(f"non-numeric value in {source}: {exc}") from None
    rows = list(csv.reader(io.StringIO("\n".join(lines))))
    header = None
    if not all(_is_number(c) for c in rows[0]):
        header, rows = [h.strip() for h in rows[0]], rows[1:]
    if column is None:
        col = 0
    elif isinstance(column, int) or str(column).isdigit():
        col = int(column)
    else:
        if header is None or column not in header:
            raise DomainError(f"column {column!r} not found")
        col = header.index(column)
    try:
        return np.array([float(r[col]) for r in rows if len(r) > col and r[col].strip()])
    except ValueError as exc:
        raise DomainError(f"non-numeric value in column {col}: {exc}") from None
