"""Operational uses of kappa: sample-size equivalence, diversification and run planning.

The risk ratio ``R(n) = M(n) / (n M(1)) = n^(1/(2 - kappa(1, n)) - 1)`` is the
mean absolute deviation of an equal-weight average of ``n`` i.i.d. copies
relative to a single copy. It equals ``n^(-1/2)`` for the Gaussian.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Any, Sequence


from .distributions import DistributionSpec, Gaussian
from .errors import DomainError
from .kappa import _exact_stable_kappa, _needs_mc, kappa, kappa_grid
from .mad import McConfig, Method, QuadratureConfig, estimates_from_run, mad, mc_run

EQUIV_METHODS = ("approx_kappa1", "approx_kappa1n", "exact_mad_match")
# Relative slack when comparing a risk ratio with its target, so exact
# power laws such as n^(-1/2) = 0.1 at n = 100 are not pushed to n + 1.
RATIO_RTOL = 1e-12
DEFAULT_N_CAP = 1 << 26
# Simulation cost grows like samples * n, so simulated plans stop earlier.
MC_N_CAP = 1 << 12
MAX_SCAN = 4096


@dataclass(frozen=True)
class RiskRatio:
    n: int
    ratio: float
    std_error: float
    method: str
    seed: int | None = None


def risk_ratios(spec: DistributionSpec, ns: Sequence[int], preference: str = "auto",
                mc_config: McConfig | None = None,
                quad: QuadratureConfig | None = None) -> list[RiskRatio]:
    """``R(n) = M(n) / (n M(1))`` for each ``n``; one simulation covers every ``n`` when needed."""
    ns = [int(n) for n in ns]
    if any(n < 1 for n in ns):
        raise DomainError("n must be >= 1")
    m1 = spec.mad1()
    if not m1 > 0:
        raise DomainError("degenerate distribution: M(1) = 0")
    config = _needs_mc(spec, ns, preference, mc_config)
    if config is not None:
        run = mc_run(spec, ns, config)
        by_n = {e.n: e for e in estimates_from_run(spec, run)}
        return [RiskRatio(n, by_n[n].value / (n * m1), by_n[n].std_error / (n * m1),
                          Method.MONTE_CARLO.value, int(config.seed)) for n in ns]
    exact = _exact_stable_kappa(spec)
    out = []
    for n in ns:
        e = mad(spec, n, preference, quad=quad)
        if exact is not None and e.method is Method.CLOSED_FORM:
            r = float(n) ** (1.0 / (2.0 - exact) - 1.0)
        else:
            r = e.value / (n * m1)
        out.append(RiskRatio(n, r, 0.0, e.method.value))
    return out


# --- run planning / exact matching -------------------------------------------------------

@dataclass(frozen=True)
class PlanResult:
    """Smallest ``n`` with ``R(n) <= target``; ``n`` is None when no finite ``n`` exists."""

    target_ratio: float
    n: int | None
    n_real: float
    unbounded: bool
    method: str
    ratio_n: float = math.nan
    ratio_prev: float = math.nan
    seed: int | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)


def _upper(r: RiskRatio) -> float:
    # Conservative side for simulated ratios.
    return r.ratio + 2.0 * r.std_error


def _ok(r: RiskRatio, target: float) -> bool:
    return _upper(r) <= target * (1 + RATIO_RTOL)


def mc_run_planner(spec: DistributionSpec, target_ratio: float, preference: str = "auto",
                   mc_config: McConfig | None = None, quad: QuadratureConfig | None = None,
                   n_cap: int | None = None) -> PlanResult:
    """Smallest ``n`` with ``R(n) <= target_ratio``.

    ``R`` is bracketed on a doubling grid, a real-valued crossing is read off
    the log-log interpolation (piecewise-constant local kappa), and the integer
    answer comes from direct evaluation inside the bracket. Simulated ratios
    use the upper bound ``R + 2 SE``. ``n_cap`` bounds the search; it defaults
    to 2^26 for exact methods and 2^12 when simulation is needed.
    """
    if not (0.0 < target_ratio < 1.0):
        raise DomainError("target_ratio must lie in (0, 1)")
    if n_cap is None:
        simulated = _needs_mc(spec, [2, 3], preference, mc_config) is not None
        n_cap = MC_N_CAP if simulated else DEFAULT_N_CAP
    grid = [1]
    while grid[-1] < n_cap:
        grid.append(min(grid[-1] * 2, n_cap))
    # Evaluate the doubling grid lazily so cheap targets stay cheap.
    vals: list[RiskRatio] = []
    hi_idx = None
    start = 0
    chunk = 4
    while start < len(grid):
        stop = min(start + chunk, len(grid))
        vals.extend(risk_ratios(spec, grid[start:stop], preference, mc_config, quad))
        for i in range(start, stop):
            if _ok(vals[i], target_ratio):
                hi_idx = i
                break
            if i >= 3 and vals[i].ratio >= vals[i - 3].ratio * (1 - 1e-9) and vals[i].std_error == 0:
                # No further decrease: kappa has reached one.
                start = len(grid)
                break
        if hi_idx is not None:
            break
        start = stop
        chunk *= 2
    method = vals[-1].method
    seed = vals[-1].seed
    if hi_idx is None:
        return PlanResult(target_ratio, None, math.inf, True, method, seed=seed,
                          metadata={"reason": f"R(n) stays above target up to n={grid[len(vals) - 1]}",
                                    "n_cap": n_cap})
    if hi_idx == 0:
        return PlanResult(target_ratio, 1, 1.0, False, method, vals[0].ratio, math.nan, seed)
    lo, hi = vals[hi_idx - 1], vals[hi_idx]
    # log R linear in log n between the bracket ends.
    a, b = math.log(_upper(lo)), math.log(max(_upper(hi), 1e-300))
    t = (math.log(target_ratio) - a) / (b - a) if b != a else 1.0
    n_real = math.exp(math.log(lo.n) + t * (math.log(hi.n) - math.log(lo.n)))
    # Integer refinement in (lo.n, hi.n].
    if hi.n - lo.n <= MAX_SCAN:
        cand = list(range(lo.n, hi.n + 1))
        rs = risk_ratios(spec, cand, preference, mc_config, quad)
        idx = next((i for i, r in enumerate(rs) if _ok(r, target_ratio)), len(rs) - 1)
        n_best, r_n = cand[idx], rs[idx]
        r_prev = rs[idx - 1] if idx > 0 else vals[hi_idx - 2] if hi_idx >= 2 else rs[0]
    else:
        lo_n, hi_n = lo.n, hi.n
        r_lo, r_hi = lo, hi
        while hi_n - lo_n > 1:
            mid = (lo_n + hi_n) // 2
            r_mid = risk_ratios(spec, [mid], preference, mc_config, quad)[0]
            if _ok(r_mid, target_ratio):
                hi_n, r_hi = mid, r_mid
            else:
                lo_n, r_lo = mid, r_mid
        n_best, r_n, r_prev = hi_n, r_hi, r_lo
    return PlanResult(target_ratio, int(n_best), float(n_real), False, method, r_n.ratio,
                      r_prev.ratio, seed, {"bracket": [lo.n, hi.n], "ratio_se": r_n.std_error})


# --- equivalence ---------------------------------------------------------------------------

@dataclass(frozen=True)
class EquivalenceResult:
    n_g: int
    n_nu: float
    kappa_used: float
    method: str
    spec: DistributionSpec
    unbounded: bool = False
    n_nu_ceil: int | None = None
    std_error: float = 0.0
    seed: int | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["spec"] = self.spec.to_dict()
        return d


def _approx_equivalence(n_g: int, k: float) -> tuple[float, bool]:
    if not k < 1.0:
        return math.inf, True
    try:
        n_nu = float(n_g) ** (1.0 / (1.0 - k))
    except OverflowError:
        return math.inf, True
    return n_nu, not math.isfinite(n_nu)


def equivalent_sample_size(spec: DistributionSpec, n_g: int, method: str = "approx_kappa1",
                           preference: str = "auto", mc_config: McConfig | None = None,
                           quad: QuadratureConfig | None = None) -> EquivalenceResult:
    """Observations under ``spec`` matching the mean stability of ``n_g`` Gaussian ones.

    ``approx_kappa1`` and ``approx_kappa1n`` evaluate ``n_g^(1/(1 - kappa))``
    with ``kappa(1, 2)`` or ``kappa(1, n_g)``. ``exact_mad_match`` finds the
    smallest ``n`` with ``M(n)/n <= M_g(n_g)/n_g`` once ``spec`` is scaled to
    the Gaussian ``M(1)``, that is ``R(n) <= n_g^(-1/2)``.
    """
    if int(n_g) != n_g or n_g < 2:
        raise DomainError("n_g must be an integer >= 2")
    n_g = int(n_g)
    if method not in EQUIV_METHODS:
        raise DomainError(f"method must be one of {EQUIV_METHODS}")
    if method in ("approx_kappa1", "approx_kappa1n"):
        res = kappa(spec, 1, 2 if method == "approx_kappa1" else n_g, preference, mc_config, quad)
        if res.degenerate:
            return EquivalenceResult(n_g, math.nan, math.nan, method, spec, False, None, math.nan,
                                     res.seed, {"kappa_method": res.method, "warning": "degenerate kappa"})
        n_nu, unbounded = _approx_equivalence(n_g, res.kappa)
        se = 0.0
        if not unbounded and res.std_error > 0:
            se = n_nu * math.log(n_g) / (1.0 - res.kappa) ** 2 * res.std_error
        ceil = None if unbounded else int(math.ceil(n_nu * (1 - RATIO_RTOL)))
        return EquivalenceResult(n_g, n_nu, res.kappa, method, spec, unbounded, ceil, se, res.seed,
                                 {"kappa_method": res.method, "kappa_se": res.std_error})
    plan = mc_run_planner(spec, n_g ** -0.5, preference, mc_config, quad)
    if plan.unbounded:
        return EquivalenceResult(n_g, math.inf, 1.0, method, spec, True, None, 0.0, plan.seed,
                                 {"kappa_method": plan.method, **plan.metadata})
    n = plan.n
    k_eff = 2.0 - math.log(n) / math.log(n * plan.ratio_n) if n > 1 and n * plan.ratio_n > 1 else 0.0
    return EquivalenceResult(n_g, float(n), k_eff, method, spec, False, n, 0.0, plan.seed,
                             {"kappa_method": plan.method, "n_real": plan.n_real,
                              "ratio_n": plan.ratio_n, "ratio_prev": plan.ratio_prev})


def equivalent_sample_sizes(spec: DistributionSpec, n_g: int, **kwargs) -> dict[str, EquivalenceResult]:
    """All three equivalence methods side by side."""
    return {m: equivalent_sample_size(spec, n_g, m, **kwargs) for m in EQUIV_METHODS}


# --- portfolio and trace ------------------------------------------------------------------

@dataclass(frozen=True)
class PortfolioPoint:
    n: int
    risk_ratio: float
    std_error: float
    gaussian_ratio: float
    kappa: float
    method: str
    seed: int | None = None


def portfolio_curve(spec: DistributionSpec, n_max: int, preference: str = "auto",
                    mc_config: McConfig | None = None,
                    quad: QuadratureConfig | None = None) -> list[PortfolioPoint]:
    """Risk of an equal-weight portfolio of ``n`` i.i.d. securities relative to one, ``n = 1..n_max``.

    The Gaussian baseline ``n^(-1/2)`` is carried in every point.
    """
    if int(n_max) != n_max or n_max < 1:
        raise DomainError("n_max must be a positive integer")
    ns = list(range(1, int(n_max) + 1))
    out = []
    for r in risk_ratios(spec, ns, preference, mc_config, quad):
        if r.n == 1:
            k = math.nan
        elif r.n * r.ratio > 1.0:
            k = 2.0 - math.log(r.n) / math.log(r.n * r.ratio)
        else:
            k = math.nan
        out.append(PortfolioPoint(r.n, r.ratio, r.std_error, r.n ** -0.5, k, r.method, r.seed))
    return out


@dataclass(frozen=True)
class TraceRow:
    spec: str
    n: int
    kappa: float
    std_error: float
    asymptote: float
    method: str
    seed: int | None = None


def convergence_trace(specs: Sequence[DistributionSpec], n_grid: Sequence[int],
                      preference: str = "auto", mc_config: McConfig | None = None,
                      quad: QuadratureConfig | None = None) -> list[TraceRow]:
    """Long-format ``kappa(1, n)`` over ``n_grid`` per spec, with the stable-basin limit ``2 - alpha``."""
    grid = [int(n) for n in n_grid]
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("n_grid must be strictly ascending")
    rows = []
    for spec in specs:
        asym = 2.0 - spec.basin_index
        for r in kappa_grid(spec, grid, 1, preference, mc_config, quad):
            rows.append(TraceRow(spec.label(), r.n, r.kappa, r.std_error, asym, r.method, r.seed))
    return rows


def gaussian_reference(sigma: float = 1.0) -> Gaussian:
    """The Gaussian benchmark used for equivalence."""
    return Gaussian(0.0, sigma)


# --- tables ------------------------------------------------------------------------------

TAIL_GRID = tuple(1.25 + 0.25 * i for i in range(12))


@dataclass(frozen=True)
class TableCell:
    row: str
    column: str
    parameter: float
    value: float
    std_error: float
    method: str
    seed: int | None = None


def kappa1_table(alphas: Sequence[float] = TAIL_GRID,
                 lognormal_sigmas: Sequence[float] = (0.25, 0.5, 1.0, 2.0, 5.0),
                 switching: tuple[float, float, float] = (1.0, 1.0, 0.1)) -> list[TableCell]:
    """Closed-form ``kappa(1, 2)`` for the Student, Pareto, exponential, switching-variance and lognormal laws."""
    from .analytic import (
        kappa1_exponential, kappa1_lognormal_approx, kappa1_pareto, kappa1_student,
        kappa1_switching_variance,
    )

    cells = [TableCell("studentt", "kappa_1", a, kappa1_student(a), 0.0, "closed_form") for a in alphas]
    cells += [TableCell("pareto", "kappa_1", a, kappa1_pareto(a), 0.0, "convolution_quadrature")
              for a in alphas]
    cells.append(TableCell("exponential", "kappa_1", 1.0, kappa1_exponential(), 0.0, "closed_form"))
    s, a, p = switching
    cells.append(TableCell(f"varmix:sigma={s},a={a},p={p}", "kappa_1", p,
                           kappa1_switching_variance(s, a, p), 0.0, "closed_form"))
    cells += [TableCell("lognormal", "kappa_1_approx", sg, kappa1_lognormal_approx(sg), 0.0,
                        "closed_form_approx") for sg in lognormal_sigmas]
    return cells


def pareto_student_table(alphas: Sequence[float] = TAIL_GRID, mc_config: McConfig | None = None,
                         ns: Sequence[int] = (30, 100), preference: str = "auto",
                         families: Sequence[str] = ("pareto", "studentt")) -> list[TableCell]:
    """``kappa(1, 2)``, ``kappa(1, 30)`` and ``kappa(1, 100)`` for Pareto and Student laws sharing a tail exponent.

    The first column is exact; the others use one simulation per law with
    common random numbers across ``ns``.
    """
    from .distributions import Pareto, StudentT

    make = {"pareto": lambda a: Pareto(a, 1.0), "studentt": lambda a: StudentT(a, 1.0)}
    cells = []
    for fam in families:
        for a in alphas:
            spec = make[fam](a)
            k1 = kappa(spec, 1, 2, "auto")
            cells.append(TableCell(fam, "kappa_1", a, k1.kappa, k1.std_error, k1.method))
            for r in kappa_grid(spec, list(ns), 1, preference, mc_config):
                cells.append(TableCell(fam, f"kappa_1_{r.n}", a, r.kappa, r.std_error, r.method,
                                       r.seed))
    return cells
