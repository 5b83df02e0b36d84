"""Acceptance criteria, each at its stated tolerance.

Every test records one PASS/FAIL line through the ``report`` fixture; the
lines are repeated in the terminal summary. Criteria whose stated targets
disagree with independent oracles are marked ``xfail(strict=True)``: they run
unchanged and are expected to print FAIL.
"""

from __future__ import annotations

import math

import numpy as np
import pytest
from scipy import integrate

from fatkappa import distributions as D
from fatkappa.analytic import (
    cubic_kappa, cubic_sum_pdf, exponential_kappa_n, exponential_log_limit, kappa1_exponential,
    kappa1_lognormal_approx, kappa1_pareto, kappa1_student, kurtosis_boundary_separation,
    lognormal_cumulants, lognormal_kappa, lognormal_kappa_star, mean_mixture_kappa1, mixture_kurtosis,
    pearson_cumulants, pearson_fit, pearson_kappa,
)
from fatkappa.applications import TAIL_GRID, equivalent_sample_size, pareto_student_table
from fatkappa.kappa import kappa, kappa_grid
from fatkappa.mad import McConfig, mad, mad_from_cf, mad_monte_carlo, mad_monte_carlo_multi

from golden import KAPPA_TABLE, TABLE_COLUMNS

PI2_4 = math.pi**2 / 4


# --- 1: two-summand columns from exact paths -----------------------------------------------

def test_c1_kappa1_columns(report):
    dev_s = max(abs(kappa1_student(a) - KAPPA_TABLE[a][3]) for a in TAIL_GRID)
    dev_p = max(abs(kappa1_pareto(a) - KAPPA_TABLE[a][0]) for a in TAIL_GRID)
    report("1", dev_s <= 0.005 and dev_p <= 0.005,
           f"max |dev| student {dev_s:.4f}, pareto {dev_p:.4f} (tol 0.005, 12 alphas)")


# --- 2: simulated 30- and 100-summand columns ----------------------------------------------

@pytest.mark.slow
def test_c2_simulated_columns(report):
    cfg = McConfig(samples=10**7, batches=32, seed=42)
    cells = pareto_student_table(TAIL_GRID, cfg, preference="mc")
    worst, bad = 0.0, []
    checked = 0
    for c in cells:
        if c.column == "kappa_1":
            continue
        off = 0 if c.row == "pareto" else 3
        ref = KAPPA_TABLE[c.parameter][off + TABLE_COLUMNS.index(c.column)]
        tol = 0.03 if c.row == "pareto" and c.parameter <= 1.5 else 0.02
        dev = abs(c.value - ref)
        worst = max(worst, dev / tol)
        checked += 1
        if not dev <= tol:
            bad.append(f"{c.row}{c.parameter}/{c.column}={c.value:.4f} vs {ref}")
    report("2", checked == 48 and not bad,
           f"{checked} cells, 1e7 replicates, seed 42; worst |dev|/tol {worst:.2f}"
           + (f"; out of tolerance: {bad}" if bad else ""))


# --- 3: cross-formula identities -----------------------------------------------------------

def test_c3_identities(report):
    d1 = abs(cubic_kappa(2) - kappa1_student(3))
    d2 = abs(exponential_kappa_n(2) - kappa1_exponential())
    d3 = max(abs(lognormal_kappa_star(s, 2) - kappa1_lognormal_approx(s)) for s in (0.1, 1, 5))
    report("3", d1 <= 1e-10 and d2 <= 1e-12 and d3 <= 1e-12,
           f"cubic vs student {d1:.1e} (1e-10), exponential {d2:.1e} (1e-12), lognormal {d3:.1e} (1e-12)")


# --- 4: sample-size claims --------------------------------------------------------------------

def test_c4a_student_equivalence(report):
    r = equivalent_sample_size(D.StudentT(3), 30, "approx_kappa1")
    report("4a", 115 <= r.n_nu <= 125, f"Student(3) approx_kappa1 n_nu = {r.n_nu:.2f} (target [115, 125])")


@pytest.mark.xfail(strict=True, reason="R(n) crosses 30^(-1/2) near n = 63; see ledger")
def test_c4b_pareto_exact_matching(report):
    r = equivalent_sample_size(D.Pareto(3), 30, "exact_mad_match",
                               mc_config=McConfig(samples=10**6, batches=32, seed=42))
    report("4b", r.n_nu_ceil is not None and 489 <= r.n_nu_ceil <= 597,
           f"Pareto(3) exact_mad_match n = {r.n_nu_ceil} (target [489, 597]); "
           f"R(n) = {r.metadata.get('ratio_n', math.nan):.4f} vs 30^-1/2 = {30 ** -0.5:.4f}")


def test_c4c_pareto_near_one(report):
    r = equivalent_sample_size(D.Pareto(1.14), 30, "approx_kappa1")
    report("4c", r.n_nu > 1e9, f"Pareto(1.14) approx_kappa1 n_nu = {r.n_nu:.3e} (target > 1e9)")


# --- 5: log-scaled limits -----------------------------------------------------------------------

NS = (10**2, 10**4, 10**6, 10**8)


@pytest.mark.xfail(strict=True, reason="log(n) kappa(n) levels off near 0.90, not pi^2/4; see ledger")
def test_c5a_cubic_limit(report):
    vals = [math.log(n) * cubic_kappa(n) for n in NS]
    gaps = [abs(v - PI2_4) for v in vals]
    rel = gaps[-1] / PI2_4
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    report("5a", rel <= 0.15 and monotone,
           f"log(n) kappa at 1e8 = {vals[-1]:.4f} vs pi^2/4 = {PI2_4:.4f}, rel gap {rel:.1%} (tol 15%); "
           f"monotone approach {monotone}")


def test_c5b_exponential_limit(report):
    target = exponential_log_limit()
    vals = {n: math.log(n) * exponential_kappa_n(n) for n in NS}
    gaps = [abs(vals[n] - target) for n in NS]
    rel = abs(vals[10**6] - target) / abs(target)
    monotone = all(b < a for a, b in zip(gaps, gaps[1:]))
    report("5b", rel <= 0.20 and monotone,
           f"log(n) kappa at 1e6 = {vals[10**6]:.4f} vs 4 - 2 log(2 pi) = {target:.4f}, rel gap {rel:.1%} "
           f"(tol 20%); monotone approach {monotone}")


# --- 6: stable basin ------------------------------------------------------------------------------

def test_c6_stable_basin(report):
    cfg = McConfig(samples=10**6, batches=32, seed=42)
    worst = 0.0
    where = ""
    for alpha in (1.25, 1.5, 1.75, 2.0):
        for beta in (0.0, 0.5, 1.0):
            for r in kappa_grid(D.Stable(alpha, beta), [2, 10, 100], 1, "mc", cfg):
                dev = abs(r.kappa - (2 - alpha))
                if dev > worst:
                    worst, where = dev, f"alpha={alpha}, beta={beta}, n={r.n}"
    report("6", worst <= 0.03, f"36 simulated kappas, 1e6 replicates; max |kappa - (2 - alpha)| "
                               f"{worst:.4f} at {where} (tol 0.03)")


# --- 7: lognormal regimes --------------------------------------------------------------------------

def test_c7a_small_sigma(report):
    k = lognormal_kappa(0.1, 2)
    mc = kappa(D.Lognormal(0, 0.1), 1, 2, "mc", McConfig(samples=10**6, batches=32, seed=42))
    report("7a", k.kappa < 0.05 and mc.kappa < 0.05,
           f"kappa(1, 2) at sigma 0.1: {k.method} {k.kappa:.4f}, simulated {mc.kappa:.4f} (target < 0.05)")


def test_c7b_large_sigma(report):
    v = lognormal_kappa_star(5, 2)
    report("7b", v > 0.99, f"kappa* at sigma 5 = {v:.5f} (target > 0.99)")


@pytest.mark.xfail(strict=True, reason="simulated kappa(1, 2) at sigma 2 is 0.770, below both bounds; see ledger")
def test_c7c_sandwich(report):
    mc = kappa(D.Lognormal(0, 2), 1, 2, "mc", McConfig(samples=10**7, batches=32, seed=42))
    ks = lognormal_kappa_star(2, 2)
    kp = pearson_kappa(2, 2)
    lo, hi = min(ks, kp), max(ks, kp)
    report("7c", lo <= mc.kappa <= hi,
           f"sigma 2: simulated {mc.kappa:.4f} +/- {mc.std_error:.4f}, Pearson {kp:.4f}, kappa* {ks:.4f}")


# --- 8: negative kappa --------------------------------------------------------------------------------

def test_c8_negative_kappa(report):
    v = mean_mixture_kappa1(10, 1)
    mc = kappa(D.GaussianMeanMix(0, 10, 1, 1), 1, 2, "mc", McConfig(samples=10**6, batches=32, seed=42))
    d = kurtosis_boundary_separation(2.0, 1.0)
    kurt_dev = abs(mixture_kurtosis(0, d, 2.0, 1.0) - 3)
    ok = v < 0 and mc.kappa + 4 * mc.std_error < 0 and kurt_dev <= 1e-10
    report("8", ok, f"closed form {v:.4f}; simulated {mc.kappa:.4f} +/- {mc.std_error:.4f}; "
                    f"boundary kurtosis |K - 3| = {kurt_dev:.1e} (tol 1e-10)")


# --- 9: golden-free property suites --------------------------------------------------------------------

PROP_SPECS = [D.Gaussian(1, 2), D.StudentT(3), D.StudentT(2.5), D.Exponential(1), D.Gamma(2, 1),
              D.Stable(1.5, 0.5), D.GaussianVarianceMix(1, 1, 0.1), D.GaussianMeanMix(0, 4, 1, 1)]
MC_SPECS = [D.Pareto(2.5), D.Lognormal(0, 1), D.Pareto(1.5)]
NGRID = [1, 2, 3, 5, 10, 30, 100]


def test_c9a_mad_monotone_subadditive(report):
    bad = []
    for s in PROP_SPECS:
        v = [mad(s, n).value for n in NGRID]
        if not all(b >= a for a, b in zip(v, v[1:])) or not all(x <= n * v[0] * (1 + 1e-9) for n, x in zip(NGRID, v)):
            bad.append(s.label())
    cfg = McConfig(samples=200_000, batches=32, seed=9)
    for s in MC_SPECS:
        e = list(mad_monte_carlo_multi(s, NGRID, cfg).values())
        if not all(b.value >= a.value - 4 * math.hypot(a.std_error, b.std_error) for a, b in zip(e, e[1:])):
            bad.append(s.label())
        if not all(x.value <= x.n * s.mad1() + 4 * x.std_error for x in e):
            bad.append(s.label())
    report("9a", not bad, f"M(n) nondecreasing and M(n) <= n M(1) for {len(PROP_SPECS) + len(MC_SPECS)} laws"
                          + (f"; violations {bad}" if bad else ""))


def test_c9b_kappa_bound_and_invariance(report):
    worst_k, worst_inv = -math.inf, 0.0
    for s in PROP_SPECS:
        for r in kappa_grid(s, [2, 10, 100]):
            worst_k = max(worst_k, r.kappa)
        for c, b in ((3.0, 0.0), (-0.5, 2.0)):
            worst_inv = max(worst_inv, abs(kappa(D.Affine(s, c, b), 1, 10).kappa - kappa(s, 1, 10).kappa))
    report("9b", worst_k <= 1 and worst_inv <= 1e-12,
           f"max kappa {worst_k:.4f} (<= 1); max scale/shift change {worst_inv:.1e} (1e-12)")


def test_c9c_cubic_sum_density(report):
    norm = max(abs(2 * integrate.quad(lambda y: cubic_sum_pdf(y, n), 0, np.inf, limit=200)[0] - 1)
               for n in (1, 2, 5))
    ys = np.linspace(-25, 25, 41)
    sym = max(abs(cubic_sum_pdf(y, n) - cubic_sum_pdf(-y, n)) for y in ys for n in (1, 3, 7))
    nonneg = min(cubic_sum_pdf(y, n) for y in ys for n in (1, 3, 7))
    report("9c", norm <= 1e-6 and sym <= 1e-12 and nonneg >= 0,
           f"normalization error {norm:.1e}, asymmetry {sym:.1e}, min density {nonneg:.2e}")


def test_c9d_pearson_cumulants(report):
    worst = 0.0
    for sigma, n in ((0.05, 1), (0.1, 2), (0.2, 10), (0.25, 4), (0.3, 30)):
        c = lognormal_cumulants(0, sigma, n)
        got = pearson_cumulants(pearson_fit(0, sigma, n))
        worst = max(worst, max(abs(g / t - 1) for g, t in zip(got, (c.K1, c.K2, c.K3, c.K4))))
    report("9d", worst <= 1e-6, f"max relative cumulant mismatch {worst:.1e} over 5 fits (1e-6)")


def test_c9e_method_agreement(report):
    cases = [(D.Gaussian(0, 1.5), 7), (D.StudentT(3), 10), (D.Stable(1.5, 0.0), 4),
             (D.GaussianVarianceMix(1, 1, 0.1), 5), (D.Exponential(1), 3)]
    bad = []
    cfg = McConfig(samples=10**6, batches=32, seed=21)
    for s, n in cases:
        exact = mad(s, n).value
        if s.symmetric and s.has_cf and abs(mad_from_cf(s, n).value - exact) > 1e-6 * exact:
            bad.append(f"cf {s.label()}")
        e = mad_monte_carlo(s, n, cfg)
        if abs(e.value - exact) > 4 * e.std_error:
            bad.append(f"mc {s.label()}")
    report("9e", not bad, f"closed form vs CF vs simulation for {len(cases)} laws"
                          + (f"; disagreements {bad}" if bad else ""))
