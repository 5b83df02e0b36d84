"""Command-line front end.

Exit codes: 0 on success, 2 for usage or domain errors, 3 for numeric
failures. Errors are also written to stderr as one JSON object.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Any, Sequence

import numpy as np

from . import __version__, output
from .analytic import (
    lognormal_kappa, mean_mixture_kappa1, mixture_kurtosis,
)
from .applications import (
    EQUIV_METHODS, TAIL_GRID, convergence_trace, equivalent_sample_size, kappa1_table,
    mc_run_planner, pareto_student_table, portfolio_curve,
)
from .distributions import DistributionSpec, from_json, parse_spec
from .errors import KappaError, NumericError
from .kappa import empirical_kappa, kappa, kappa_chain, load_series, stable_kappa
from .mad import PREFERENCES, McConfig, mad

THREADS_ENV = "FATKAPPA_THREADS"
EXIT_OK, EXIT_DOMAIN, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- argument helpers -----------------------------------------------------------------

def _count(text: str) -> int:
    """Positive integer that also accepts ``1e7`` style input."""
    try:
        val = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not val.is_integer() or val < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(val)


def _spec(text: str) -> DistributionSpec:
    """Mini-language ``family:key=val`` or a path to a JSON spec file."""
    if os.path.isfile(text):
        with open(text) as fh:
            return from_json(fh.read())
    return parse_spec(text)


def _int_list(text: str) -> list[int]:
    return [_count(t) for t in text.split(",") if t.strip()]


def _float_list(text: str) -> list[float]:
    return [float(t) for t in text.split(",") if t.strip()]


def _grid(text: str) -> list[float]:
    """``start:stop:step`` inclusive of ``stop``, or a comma list."""
    if ":" not in text:
        return _float_list(text)
    parts = [float(p) for p in text.split(":")]
    if len(parts) != 3 or parts[2] <= 0 or parts[1] < parts[0]:
        raise argparse.ArgumentTypeError("grid must be start:stop:step with step > 0")
    start, stop, step = parts
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 12) for i in range(count)]


def _default_threads() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _mc_config(args) -> McConfig:
    return McConfig(samples=args.samples, batches=args.batches, seed=args.seed,
                    antithetic=args.antithetic, threads=args.threads)


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    p.add_argument("--samples", type=_count, default=1_000_000,
                   help="Monte Carlo replicates, e.g. 1e7 (default 1e6)")
    p.add_argument("--batches", type=_count, default=32, help="batches for error bars (>= 16)")
    p.add_argument("--method", choices=PREFERENCES, default="auto", help="MAD evaluation route")
    p.add_argument("--threads", type=_count, default=None,
                   help=f"worker threads (default ${THREADS_ENV} or 1)")
    p.add_argument("--antithetic", action="store_true", help="antithetic pairs (symmetric laws)")
    p.add_argument("--output", default="-", help="output path ('-' for stdout)")
    p.add_argument("--format", choices=output.FORMATS, default="csv")


# --- commands ---------------------------------------------------------------------------

def _kappa_row(spec: DistributionSpec, r, seed: int) -> dict[str, Any]:
    return {"spec": spec.label(), "n0": r.n0, "n": r.n, "value": r.kappa,
            "std_error": r.std_error, "degenerate": r.degenerate, "mad_n0": r.mad_n0,
            "mad_n": r.mad_n, "method": r.method, "seed": seed}


def cmd_kappa(args) -> list[dict]:
    r = kappa(args.spec, args.n0, args.n, args.method, _mc_config(args))
    return [_kappa_row(args.spec, r, args.seed)]


def cmd_chain(args) -> list[dict]:
    ch = kappa_chain(args.spec, args.nmax, args.method, _mc_config(args))
    rows = [dict(_kappa_row(args.spec, r, args.seed), kind="local") for r in ch.local]
    rows.append(dict(_kappa_row(args.spec, ch.composed, args.seed), kind="composed"))
    return rows


def cmd_mad(args) -> list[dict]:
    rows = []
    for n in args.n:
        e = mad(args.spec, n, args.method, _mc_config(args))
        rows.append({"spec": args.spec.label(), "n": e.n, "value": e.value,
                     "std_error": e.std_error, "samples_used": e.samples_used,
                     "method": e.method.value, "seed": args.seed})
    return rows


def _cell_rows(cells, seed: int) -> list[dict]:
    return [{"row": c.row, "column": c.column, "parameter": c.parameter, "value": c.value,
             "std_error": c.std_error, "method": c.method, "seed": seed} for c in cells]


def cmd_tables(args) -> list[dict]:
    alphas = args.alphas or list(TAIL_GRID)
    if args.which == "table1":
        return _cell_rows(kappa1_table(alphas), args.seed)
    cells = pareto_student_table(alphas, _mc_config(args), preference=args.method)
    return _cell_rows(cells, args.seed)


def cmd_equiv(args) -> list[dict]:
    methods = EQUIV_METHODS if args.equiv_method == "all" else (args.equiv_method,)
    rows = []
    for m in methods:
        r = equivalent_sample_size(args.spec, args.ng, m, args.method, _mc_config(args))
        rows.append({"spec": args.spec.label(), "n_g": r.n_g, "value": r.n_nu,
                     "n_nu_ceil": r.n_nu_ceil, "kappa_used": r.kappa_used,
                     "unbounded": r.unbounded, "std_error": r.std_error, "method": m,
                     "kappa_method": r.metadata.get("kappa_method"), "seed": args.seed})
    return rows


def cmd_portfolio(args) -> list[dict]:
    pts = portfolio_curve(args.spec, args.nmax, args.method, _mc_config(args))
    return [{"spec": args.spec.label(), "n": p.n, "value": p.risk_ratio, "gaussian": p.gaussian_ratio,
             "kappa": p.kappa, "std_error": p.std_error, "method": p.method, "seed": args.seed,
             "assumption": "iid"} for p in pts]


def cmd_plan(args) -> list[dict]:
    r = mc_run_planner(args.spec, args.target, args.method, _mc_config(args))
    return [{"spec": args.spec.label(), "target_ratio": r.target_ratio, "value": r.n,
             "n_real": r.n_real, "unbounded": r.unbounded, "ratio_n": r.ratio_n,
             "ratio_prev": r.ratio_prev, "std_error": 0.0, "method": r.method, "seed": args.seed}]


def cmd_trace(args) -> list[dict]:
    rows = convergence_trace(args.spec, args.n_grid, args.method, _mc_config(args))
    return [{"spec": r.spec, "n": r.n, "value": r.kappa, "asymptote": r.asymptote,
             "std_error": r.std_error, "method": r.method, "seed": args.seed} for r in rows]


def cmd_lognormal(args) -> list[dict]:
    rows = []
    for s in args.sigma_grid:
        r = lognormal_kappa(s, args.n, args.mu, _mc_config(args))
        rows.append({"sigma": s, "n": args.n, "value": r.kappa, "kappa_star": r.kappa_star,
                     "pearson": r.pearson, "std_error": r.std_error, "method": r.method,
                     "seed": args.seed})
    return rows


def cmd_mixture(args) -> list[dict]:
    rows = []
    for d in args.d:
        rows.append({"d": d, "sigma": args.sigma, "quantity": "kappa_1",
                     "value": mean_mixture_kappa1(d, args.sigma), "method": "closed_form",
                     "seed": args.seed})
        rows.append({"d": d, "sigma": args.sigma, "quantity": "kurtosis",
                     "value": mixture_kurtosis(0.0, d, args.sigma, args.sigma), "method": "closed_form",
                     "seed": args.seed})
    return rows


def cmd_stable(args) -> list[dict]:
    return [{"alpha_tilde": a, "value": stable_kappa(a), "method": "closed_form", "seed": args.seed}
            for a in args.alpha]


def cmd_empirical(args) -> list[dict]:
    data = load_series(args.input, args.column)
    r = empirical_kappa(data, args.n0, args.n, args.blocks, args.seed, args.bootstrap)
    return [{"input": os.path.basename(args.input), "n0": r.n0, "n": r.n, "value": r.kappa,
             "std_error": r.std_error, "mad_n0": r.mad_n0, "mad_n": r.mad_n,
             "blocks": args.blocks, "method": r.method, "seed": args.seed}]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="fatkappa", description="Preasymptotic fat-tailedness (kappa) toolkit.")
    parser.add_argument("--version", action="version", version=f"fatkappa {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kappa", help="kappa(n0, n) for one distribution")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--n0", type=_count, default=1)
    p.add_argument("--n", type=_count, default=2)
    p.set_defaults(func=cmd_kappa)

    p = sub.add_parser("chain", help="local kappa(i, i+1) and their composition")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--nmax", type=_count, required=True)
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("mad", help="mean absolute deviation of the n-fold sum")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--n", type=_int_list, default=[1], help="comma list of n")
    p.set_defaults(func=cmd_mad)

    p = sub.add_parser("tables", help="regenerate the kappa tables")
    p.add_argument("which", choices=("table1", "pareto_vs_student"))
    p.add_argument("--alphas", type=_float_list, default=None, help="comma list of tail exponents")
    p.set_defaults(func=cmd_tables)

    p = sub.add_parser("equiv", help="sample size matching a Gaussian sample of size n_g")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--ng", type=_count, default=30)
    p.add_argument("--equiv-method", choices=(*EQUIV_METHODS, "all"), default="approx_kappa1")
    p.set_defaults(func=cmd_equiv)

    p = sub.add_parser("portfolio", help="equal-weight diversification curve")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--nmax", type=_count, required=True)
    p.set_defaults(func=cmd_portfolio)

    p = sub.add_parser("plan", help="smallest n reaching a target risk ratio")
    p.add_argument("--spec", type=_spec, required=True)
    p.add_argument("--target", type=float, required=True)
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("trace", help="kappa(1, n) over a grid of n")
    p.add_argument("--spec", type=_spec, action="append", required=True, help="repeatable")
    p.add_argument("--n-grid", type=_int_list, default=[2, 10, 30, 100])
    p.set_defaults(func=cmd_trace)

    p = sub.add_parser("lognormal", help="lognormal kappa sweep over sigma")
    p.add_argument("--sigma-grid", type=_grid, default=_grid("0.1:5:0.1"))
    p.add_argument("--n", type=_count, default=2)
    p.add_argument("--mu", type=float, default=0.0)
    p.set_defaults(func=cmd_lognormal)

    p = sub.add_parser("mixture", help="equal-variance Gaussian mean mixture kappa and kurtosis")
    p.add_argument("--d", type=_float_list, default=[0.0, 1.0, 2.0, 5.0, 10.0])
    p.add_argument("--sigma", type=float, default=1.0)
    p.set_defaults(func=cmd_mixture)

    p = sub.add_parser("stable", help="kappa in the alpha-stable basin")
    p.add_argument("--alpha", type=_float_list, required=True)
    p.set_defaults(func=cmd_stable)

    p = sub.add_parser("empirical", help="kappa from observed data")
    p.add_argument("--input", required=True, help="text (one value per line) or CSV file")
    p.add_argument("--column", default=None, help="CSV column name or index")
    p.add_argument("--n0", type=_count, default=1)
    p.add_argument("--n", type=_count, default=30)
    p.add_argument("--blocks", choices=("disjoint", "circular-bootstrap"), default="disjoint")
    p.add_argument("--bootstrap", type=int, default=100)
    p.set_defaults(func=cmd_empirical)

    for name, sp in sub.choices.items():
        _common(sp)
    return parser


def _fail(kind: str, exc: BaseException, code: int) -> int:
    err = {"error": kind, "type": type(exc).__name__, "message": str(exc), "exit_code": code}
    print(json.dumps(err, sort_keys=True), file=sys.stderr)
    return code


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads is None:
            args.threads = _default_threads()
        if getattr(args, "column", None) is not None and str(args.column).isdigit():
            args.column = int(args.column)
        rows = args.func(args)
        output.write(rows, args.format, args.output)
    except UsageError as exc:
        return _fail("usage", exc, EXIT_DOMAIN)
    except NumericError as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except (ArithmeticError, np.linalg.LinAlgError) as exc:
        return _fail("numeric", exc, EXIT_NUMERIC)
    except (KappaError, ValueError, OSError) as exc:
        return _fail("domain", exc, EXIT_DOMAIN)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
