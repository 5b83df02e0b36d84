"""Kernel backend selection.

The compiled extension is used when importable; otherwise, or when the
environment variable ``FATKAPPA_BACKEND=python`` is set, the numpy fallback is
used. Both expose ``fill_draws`` and ``mc_accumulate`` with identical
signatures.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _fallback

ENV_VAR = "FATKAPPA_BACKEND"


def _load_compiled() -> ModuleType | None:
    try:
        from . import _kernels
    except ImportError:
        return None
    return _kernels


compiled: ModuleType | None = _load_compiled()
fallback: ModuleType = _fallback


def _select() -> tuple[str, ModuleType]:
    want = os.environ.get(ENV_VAR, "").strip().lower()
    if want in ("python", "numpy", "fallback"):
        return "python", fallback
    if want in ("cython", "compiled") and compiled is None:
        raise ImportError("FATKAPPA_BACKEND requests the compiled kernels, which are not built")
    if compiled is not None:
        return "cython", compiled
    return "python", fallback


name, _active = _select()


def get(which: str | None = None) -> ModuleType:
    """Return a backend module: ``"cython"``, ``"python"`` or the active one."""
    if which is None:
        return _active
    if which == "python":
        return fallback
    if which == "cython":
        if compiled is None:
            raise ImportError("compiled kernels are not available")
        return compiled
    raise ValueError(f"unknown backend {which!r}")


def fill_draws(bit_generator, code, params, count):
    return _active.fill_draws(bit_generator, int(code), params, int(count))


def mc_accumulate(bit_generator, code, params, center, reps, checkpoints, antithetic,
                  plain_out, cv_out):
    return _active.mc_accumulate(bit_generator, int(code), params, float(center), int(reps),
                                 checkpoints, bool(antithetic), plain_out, cv_out)
