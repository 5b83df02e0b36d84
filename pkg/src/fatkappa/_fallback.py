"""Pure numpy implementation of the sampling kernels.

Reads the uniform stream in the same order as the compiled kernels, so both
backends agree to floating-point round-off for a given bit generator state.
"""

from __future__ import annotations

import math

import numpy as np
from scipy import special

from .distributions import UNIFORMS_PER_DRAW

REFLECT = 1.0 - 2.0**-53
# Upper bound on doubles materialized per chunk.
_CHUNK_DOUBLES = 1 << 21


def _box_muller(u0, u1):
    return np.sqrt(-2.0 * np.log1p(-u0)) * np.cos(2.0 * math.pi * u1)


def transform(code: int, p: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Map uniforms ``u[..., k]`` to draws of family ``code``."""
    if code == 0:
        x = p[0] + p[1] * _box_muller(u[..., 0], u[..., 1])
    elif code == 1:
        x = p[1] * np.cos(2.0 * math.pi * u[..., 0]) * np.sqrt(
            p[0] * np.expm1((-2.0 / p[0]) * np.log1p(-u[..., 1])))
    elif code == 2:
        x = p[1] * np.exp((-1.0 / p[0]) * np.log1p(-u[..., 0]))
    elif code == 3:
        x = -np.log1p(-u[..., 0]) / p[0]
    elif code == 4:
        x = special.gammaincinv(p[0], u[..., 0]) / p[1]
    elif code == 5:
        x = np.exp(p[0] + p[1] * _box_muller(u[..., 0], u[..., 1]))
    elif code == 6:
        alpha = p[0]
        k = p[1] * math.tan(0.5 * math.pi * alpha)
        b = math.atan(k) / alpha
        s = (1.0 + k * k) ** (0.5 / alpha)
        v = math.pi * (u[..., 0] - 0.5)
        w = -np.log1p(-u[..., 1])
        a = alpha * (v + b)
        with np.errstate(divide="ignore"):
            x = s * np.sin(a) / np.cos(v) ** (1.0 / alpha) * (np.cos(v - a) / w) ** ((1.0 - alpha) / alpha)
        x = p[3] * x + p[2]
    elif code == 7:
        x = np.where(u[..., 0] < p[0], p[1], p[2]) * _box_muller(u[..., 1], u[..., 2])
    elif code == 8:
        z = _box_muller(u[..., 1], u[..., 2])
        first = u[..., 0] < p[0]
        x = np.where(first, p[1] + p[2] * z, p[3] + p[4] * z)
    else:
        raise ValueError(f"unknown sampler code {code}")
    return p[6] * x + p[7]


def fill_draws(bit_generator: np.random.BitGenerator, code: int, params: np.ndarray,
               count: int) -> np.ndarray:
    if code not in UNIFORMS_PER_DRAW:
        raise ValueError(f"unknown sampler code {code}")
    if count < 0:
        raise ValueError("count must be nonnegative")
    gen = np.random.Generator(bit_generator)
    k = UNIFORMS_PER_DRAW[code]
    return transform(code, np.asarray(params, dtype=float), gen.random((count, k)))


def mc_accumulate(bit_generator: np.random.BitGenerator, code: int, params: np.ndarray,
                  center: float, reps: int, checkpoints: np.ndarray, antithetic: bool,
                  plain_out: np.ndarray, cv_out: np.ndarray) -> None:
    """Numpy twin of the compiled ``mc_accumulate``; same contract."""
    checkpoints = np.asarray(checkpoints, dtype=np.int64)
    if checkpoints.size < 1 or np.any(checkpoints < 1) or np.any(np.diff(checkpoints) <= 0):
        raise ValueError("checkpoints must be positive and strictly increasing")
    if antithetic and reps % 2:
        raise ValueError("antithetic sampling needs an even replicate count")
    if code not in UNIFORMS_PER_DRAW:
        raise ValueError(f"unknown sampler code {code}")
    p = np.asarray(params, dtype=float)
    gen = np.random.Generator(bit_generator)
    k = UNIFORMS_PER_DRAW[code]
    nmax = int(checkpoints[-1])
    outer = reps // 2 if antithetic else reps
    idx = checkpoints - 1
    plain_out[:] = 0.0
    cv_out[:] = 0.0
    chunk = max(1, _CHUNK_DOUBLES // (nmax * k))
    done = 0
    while done < outer:
        m = min(chunk, outer - done)
        u = gen.random((m, nmax, k))
        sources = (u, REFLECT - u) if antithetic else (u,)
        for uu in sources:
            x = transform(code, p, uu) - center
            s = np.abs(np.cumsum(x, axis=1)[:, idx])
            a = np.cumsum(np.abs(x), axis=1)[:, idx]
            plain_out += s.sum(axis=0)
            cv_out += (s - a).sum(axis=0)
        done += m
