# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Fused sampling and partial-sum accumulation kernels.

The uniform stream is read in replicate-major order: for each replicate,
each summand consumes ``UNIFORMS_PER_DRAW[code]`` consecutive doubles. The
numpy fallback reads the same sequence through ``Generator.random``.

Uniforms are buffered in chunks and mapped to draws by the vectorized
transforms in ``_vecmath.h``; the partial sums are then accumulated in order.
"""

import numpy as np

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from libc.math cimport atan, fabs, pow, tan, M_PI
from libc.stdlib cimport free, malloc
from numpy.random cimport bitgen_t
from scipy.special.cython_special cimport gammaincinv

cdef extern from "_vecmath.h" nogil:
    void fk_transform(int code, const double *p, const double *d, const double *u,
                      double *out, long m)

cdef const char *CAPSULE_NAME = "BitGenerator"
# 1 - 2**-53: maps the [0, 1) grid of next_double onto itself in reverse.
cdef double REFLECT = 1.0 - 1.1102230246251565e-16
cdef enum:
    CHUNK = 2048  # draws per buffered chunk

cdef int[9] NU = [2, 2, 1, 1, 1, 2, 2, 3, 3]


cdef inline void prepare(int code, const double *p, double *d) noexcept nogil:
    cdef double k
    if code == 1:
        d[0] = -2.0 / p[0]
    elif code == 2:
        d[0] = -1.0 / p[0]
    elif code == 6:
        k = p[1] * tan(0.5 * M_PI * p[0])
        d[0] = atan(k) / p[0]
        d[1] = pow(1.0 + k * k, 0.5 / p[0])
        d[2] = 1.0 / p[0]
        d[3] = (1.0 - p[0]) / p[0]


cdef inline void transform_chunk(int code, const double *p, const double *d, const double *u,
                                 double *out, long m) noexcept nogil:
    cdef long i
    if code == 4:
        for i in range(m):
            out[i] = p[6] * (gammaincinv(p[0], u[i]) / p[1]) + p[7]
    else:
        fk_transform(code, p, d, u, out, m)


cdef inline void fill_uniforms(bitgen_t *rng, double *u, long count) noexcept nogil:
    cdef long i
    for i in range(count):
        u[i] = rng.next_double(rng.state)


cdef bitgen_t *get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("invalid bit generator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


def _check(int code, double[::1] params):
    if code < 0 or code > 8:
        raise ValueError(f"unknown sampler code {code}")
    if params.shape[0] != 8:
        raise ValueError("parameter vector must have length 8")


def fill_draws(object bit_generator, int code, double[::1] params, Py_ssize_t count):
    """Return ``count`` draws of family ``code``."""
    _check(code, params)
    if count < 0:
        raise ValueError("count must be nonnegative")
    cdef bitgen_t *rng = get_bitgen(bit_generator)
    out = np.empty(count, dtype=np.float64)
    if count == 0:
        return out
    cdef double[::1] o = out
    cdef double[4] d
    cdef int nu = NU[code]
    cdef Py_ssize_t done = 0, m
    cdef const double *p = &params[0]
    cdef double *ubuf = <double *> malloc(CHUNK * 3 * sizeof(double))
    if ubuf == NULL:
        raise MemoryError()
    prepare(code, p, d)
    try:
        with bit_generator.lock:
            with nogil:
                while done < count:
                    m = min(CHUNK, count - done)
                    fill_uniforms(rng, ubuf, m * nu)
                    transform_chunk(code, p, d, ubuf, &o[done], m)
                    done += m
    finally:
        free(ubuf)
    return out


def mc_accumulate(object bit_generator, int code, double[::1] params, double center,
                  Py_ssize_t reps, long long[::1] checkpoints, bint antithetic,
                  double[::1] plain_out, double[::1] cv_out):
    """Accumulate ``sum |S_k - k c|`` and ``sum (|S_k - k c| - sum_j |X_j - c|)``.

    ``checkpoints`` lists the summand counts ``k`` (ascending); the output
    arrays receive one sum over ``reps`` replicates per checkpoint. With
    ``antithetic`` every uniform ``u`` also drives a partner replicate at
    ``1 - 2**-53 - u`` and ``reps`` counts both members of each pair.
    """
    _check(code, params)
    cdef Py_ssize_t ncp = checkpoints.shape[0]
    if ncp < 1 or plain_out.shape[0] != ncp or cv_out.shape[0] != ncp:
        raise ValueError("checkpoint and output arrays must have equal nonzero length")
    if antithetic and reps % 2:
        raise ValueError("antithetic sampling needs an even replicate count")
    if reps < 0:
        raise ValueError("reps must be nonnegative")
    cdef Py_ssize_t k
    for k in range(ncp):
        if checkpoints[k] < 1 or (k and checkpoints[k] <= checkpoints[k - 1]):
            raise ValueError("checkpoints must be positive and strictly increasing")
    cdef bitgen_t *rng = get_bitgen(bit_generator)
    cdef double[4] d
    cdef int nu = NU[code]
    cdef Py_ssize_t nmax = checkpoints[ncp - 1]
    cdef Py_ssize_t outer = reps // 2 if antithetic else reps
    cdef Py_ssize_t total = outer * nmax, done = 0, m, t
    cdef Py_ssize_t i = 0, c = 0
    cdef double s = 0.0, a = 0.0, sa = 0.0, aa = 0.0, x
    cdef const double *p = &params[0]
    cdef const long long *cps = &checkpoints[0]
    cdef double *ubuf = <double *> malloc(CHUNK * 3 * sizeof(double))
    cdef double *xbuf = <double *> malloc(CHUNK * sizeof(double))
    cdef double *xabuf = <double *> malloc(CHUNK * sizeof(double))
    if ubuf == NULL or xbuf == NULL or xabuf == NULL:
        free(ubuf)
        free(xbuf)
        free(xabuf)
        raise MemoryError()
    prepare(code, p, d)
    for k in range(ncp):
        plain_out[k] = 0.0
        cv_out[k] = 0.0
    try:
        with bit_generator.lock:
            with nogil:
                # Flat stream of outer * nmax draws; i counts summands within a replicate.
                while done < total:
                    m = min(CHUNK, total - done)
                    fill_uniforms(rng, ubuf, m * nu)
                    transform_chunk(code, p, d, ubuf, xbuf, m)
                    if antithetic:
                        for t in range(m * nu):
                            ubuf[t] = REFLECT - ubuf[t]
                        transform_chunk(code, p, d, ubuf, xabuf, m)
                    for t in range(m):
                        i += 1
                        x = xbuf[t] - center
                        s += x
                        a += fabs(x)
                        if antithetic:
                            x = xabuf[t] - center
                            sa += x
                            aa += fabs(x)
                        if i == cps[c]:
                            plain_out[c] += fabs(s)
                            cv_out[c] += fabs(s) - a
                            if antithetic:
                                plain_out[c] += fabs(sa)
                                cv_out[c] += fabs(sa) - aa
                            c += 1
                            if c == ncp:
                                i = 0
                                c = 0
                                s = 0.0
                                a = 0.0
                                sa = 0.0
                                aa = 0.0
                    done += m
    finally:
        free(ubuf)
        free(xbuf)
        free(xabuf)
