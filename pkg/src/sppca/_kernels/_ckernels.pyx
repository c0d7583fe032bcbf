# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: xoshiro256++ stream fills and cyclic Jacobi."""

from libc.math cimport sqrt, log, cos, sin, fabs
from libc.stdint cimport uint64_t

import numpy as np

cdef double TWO_PI = 6.283185307179586
cdef double TWO_M53 = 1.0 / 9007199254740992.0


cdef inline uint64_t rotl(uint64_t x, int k) noexcept nogil:
    return (x << k) | (x >> (64 - k))


cdef inline uint64_t next_u64(uint64_t[::1] s) noexcept nogil:
    cdef uint64_t result = rotl(s[0] + s[3], 23) + s[0]
    cdef uint64_t t = s[1] << 17
    s[2] ^= s[0]
    s[3] ^= s[1]
    s[1] ^= s[2]
    s[0] ^= s[3]
    s[2] ^= t
    s[3] = rotl(s[3], 45)
    return result


cdef inline double next_double(uint64_t[::1] s) noexcept nogil:
    return <double>(next_u64(s) >> 11) * TWO_M53


def fill_u64(uint64_t[::1] state, uint64_t[::1] out):
    cdef Py_ssize_t i
    with nogil:
        for i in range(out.shape[0]):
            out[i] = next_u64(state)


def fill_uniform(uint64_t[::1] state, double[::1] out):
    cdef Py_ssize_t i
    with nogil:
        for i in range(out.shape[0]):
            out[i] = next_double(state)


def fill_normal(uint64_t[::1] state, double[::1] out):
    cdef Py_ssize_t i = 0, n = out.shape[0]
    cdef double u1, u2, r, theta
    with nogil:
        while i < n:
            u1 = 1.0 - next_double(state)
            u2 = next_double(state)
            r = sqrt(-2.0 * log(u1))
            theta = TWO_PI * u2
            out[i] = r * cos(theta)
            if i + 1 < n:
                out[i + 1] = r * sin(theta)
            i += 2


def jacobi_eigh(a_in, double tol, int max_sweeps):
    """Cyclic Jacobi on a copy of ``a_in``; returns (eigenvalues, vectors, sweeps)."""
    cdef double[:, ::1] a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef Py_ssize_t n = a.shape[0]
    v_arr = np.eye(n, dtype=np.float64)
    cdef double[:, ::1] v = v_arr
    cdef Py_ssize_t p, q, k
    cdef double apq, tau, t, c, s, akp, akq, off, fro = 0.0
    cdef int sweep = 0

    for p in range(n):
        for q in range(n):
            fro += a[p, q] * a[p, q]
    fro = sqrt(fro)

    with nogil:
        while True:
            off = 0.0
            for p in range(n):
                for q in range(n):
                    if p != q:
                        off += a[p, q] * a[p, q]
            off = sqrt(off)
            if off <= tol * fro or sweep >= max_sweeps:
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if tau >= 0.0:
                        t = 1.0 / (tau + sqrt(1.0 + tau * tau))
                    else:
                        t = -1.0 / (-tau + sqrt(1.0 + tau * tau))
                    c = 1.0 / sqrt(1.0 + t * t)
                    s = t * c
                    for k in range(n):
                        akp = a[k, p]
                        akq = a[k, q]
                        a[k, p] = c * akp - s * akq
                        a[k, q] = s * akp + c * akq
                    for k in range(n):
                        akp = a[p, k]
                        akq = a[q, k]
                        a[p, k] = c * akp - s * akq
                        a[q, k] = s * akp + c * akq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    for k in range(n):
                        akp = v[k, p]
                        akq = v[k, q]
                        v[k, p] = c * akp - s * akq
                        v[k, q] = s * akp + c * akq
            sweep += 1

    w = np.array([a[k, k] for k in range(n)], dtype=np.float64)
    return w, v_arr, sweep
