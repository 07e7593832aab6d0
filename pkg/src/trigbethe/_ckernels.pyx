# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled monodromy kernels.

Same contract as ``_kernels_py.apply_entry``.  ``complex128`` arrays run in a
pure C loop; object arrays (exact rationals) loop in C over Python objects and
skip zero amplitudes.
"""

import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _ipow(Py_ssize_t b, Py_ssize_t e):
    cdef Py_ssize_t r = 1
    while e > 0:
        r *= b
        e -= 1
    return r


def _apply_complex(double complex[:] amps, int N, int L, int start, int end, sites,
                   fv, lo, hi, scale):
    cdef Py_ssize_t dim = _ipow(N, L)
    cdef double complex[:, :] buf = np.zeros((N, dim), dtype=np.complex128)
    cdef double complex[:, :] new = np.zeros((N, dim), dtype=np.complex128)
    cdef double complex[:, :] tmp
    cdef char[:] live = np.zeros(N, dtype=np.int8)
    cdef char[:] nlive = np.zeros(N, dtype=np.int8)
    cdef Py_ssize_t c, stride, a, b, k, kk
    cdef double complex x, f_k, lo_k, hi_k
    buf[start, :] = amps
    live[start] = 1
    for kk in range(len(sites)):
        k = sites[kk]
        stride = _ipow(N, k)
        f_k = fv[k]
        lo_k = lo[k]
        hi_k = hi[k]
        new[:, :] = 0
        nlive[:] = 0
        for a in range(N):
            if not live[a]:
                continue
            for c in range(dim):
                x = buf[a, c]
                if x == 0:
                    continue
                b = (c // stride) % N
                if a == b:
                    new[a, c] += f_k * x
                    nlive[a] = 1
                else:
                    new[a, c] += x
                    nlive[a] = 1
                    if b < a:
                        new[b, c + (a - b) * stride] += lo_k * x
                    else:
                        new[b, c + (a - b) * stride] += hi_k * x
                    nlive[b] = 1
        tmp = buf
        buf = new
        new = tmp
        live[:] = nlive
    out = np.asarray(buf[end, :]).copy()
    return out * complex(scale)


def _apply_object(cnp.ndarray amps, int N, int L, int start, int end, sites,
                  fv, lo, hi, scale):
    cdef Py_ssize_t dim = _ipow(N, L)
    cdef list buf = [None] * N
    cdef list new
    cdef list row, trow, hrow
    cdef Py_ssize_t c, stride, a, b, k, kk
    cdef object x, f_k, lo_k, hi_k, zero
    zero = amps[0] * 0
    buf[start] = list(amps)
    for kk in range(len(sites)):
        k = sites[kk]
        stride = _ipow(N, k)
        f_k = fv[k]
        lo_k = lo[k]
        hi_k = hi[k]
        new = [None] * N
        for a in range(N):
            row = buf[a]
            if row is None:
                continue
            for c in range(dim):
                x = row[c]
                if not x:
                    continue
                b = (c // stride) % N
                trow = new[a]
                if trow is None:
                    trow = [zero] * dim
                    new[a] = trow
                if a == b:
                    trow[c] = trow[c] + f_k * x
                else:
                    trow[c] = trow[c] + x
                    hrow = new[b]
                    if hrow is None:
                        hrow = [zero] * dim
                        new[b] = hrow
                    if b < a:
                        hrow[c + (a - b) * stride] = hrow[c + (a - b) * stride] + lo_k * x
                    else:
                        hrow[c + (a - b) * stride] = hrow[c + (a - b) * stride] + hi_k * x
        buf = new
    out = np.empty(dim, dtype=object)
    row = buf[end]
    if row is None:
        out[:] = zero
        return out
    for c in range(dim):
        out[c] = row[c] * scale
    return out


def apply_entry(amps, N, L, start, end, sites, fv, lo, hi, scale):
    if amps.ndim != 1 or amps.shape[0] != N**L:
        raise ValueError(f"state has shape {amps.shape}, expected ({N**L},)")
    if not (0 <= start < N and 0 <= end < N):
        raise ValueError("auxiliary indices out of range")
    if any(not 0 <= k < L for k in sites) or len(fv) < L or len(lo) < L or len(hi) < L:
        raise ValueError("site data out of range")
    if amps.dtype == np.complex128:
        return _apply_complex(amps, N, L, start, end, sites, fv, lo, hi, scale)
    return _apply_object(amps, N, L, start, end, sites, fv, lo, hi, scale)
