# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled occupation-basis kernels; interface mirrors ``_kernels_py``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt

cnp.import_array()


def occupation_table(dims):
    cdef Py_ssize_t nmodes = len(dims)
    cdef cnp.int64_t[:] d = np.asarray(dims, dtype=np.int64)
    cdef Py_ssize_t size = 1, i, idx, rem
    for i in range(nmodes):
        size *= d[i]
    out = np.empty((size, nmodes), dtype=np.int64)
    cdef cnp.int64_t[:, :] occ = out
    for idx in range(size):
        rem = idx
        for i in range(nmodes - 1, -1, -1):
            occ[idx, i] = rem % d[i]
            rem = rem // d[i]
    return out


cdef inline void _advance(cnp.int64_t[::1] digit, cnp.int64_t[::1] d, Py_ssize_t nouter, Py_ssize_t *parity):
    # odometer step over the modes before the target one, tracking their digit sum
    cdef Py_ssize_t i = nouter - 1
    while i >= 0:
        digit[i] += 1
        parity[0] += 1
        if digit[i] < d[i]:
            return
        parity[0] -= d[i]
        digit[i] = 0
        i -= 1


def ladder_coo(dims, Py_ssize_t mode, bint create, bint fermionic):
    cdef cnp.int64_t[::1] d = np.ascontiguousarray(dims, dtype=np.int64)
    cdef Py_ssize_t nmodes = d.shape[0], i, o, n, t, idx, nnz = 0, parity = 0
    cdef Py_ssize_t outer = 1, stride = 1, levels = d[mode]
    for i in range(mode):
        outer *= d[i]
    for i in range(mode + 1, nmodes):
        stride *= d[i]
    cdef Py_ssize_t size = outer * levels * stride
    cdef Py_ssize_t count = outer * (levels - 1) * stride
    rows_a = np.empty(count, dtype=np.int64)
    cols_a = np.empty(count, dtype=np.int64)
    vals_a = np.empty(count, dtype=np.complex128)
    cdef cnp.int64_t[::1] rows = rows_a
    cdef cnp.int64_t[::1] cols = cols_a
    cdef double complex[::1] vals = vals_a
    cdef cnp.int64_t[::1] digit = np.zeros(max(mode, 1), dtype=np.int64)
    cdef double v
    for o in range(outer):
        for n in range(levels):
            if create:
                if n == levels - 1:
                    continue
                v = sqrt(n + 1.0)
            else:
                if n == 0:
                    continue
                v = sqrt(<double> n)
            if fermionic and (parity & 1):
                v = -v
            idx = (o * levels + n) * stride
            for t in range(stride):
                cols[nnz] = idx + t
                rows[nnz] = idx + t + stride if create else idx + t - stride
                vals[nnz] = v
                nnz += 1
        _advance(digit, d, mode, &parity)
    return rows_a, cols_a, vals_a


def ladder_apply(amps, dims, Py_ssize_t mode, bint create, bint fermionic):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef cnp.int64_t[::1] d = np.ascontiguousarray(dims, dtype=np.int64)
    cdef Py_ssize_t nmodes = d.shape[0], i, o, n, t, idx, parity = 0
    cdef Py_ssize_t outer = 1, stride = 1, levels = d[mode]
    for i in range(mode):
        outer *= d[i]
    for i in range(mode + 1, nmodes):
        stride *= d[i]
    if a.shape[0] != outer * levels * stride:
        raise ValueError("amplitude vector does not match dims")
    out_a = np.zeros(a.shape[0], dtype=np.complex128)
    cdef double complex[::1] out = out_a
    cdef cnp.int64_t[::1] digit = np.zeros(max(mode, 1), dtype=np.int64)
    cdef double v, lost = 0.0
    cdef double complex z
    for o in range(outer):
        for n in range(levels):
            idx = (o * levels + n) * stride
            if create and n == levels - 1:
                if not fermionic:
                    for t in range(stride):
                        z = a[idx + t]
                        lost += (n + 1.0) * (z.real * z.real + z.imag * z.imag)
                continue
            if not create and n == 0:
                continue
            v = sqrt(n + 1.0) if create else sqrt(<double> n)
            if fermionic and (parity & 1):
                v = -v
            if create:
                for t in range(stride):
                    out[idx + t + stride] = v * a[idx + t]
            else:
                for t in range(stride):
                    out[idx + t - stride] = v * a[idx + t]
        _advance(digit, d, mode, &parity)
    return out_a, lost
