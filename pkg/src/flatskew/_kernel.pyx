# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled level-stepping kernel; same contract as ``_pykernel.run_levels``
but on int64 arrays.  Callers check that all quantities fit first."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, int32_t, uint8_t

cnp.import_array()

DEF OK = 0
DEF HIT_SINGULAR = 1
DEF HIT_ENDPOINT = 2


cdef inline Py_ssize_t _upper(const int64_t[:] a, Py_ssize_t lo, Py_ssize_t hi, int64_t key) nogil:
    # first index in [lo, hi) with a[idx] > key
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] <= key:
            lo = mid + 1
        else:
            hi = mid
    return lo


cdef inline int64_t _floordiv(int64_t a, int64_t b) nogil:
    # C division truncates toward zero
    cdef int64_t qt = a // b
    if (a % b != 0) and ((a < 0) != (b < 0)):
        qt -= 1
    return qt


def run_levels_arrays(int64_t n, int32_t s, int64_t X, int64_t P, int64_t L,
                      const int32_t[:] nxt0, const int32_t[:] nxt1,
                      const int64_t[:] breaks, const int64_t[:] boff,
                      const int64_t[:, :] vals,
                      const int64_t[:] ends, const int64_t[:] eoff,
                      const uint8_t[:] singular):
    cdef Py_ssize_t dim = vals.shape[1]
    cdef cnp.ndarray[int64_t, ndim=1] acc_arr = np.zeros(dim, dtype=np.int64)
    cdef int64_t[:] acc = acc_arr
    cdef int64_t m0 = _floordiv(P, L)
    cdef int64_t i, Y, m
    cdef Py_ssize_t j, c, lo, hi
    cdef int status = OK
    cdef int64_t done = n
    with nogil:
        for i in range(n):
            lo = eoff[s]
            hi = eoff[s + 1]
            if hi > lo:
                j = _upper(ends, lo, hi, X) - 1
                if j >= lo and ends[j] == X:
                    status = HIT_ENDPOINT
                    done = i
                    break
            lo = boff[s]
            hi = boff[s + 1]
            if hi > lo:
                j = _upper(breaks, lo, hi, 2 * X) - 1
                if j >= lo:
                    for c in range(dim):
                        acc[c] += vals[j, c]
            Y = X + P
            m = _floordiv(Y, L)
            X = Y - m * L
            if m == m0:
                s = nxt0[s]
            else:
                s = nxt1[s]
            if X == 0 and singular[s]:
                status = HIT_SINGULAR
                done = i + 1
                break
    return acc_arr, s, X, status, done
