# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kink-counting kernels.

Must stay bit-for-bit interchangeable with ``_reference.py``; see that module
for the semantics contract.  Insertion sort is fine here: one row is one
network, so the row length is the network width (tens, not thousands).
"""

import numpy as np

from libc.math cimport fabs
from libc.stdint cimport int64_t


cdef inline Py_ssize_t _row_candidates(
    const double* biases, const double* weights, Py_ssize_t width,
    double radius, double* buf,
) noexcept nogil:
    cdef Py_ssize_t j, m = 0
    cdef double x
    for j in range(width):
        # weight 0.0 gives inf/nan, which fails the radius test on its own
        x = -biases[j] / weights[j]
        if fabs(x) < radius:
            buf[m] = x
            m += 1
    return m


cdef inline void _insertion_sort(double* a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double v
    for i in range(1, n):
        v = a[i]
        j = i - 1
        while j >= 0 and a[j] > v:
            a[j + 1] = a[j]
            j -= 1
        a[j + 1] = v


cdef inline Py_ssize_t _merge_runs(double* a, Py_ssize_t n, double tol) noexcept nogil:
    # compact in place, keeping a[t] iff its gap to the previous *sorted*
    # element exceeds tol (write index never outruns the read index, so the
    # pending comparisons always see original values)
    cdef Py_ssize_t t, kept
    if n == 0:
        return 0
    kept = 1
    for t in range(1, n):
        if a[t] - a[t - 1] > tol:
            a[kept] = a[t]
            kept += 1
    return kept


def count_kinks_batch(biases, weights, double radius, double tol):
    """Per-row number of distinct kink positions strictly inside the domain."""
    b = np.ascontiguousarray(biases, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if b.ndim != 2 or b.shape != w.shape:
        raise ValueError("biases and weights must be equal-shape 2-D arrays")
    cdef const double[:, ::1] vb = b
    cdef const double[:, ::1] vw = w
    cdef Py_ssize_t rows = vb.shape[0]
    cdef Py_ssize_t width = vb.shape[1]
    counts = np.empty(rows, dtype=np.int64)
    cdef int64_t[::1] vc = counts
    buf = np.empty(max(width, 1), dtype=np.float64)
    cdef double[::1] vbuf = buf
    cdef Py_ssize_t i, m
    with nogil:
        for i in range(rows):
            m = _row_candidates(&vb[i, 0], &vw[i, 0], width, radius, &vbuf[0])
            _insertion_sort(&vbuf[0], m)
            vc[i] = _merge_runs(&vbuf[0], m, tol)
    return counts


def collect_kinks_batch(biases, weights, double radius, double tol):
    """Counts plus the flat row-major array of kink positions."""
    b = np.ascontiguousarray(biases, dtype=np.float64)
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if b.ndim != 2 or b.shape != w.shape:
        raise ValueError("biases and weights must be equal-shape 2-D arrays")
    cdef const double[:, ::1] vb = b
    cdef const double[:, ::1] vw = w
    cdef Py_ssize_t rows = vb.shape[0]
    cdef Py_ssize_t width = vb.shape[1]
    counts = np.empty(rows, dtype=np.int64)
    cdef int64_t[::1] vc = counts
    positions = np.empty(max(rows * width, 1), dtype=np.float64)
    cdef double[::1] vp = positions
    buf = np.empty(max(width, 1), dtype=np.float64)
    cdef double[::1] vbuf = buf
    cdef Py_ssize_t i, j, m, kept, total = 0
    with nogil:
        for i in range(rows):
            m = _row_candidates(&vb[i, 0], &vw[i, 0], width, radius, &vbuf[0])
            _insertion_sort(&vbuf[0], m)
            kept = _merge_runs(&vbuf[0], m, tol)
            for j in range(kept):
                vp[total] = vbuf[j]
                total += 1
            vc[i] = kept
    return counts, positions[:total].copy()
