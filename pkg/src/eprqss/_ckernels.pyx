# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled state-vector kernels; same contracts as ``_kernels_py``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


cdef inline Py_ssize_t _insert1(Py_ssize_t r, int shift, Py_ssize_t b) nogil:
    cdef Py_ssize_t low = r & ((1 << shift) - 1)
    return ((r >> shift) << (shift + 1)) | (b << shift) | low


cdef inline double _abs2(double complex z) nogil:
    return z.real * z.real + z.imag * z.imag


def apply_1q(amps, int n, int k, u):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(u, dtype=np.complex128)
    out_arr = np.empty(1 << n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef int shift = n - 1 - k
    cdef Py_ssize_t r, i0, i1
    cdef double complex x0, x1
    for r in range(1 << (n - 1)):
        i0 = _insert1(r, shift, 0)
        i1 = i0 | (1 << shift)
        x0 = a[i0]
        x1 = a[i1]
        out[i0] = m[0, 0] * x0 + m[0, 1] * x1
        out[i1] = m[1, 0] * x0 + m[1, 1] * x1
    return out_arr


def apply_2q(amps, int n, int k1, int k2, u):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const double complex[:, ::1] m = np.ascontiguousarray(u, dtype=np.complex128)
    out_arr = np.empty(1 << n, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef int s1 = n - 1 - k1
    cdef int s2 = n - 1 - k2
    cdef int lo = s1 if s1 < s2 else s2
    cdef int hi = s1 if s1 > s2 else s2
    cdef Py_ssize_t r, base, idx[4]
    cdef double complex x[4]
    cdef int i, j
    for r in range(1 << (n - 2)):
        base = _insert1(_insert1(r, lo, 0), hi, 0)
        for i in range(4):
            idx[i] = base | ((i >> 1) << s1) | ((i & 1) << s2)
            x[i] = a[idx[i]]
        for i in range(4):
            out[idx[i]] = m[i, 0] * x[0] + m[i, 1] * x[1] + m[i, 2] * x[2] + m[i, 3] * x[3]
    return out_arr


def qubit_probs(amps, int n, int k):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef int shift = n - 1 - k
    cdef Py_ssize_t r, i0
    cdef double p0 = 0.0, p1 = 0.0
    for r in range(1 << (n - 1)):
        i0 = _insert1(r, shift, 0)
        p0 += _abs2(a[i0])
        p1 += _abs2(a[i0 | (1 << shift)])
    return p0, p1


def project_qubit(amps, int n, int k, vec):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef double complex v0 = vec[0].conjugate()
    cdef double complex v1 = vec[1].conjugate()
    out_arr = np.empty(1 << (n - 1), dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef int shift = n - 1 - k
    cdef Py_ssize_t r, i0
    for r in range(1 << (n - 1)):
        i0 = _insert1(r, shift, 0)
        out[r] = v0 * a[i0] + v1 * a[i0 | (1 << shift)]
    return out_arr


def pair_probs(amps, int n, int k1, int k2, basis):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const double complex[:, ::1] b = np.ascontiguousarray(np.conj(basis), dtype=np.complex128)
    probs_arr = np.zeros(b.shape[0], dtype=np.float64)
    cdef double[::1] probs = probs_arr
    cdef int s1 = n - 1 - k1
    cdef int s2 = n - 1 - k2
    cdef int lo = s1 if s1 < s2 else s2
    cdef int hi = s1 if s1 > s2 else s2
    cdef Py_ssize_t r, base, idx[4]
    cdef double complex x[4]
    cdef double complex ov
    cdef int i, m
    for r in range(1 << (n - 2)):
        base = _insert1(_insert1(r, lo, 0), hi, 0)
        for i in range(4):
            idx[i] = base | ((i >> 1) << s1) | ((i & 1) << s2)
            x[i] = a[idx[i]]
        for m in range(b.shape[0]):
            ov = b[m, 0] * x[0] + b[m, 1] * x[1] + b[m, 2] * x[2] + b[m, 3] * x[3]
            probs[m] += _abs2(ov)
    return probs_arr


def project_pair(amps, int n, int k1, int k2, vec):
    cdef const double complex[::1] a = np.ascontiguousarray(amps, dtype=np.complex128)
    cdef const double complex[::1] v = np.ascontiguousarray(np.conj(vec), dtype=np.complex128)
    out_arr = np.empty(1 << (n - 2), dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef int s1 = n - 1 - k1
    cdef int s2 = n - 1 - k2
    cdef int lo = s1 if s1 < s2 else s2
    cdef int hi = s1 if s1 > s2 else s2
    cdef Py_ssize_t r, base
    cdef double complex acc
    cdef int i
    for r in range(1 << (n - 2)):
        base = _insert1(_insert1(r, lo, 0), hi, 0)
        acc = 0
        for i in range(4):
            acc = acc + v[i] * a[base | ((i >> 1) << s1) | ((i & 1) << s2)]
        out[r] = acc
    return out_arr
