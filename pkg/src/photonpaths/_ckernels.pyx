# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_pykernels`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport cos, sin

cnp.import_array()


def path_sum(coeffs, indptr, indices, theta):
    cdef double complex[::1] c = np.ascontiguousarray(coeffs, dtype=np.complex128)
    cdef long long[::1] ptr = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef long long[::1] idx = np.ascontiguousarray(indices, dtype=np.int64)
    cdef double[:, ::1] th = np.ascontiguousarray(theta, dtype=np.float64)
    cdef Py_ssize_t n_set = th.shape[0]
    cdef Py_ssize_t n_terms = c.shape[0]
    out_arr = np.zeros(n_set, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t s, t, j
    cdef double ph, re, im
    for s in range(n_set):
        re = 0.0
        im = 0.0
        for t in range(n_terms):
            ph = 0.0
            for j in range(ptr[t], ptr[t + 1]):
                ph += th[s, idx[j]]
            re += c[t].real * cos(ph) - c[t].imag * sin(ph)
            im += c[t].real * sin(ph) + c[t].imag * cos(ph)
        out[s] = re + 1j * im
    return out_arr


def sample_outcomes(cdf, uniforms):
    cdef double[::1] cd = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef double[::1] u = np.ascontiguousarray(uniforms, dtype=np.float64)
    cdef Py_ssize_t n = u.shape[0]
    cdef Py_ssize_t k_max = cd.shape[0] - 1
    out_arr = np.empty(n, dtype=np.int64)
    cdef long long[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double x
    for i in range(n):
        x = u[i]
        k = 0
        while k < k_max and not (x < cd[k]):
            k += 1
        out[i] = k
    return out_arr


def tally_pairs(trials, arms, detectors, Py_ssize_t n_detectors):
    cdef long long[::1] t = np.ascontiguousarray(trials, dtype=np.int64)
    cdef long long[::1] a = np.ascontiguousarray(arms, dtype=np.int64)
    cdef long long[::1] d = np.ascontiguousarray(detectors, dtype=np.int64)
    joint_arr = np.zeros((n_detectors, n_detectors), dtype=np.int64)
    singles_arr = np.zeros(n_detectors, dtype=np.int64)
    cdef long long[:, ::1] joint = joint_arr
    cdef long long[::1] singles = singles_arr
    cdef Py_ssize_t n = t.shape[0]
    cdef Py_ssize_t i = 0
    while i < n:
        if i + 1 >= n or t[i + 1] != t[i] or a[i] == a[i + 1]:
            return joint_arr, singles_arr, int(t[i]), True
        if i + 2 < n and t[i + 2] == t[i]:
            return joint_arr, singles_arr, int(t[i]), True
        if a[i] == 0:
            joint[d[i], d[i + 1]] += 1
        else:
            joint[d[i + 1], d[i]] += 1
        singles[d[i]] += 1
        singles[d[i + 1]] += 1
        i += 2
    return joint_arr, singles_arr, 0, False
