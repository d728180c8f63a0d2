# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inference kernels. Call surface mirrors `_kernels_py`."""

import numpy as np

cimport numpy as cnp
from libc.math cimport exp

cnp.import_array()

DENOM_FLOOR = 1e-12

cdef double _FLOOR = 1e-12


def mf_values_point(double[::1] centers, double[::1] widths,
                    cnp.int64_t[::1] input_of, double[::1] x):
    cdef Py_ssize_t M = centers.shape[0]
    cdef cnp.ndarray[double, ndim=1] out = np.empty(M, dtype=np.float64)
    cdef double[::1] mv = out
    cdef Py_ssize_t j
    cdef double d
    for j in range(M):
        d = x[input_of[j]] - centers[j]
        mv[j] = exp(-(d * d) / (2.0 * widths[j] * widths[j]))
    return out


def firing_point(double[::1] centers, double[::1] widths,
                 cnp.int64_t[::1] input_of, cnp.int64_t[:, ::1] rule_mf,
                 double[::1] x):
    cdef Py_ssize_t R = rule_mf.shape[0]
    cdef Py_ssize_t n = rule_mf.shape[1]
    cdef cnp.ndarray[double, ndim=1] mf = mf_values_point(centers, widths, input_of, x)
    cdef double[::1] mv = mf
    cdef cnp.ndarray[double, ndim=1] out = np.empty(R, dtype=np.float64)
    cdef double[::1] ov = out
    cdef Py_ssize_t r, i
    cdef double w
    for r in range(R):
        w = 1.0
        for i in range(n):
            w *= mv[rule_mf[r, i]]
        ov[r] = w
    return out


def eval_point(double[::1] centers, double[::1] widths,
               cnp.int64_t[::1] input_of, cnp.int64_t[:, ::1] rule_mf,
               double[:, ::1] coeffs, double[::1] x):
    cdef Py_ssize_t R = rule_mf.shape[0]
    cdef Py_ssize_t n = rule_mf.shape[1]
    cdef Py_ssize_t M = centers.shape[0]
    cdef Py_ssize_t j, r, i
    cdef double d, w, g
    cdef double num = 0.0
    cdef double wsum = 0.0
    cdef double denom
    # stack buffer would need a fixed bound; M is small, heap alloc is fine
    cdef cnp.ndarray[double, ndim=1] mf = np.empty(M, dtype=np.float64)
    cdef double[::1] mv = mf
    for j in range(M):
        d = x[input_of[j]] - centers[j]
        mv[j] = exp(-(d * d) / (2.0 * widths[j] * widths[j]))
    for r in range(R):
        w = 1.0
        g = coeffs[r, 0]
        for i in range(n):
            w *= mv[rule_mf[r, i]]
            g += coeffs[r, i + 1] * x[i]
        num += w * g
        wsum += w
    denom = wsum if wsum > _FLOOR else _FLOOR
    return num / denom, wsum


def firing_batch(double[::1] centers, double[::1] widths,
                 cnp.int64_t[::1] input_of, cnp.int64_t[:, ::1] rule_mf,
                 double[:, ::1] X):
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t R = rule_mf.shape[0]
    cdef Py_ssize_t n = rule_mf.shape[1]
    cdef Py_ssize_t M = centers.shape[0]
    cdef cnp.ndarray[double, ndim=2] out = np.empty((N, R), dtype=np.float64)
    cdef double[:, ::1] ov = out
    cdef cnp.ndarray[double, ndim=1] mf = np.empty(M, dtype=np.float64)
    cdef double[::1] mv = mf
    cdef Py_ssize_t s, j, r, i
    cdef double d, w
    for s in range(N):
        for j in range(M):
            d = X[s, input_of[j]] - centers[j]
            mv[j] = exp(-(d * d) / (2.0 * widths[j] * widths[j]))
        for r in range(R):
            w = 1.0
            for i in range(n):
                w *= mv[rule_mf[r, i]]
            ov[s, r] = w
    return out


cdef class SquaredErrorObjective:
    """Callable (y(x) - target)^2 with the model arrays bound once."""

    cdef double[::1] centers
    cdef double[::1] widths
    cdef cnp.int64_t[::1] input_of
    cdef cnp.int64_t[:, ::1] rule_mf
    cdef double[:, ::1] coeffs
    cdef double[::1] mf_buf
    cdef double target

    def __init__(self, centers, widths, input_of, rule_mf, coeffs, target):
        self.centers = centers
        self.widths = widths
        self.input_of = input_of
        self.rule_mf = rule_mf
        self.coeffs = coeffs
        self.mf_buf = np.empty(centers.shape[0], dtype=np.float64)
        self.target = target

    def __call__(self, double[::1] x):
        cdef Py_ssize_t M = self.centers.shape[0]
        cdef Py_ssize_t R = self.rule_mf.shape[0]
        cdef Py_ssize_t n = self.rule_mf.shape[1]
        cdef Py_ssize_t j, r, i
        cdef double d, w, g
        cdef double num = 0.0
        cdef double wsum = 0.0
        cdef double denom, y
        for j in range(M):
            d = x[self.input_of[j]] - self.centers[j]
            self.mf_buf[j] = exp(-(d * d) / (2.0 * self.widths[j] * self.widths[j]))
        for r in range(R):
            w = 1.0
            g = self.coeffs[r, 0]
            for i in range(n):
                w *= self.mf_buf[self.rule_mf[r, i]]
                g += self.coeffs[r, i + 1] * x[i]
            num += w * g
            wsum += w
        denom = wsum if wsum > _FLOOR else _FLOOR
        y = num / denom
        return (y - self.target) * (y - self.target)


def eval_batch(double[::1] centers, double[::1] widths,
               cnp.int64_t[::1] input_of, cnp.int64_t[:, ::1] rule_mf,
               double[:, ::1] coeffs, double[:, ::1] X):
    cdef Py_ssize_t N = X.shape[0]
    cdef Py_ssize_t R = rule_mf.shape[0]
    cdef Py_ssize_t n = rule_mf.shape[1]
    cdef Py_ssize_t M = centers.shape[0]
    cdef cnp.ndarray[double, ndim=1] y = np.empty(N, dtype=np.float64)
    cdef cnp.ndarray[double, ndim=1] wsums = np.empty(N, dtype=np.float64)
    cdef double[::1] yv = y
    cdef double[::1] wv = wsums
    cdef cnp.ndarray[double, ndim=1] mf = np.empty(M, dtype=np.float64)
    cdef double[::1] mv = mf
    cdef Py_ssize_t s, j, r, i
    cdef double d, w, g, num, wsum, denom
    for s in range(N):
        for j in range(M):
            d = X[s, input_of[j]] - centers[j]
            mv[j] = exp(-(d * d) / (2.0 * widths[j] * widths[j]))
        num = 0.0
        wsum = 0.0
        for r in range(R):
            w = 1.0
            g = coeffs[r, 0]
            for i in range(n):
                w *= mv[rule_mf[r, i]]
                g += coeffs[r, i + 1] * X[s, i]
            num += w * g
            wsum += w
        denom = wsum if wsum > _FLOOR else _FLOOR
        yv[s] = num / denom
        wv[s] = wsum
    return y, wsums
