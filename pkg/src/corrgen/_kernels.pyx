# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot kernels: cyclic Jacobi eigensolver and Cholesky factorization.

Mirrors ``corrgen._kernels_py`` exactly; keep the two in sync.
"""

from libc.math cimport fabs, sqrt

import numpy as np

BACKEND_NAME = "cython"


cdef double _off_norm_sq(double[:, ::1] a, Py_ssize_t p) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(p - 1):
        for j in range(i + 1, p):
            acc += a[i, j] * a[i, j]
    return 2.0 * acc


cdef int _sweep(double[:, ::1] a, double[:, ::1] v, Py_ssize_t p, double skip) noexcept nogil:
    cdef Py_ssize_t i, j, k
    cdef double aij, theta, t, c, s, aki, akj, aii, ajj
    for i in range(p - 1):
        for j in range(i + 1, p):
            aij = a[i, j]
            if fabs(aij) <= skip:
                continue
            theta = (a[j, j] - a[i, i]) / (2.0 * aij)
            if theta >= 0.0:
                t = 1.0 / (theta + sqrt(1.0 + theta * theta))
            else:
                t = -1.0 / (-theta + sqrt(1.0 + theta * theta))
            c = 1.0 / sqrt(1.0 + t * t)
            s = t * c
            aii = a[i, i]
            ajj = a[j, j]
            for k in range(p):
                if k != i and k != j:
                    aki = a[k, i]
                    akj = a[k, j]
                    a[k, i] = c * aki - s * akj
                    a[i, k] = a[k, i]
                    a[k, j] = s * aki + c * akj
                    a[j, k] = a[k, j]
            a[i, i] = c * c * aii - 2.0 * s * c * aij + s * s * ajj
            a[j, j] = s * s * aii + 2.0 * s * c * aij + c * c * ajj
            a[i, j] = 0.0
            a[j, i] = 0.0
            for k in range(p):
                aki = v[k, i]
                akj = v[k, j]
                v[k, i] = c * aki - s * akj
                v[k, j] = s * aki + c * akj
    return 0


def jacobi_eigh(a_in, double tol, int max_sweeps):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Returns ``(w, v, sweeps, converged)``: unsorted eigenvalues, eigenvector
    columns (``a = v diag(w) v^T``), sweeps used, and whether the
    off-diagonal Frobenius norm reached ``tol * ||A||_F``.
    """
    a = np.array(a_in, dtype=np.float64, order="C", copy=True)
    cdef double[:, ::1] amv = a
    cdef Py_ssize_t p = amv.shape[0]
    v = np.eye(p, dtype=np.float64)
    cdef double[:, ::1] vmv = v
    cdef double norm_sq = 0.0, stop, skip
    cdef Py_ssize_t i, j
    cdef int sweeps = 0
    cdef bint converged
    if p == 1:
        return np.diag(a).copy(), v, 0, True
    with nogil:
        for i in range(p):
            for j in range(p):
                norm_sq += amv[i, j] * amv[i, j]
    if norm_sq == 0.0:
        return np.diag(a).copy(), v, 0, True
    stop = tol * sqrt(norm_sq)
    skip = stop / p
    converged = _off_norm_sq(amv, p) <= stop * stop
    with nogil:
        while not converged and sweeps < max_sweeps:
            _sweep(amv, vmv, p, skip)
            sweeps += 1
            converged = _off_norm_sq(amv, p) <= stop * stop
    return np.diag(a).copy(), v, sweeps, converged


def cholesky_lower(a_in, double pivot_floor):
    """Row-oriented Cholesky. Returns ``(L, ok)``; ``ok`` is False on a
    pivot at or below ``pivot_floor``."""
    a = np.ascontiguousarray(a_in, dtype=np.float64)
    cdef const double[:, ::1] amv = a
    cdef Py_ssize_t p = amv.shape[0]
    low = np.zeros((p, p), dtype=np.float64)
    cdef double[:, ::1] lmv = low
    cdef Py_ssize_t i, j, k
    cdef double s, pivot
    cdef bint ok = True
    with nogil:
        for i in range(p):
            for j in range(i):
                s = amv[i, j]
                for k in range(j):
                    s -= lmv[i, k] * lmv[j, k]
                lmv[i, j] = s / lmv[j, j]
            pivot = amv[i, i]
            for k in range(i):
                pivot -= lmv[i, k] * lmv[i, k]
            if not pivot > pivot_floor:
                ok = False
                break
            lmv[i, i] = sqrt(pivot)
    return low, ok
