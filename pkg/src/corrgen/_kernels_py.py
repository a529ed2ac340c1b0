"""Pure NumPy fallback for the compiled kernels.

Same algorithms as ``corrgen._kernels`` (cyclic Jacobi eigensolver and a
row-oriented Cholesky), written with array slicing instead of C loops.
Selected automatically when the extension is missing or when
``CORRGEN_PURE_PYTHON=1``; expect it to be one to two orders of magnitude
slower on the Jacobi sweep (see ``benchmarks/bench_kernels.py``).
"""

import math

import numpy as np

BACKEND_NAME = "python"


def _off_norm(a: np.ndarray) -> float:
    # Frobenius norm of the strict off-diagonal part. Summing the
    # off-diagonal directly avoids the cancellation that a
    # ||A||^2 - ||diag||^2 formulation hits near convergence.
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def jacobi_eigh(a: np.ndarray, tol: float, max_sweeps: int):
    """Cyclic Jacobi diagonalization of a symmetric matrix.

    Sweeps row-cyclically over the strict upper triangle, rotating away each
    pivot larger than ``tol * ||A||_F / p``. Stops when the off-diagonal
    Frobenius norm drops to ``tol * ||A||_F``.

    Returns ``(w, v, sweeps, converged)`` with unsorted eigenvalues ``w`` and
    the accumulated rotation ``v`` (columns are eigenvectors, ``a = v w v^T``).
    """
    a = np.array(a, dtype=np.float64, order="C", copy=True)
    p = a.shape[0]
    v = np.eye(p)
    norm_a = float(np.linalg.norm(a))
    if p == 1 or norm_a == 0.0:
        return np.diag(a).copy(), v, 0, True
    stop = tol * norm_a
    skip = stop / p
    sweeps = 0
    converged = _off_norm(a) <= stop
    while not converged and sweeps < max_sweeps:
        for i in range(p - 1):
            for j in range(i + 1, p):
                aij = a[i, j]
                if abs(aij) <= skip:
                    continue
                theta = (a[j, j] - a[i, i]) / (2.0 * aij)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(1.0, theta))
                c = 1.0 / math.hypot(1.0, t)
                s = t * c
                col_i = a[:, i].copy()
                col_j = a[:, j].copy()
                a[:, i] = c * col_i - s * col_j
                a[:, j] = s * col_i + c * col_j
                row_i = a[i, :].copy()
                row_j = a[j, :].copy()
                a[i, :] = c * row_i - s * row_j
                a[j, :] = s * row_i + c * row_j
                a[i, j] = 0.0
                a[j, i] = 0.0
                col_i = v[:, i].copy()
                col_j = v[:, j].copy()
                v[:, i] = c * col_i - s * col_j
                v[:, j] = s * col_i + c * col_j
        sweeps += 1
        converged = _off_norm(a) <= stop
    return np.diag(a).copy(), v, sweeps, converged


def cholesky_lower(a: np.ndarray, pivot_floor: float):
    """Row-oriented Cholesky. Returns ``(L, ok)``; ``ok`` is False on a
    pivot at or below ``pivot_floor``."""
    a = np.asarray(a, dtype=np.float64)
    p = a.shape[0]
    low = np.zeros((p, p))
    for i in range(p):
        for j in range(i):
            s = a[i, j] - np.dot(low[i, :j], low[j, :j])
            low[i, j] = s / low[j, j]
        pivot = a[i, i] - np.dot(low[i, :i], low[i, :i])
        if not pivot > pivot_floor:
            return low, False
        low[i, i] = math.sqrt(pivot)
    return low, True
