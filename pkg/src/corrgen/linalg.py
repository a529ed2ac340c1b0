"""Dense symmetric linear algebra: eigendecomposition, PSD projection,
Cholesky, Frobenius distance, and the matrix CSV format.

Everything here is pure and operates on immutable values; the heavy loops
live in the selected kernel backend (see ``corrgen.backend``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corrgen import backend
from corrgen.errors import InvalidInput, NotPositiveDefinite, NumericalFailure


@dataclass(frozen=True)
class NumericalSettings:
    """Shared tolerances, overridable through the CLI.

    jacobi_tol: off-diagonal Frobenius target of the eigensolver, relative
        to ``||A||_F``.
    jacobi_max_sweeps: sweep budget before NumericalFailure.
    cholesky_pivot_floor: smallest acceptable Cholesky pivot.
    csv_symmetry_tol: max asymmetry accepted by the CSV reader.
    pattern_snap_tol: magnitude under which constrained entries snap to 0.
    """

    jacobi_tol: float = 1e-12
    jacobi_max_sweeps: int = 100
    cholesky_pivot_floor: float = 1e-12
    csv_symmetry_tol: float = 1e-9
    pattern_snap_tol: float = 1e-12


DEFAULT_SETTINGS = NumericalSettings()


class SymMatrix:
    """Dense symmetric p x p matrix.

    Symmetrized once on construction via ``(M + M^T) / 2`` and frozen; all
    operations treat instances as immutable values, so they are safe to
    share across threads.
    """

    __slots__ = ("values",)

    def __init__(self, values) -> None:
        arr = np.array(values, dtype=np.float64, copy=True, order="C")
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise InvalidInput(f"expected a square matrix, got shape {arr.shape}")
        if arr.shape[0] < 1:
            raise InvalidInput("matrix dimension must be at least 1")
        arr = (arr + arr.T) / 2.0
        arr.flags.writeable = False
        self.values = arr

    @property
    def p(self) -> int:
        return self.values.shape[0]

    @classmethod
    def identity(cls, p: int) -> "SymMatrix":
        return cls(np.eye(p))

    def __repr__(self) -> str:
        return f"SymMatrix(p={self.p})"


@dataclass(frozen=True)
class EigenDecomposition:
    """Eigenvalues sorted descending; eigenvectors as orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues[-1])


def _eigh_array(arr: np.ndarray, settings: NumericalSettings) -> tuple[np.ndarray, np.ndarray]:
    """Raw-array eigendecomposition used by the solver hot loop.

    Returns (eigenvalues descending, eigenvector columns).
    """
    if not np.all(np.isfinite(arr)):
        raise InvalidInput("matrix contains non-finite entries")
    w, v, _, converged = backend.jacobi_eigh(
        arr, settings.jacobi_tol, settings.jacobi_max_sweeps
    )
    if not converged:
        raise NumericalFailure(
            f"Jacobi eigensolver did not converge in {settings.jacobi_max_sweeps} sweeps"
        )
    order = np.argsort(w)[::-1]
    return w[order], v[:, order]


def eigh(a: SymMatrix, settings: NumericalSettings = DEFAULT_SETTINGS) -> EigenDecomposition:
    """Full eigendecomposition of a symmetric matrix (cyclic Jacobi)."""
    w, v = _eigh_array(a.values, settings)
    w.flags.writeable = False
    v.flags.writeable = False
    return EigenDecomposition(eigenvalues=w, eigenvectors=v)


def _project_psd_array(arr: np.ndarray, settings: NumericalSettings) -> np.ndarray:
    w, v = _eigh_array(arr, settings)
    out = (v * np.maximum(w, 0.0)) @ v.T
    return (out + out.T) / 2.0


def project_psd(a: SymMatrix, settings: NumericalSettings = DEFAULT_SETTINGS) -> SymMatrix:
    """Frobenius-nearest positive semidefinite matrix: clamp negative
    eigenvalues to zero and reassemble."""
    return SymMatrix(_project_psd_array(a.values, settings))


def min_eigenvalue(a: SymMatrix, settings: NumericalSettings = DEFAULT_SETTINGS) -> float:
    return eigh(a, settings).min_eigenvalue


def cholesky(a: SymMatrix, settings: NumericalSettings = DEFAULT_SETTINGS) -> np.ndarray:
    """Lower-triangular Cholesky factor L with ``L L^T == a``.

    Raises NotPositiveDefinite when a pivot falls at or below the
    configured floor.
    """
    if not np.all(np.isfinite(a.values)):
        raise InvalidInput("matrix contains non-finite entries")
    low, ok = backend.cholesky_lower(a.values, settings.cholesky_pivot_floor)
    if not ok:
        raise NotPositiveDefinite("matrix is not positive definite")
    return low


def frobenius_distance(a: SymMatrix, b: SymMatrix) -> float:
    """sqrt of the summed squared entrywise differences."""
    if a.p != b.p:
        raise InvalidInput(f"dimension mismatch: {a.p} vs {b.p}")
    return float(np.linalg.norm(a.values - b.values))


def read_matrix_csv(path, settings: NumericalSettings = DEFAULT_SETTINGS) -> SymMatrix:
    """Read a p x p matrix from headerless CSV.

    Validates symmetry within ``csv_symmetry_tol`` before symmetrizing.
    """
    try:
        arr = np.loadtxt(path, delimiter=",", dtype=np.float64, ndmin=2)
    except (OSError, ValueError) as exc:
        raise InvalidInput(f"cannot read matrix CSV {path}: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvalidInput(f"matrix CSV {path} is not square: shape {arr.shape}")
    asym = float(np.max(np.abs(arr - arr.T))) if arr.size else 0.0
    if asym > settings.csv_symmetry_tol:
        raise InvalidInput(
            f"matrix CSV {path} is asymmetric beyond tolerance: {asym:.3g}"
        )
    return SymMatrix(arr)


def write_matrix_csv(a: SymMatrix, path) -> None:
    """Write as headerless CSV with shortest round-trip float formatting."""
    with open(path, "w", encoding="ascii") as fh:
        for row in a.values:
            fh.write(",".join(repr(float(x)) for x in row))
            fh.write("\n")
