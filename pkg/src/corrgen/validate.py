"""Shared constraint validator for generated matrices.

Checks exactly the defining constraints: unit diagonal, entries in
[-1, 1], exact zeros on non-edges, positive semidefiniteness, and (when
requested) the edge-mean lower bound.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corrgen.graphs import Graph
from corrgen.linalg import DEFAULT_SETTINGS, NumericalSettings, SymMatrix, _eigh_array
from corrgen.solver import edge_mean


@dataclass(frozen=True)
class ConstraintCheck:
    name: str
    passed: bool
    measured: float
    limit: float

    def describe(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"{flag} {self.name}: measured={self.measured:.3e} limit={self.limit:.3e}"


def check_matrix(
    c: SymMatrix,
    g: Graph,
    b: float = -1.0,
    diag_tol: float = 1e-7,
    eig_floor: float = -1e-6,
    pattern_tol: float = 0.0,
    box_tol: float = 1e-7,
    mean_tol: float = 1e-6,
    settings: NumericalSettings = DEFAULT_SETTINGS,
) -> list[ConstraintCheck]:
    """Run all constraint checks; returns one record per constraint.

    ``pattern_tol`` defaults to 0: non-edge entries must be exact zeros.
    ``b <= -1`` skips the mean check.
    """
    checks = []
    vals = c.values

    diag_dev = float(np.max(np.abs(np.diag(vals) - 1.0)))
    checks.append(ConstraintCheck("unit_diagonal", diag_dev <= diag_tol, diag_dev, diag_tol))

    iu, ju = g.nonedge_indices()
    pat_dev = float(np.max(np.abs(vals[iu, ju]))) if iu.size else 0.0
    checks.append(ConstraintCheck("pattern_zeros", pat_dev <= pattern_tol, pat_dev, pattern_tol))

    w, _ = _eigh_array(vals, settings)
    lam = float(w[-1])
    checks.append(ConstraintCheck("min_eigenvalue", lam >= eig_floor, lam, eig_floor))

    box_dev = float(np.max(np.abs(vals)))
    checks.append(ConstraintCheck("entry_box", box_dev <= 1.0 + box_tol, box_dev, 1.0 + box_tol))

    if b > -1:
        m = edge_mean(vals, g)
        checks.append(ConstraintCheck("edge_mean", m >= b - mean_tol, m, b - mean_tol))

    return checks


def all_pass(checks: list[ConstraintCheck]) -> bool:
    return all(ch.passed for ch in checks)
