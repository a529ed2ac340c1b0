"""Literature baselines for pattern-constrained correlation matrices.

Three generators, all returning unit-diagonal PSD matrices with exact zeros
on the non-edges of the requested graph:

* ``diagonal_dominance`` — uniform edge weights, diagonal set to the row
  absolute sum (Gershgorin), then rescaled to unit diagonal. Tends to
  produce very small off-diagonal entries.
* ``chordal_cholesky_sample`` — draws a sparsity-respecting triangular
  factor under a perfect elimination labeling (chordal graphs only). The
  induced distribution over the feasible set is convenient, not uniform.
* ``partial_orthogonalization`` — starts from a matrix whose zeros are a
  subset of the target pattern (by default a chordal sample on the
  triangulated graph) and orthogonalizes factor rows until every non-edge
  inner product vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from corrgen.errors import DegenerateRow, InvalidInput, NotChordal, NumericalFailure
from corrgen.graphs import EliminationOrdering, Graph, maximum_cardinality_search, triangulate
from corrgen.linalg import DEFAULT_SETTINGS, NumericalSettings, SymMatrix, _eigh_array


def diagonal_dominance(g: Graph, seed, perturb: bool = False) -> SymMatrix:
    """Diagonally dominant construction, normalized to unit diagonal.

    Edge entries are U[-1, 1]; each diagonal entry is the absolute row sum,
    plus a U(0, 1) perturbation when ``perturb`` (making the result PD
    rather than PSD). Isolated vertices get diagonal 1 directly.
    """
    rng = np.random.default_rng(seed)
    p = g.p
    m = np.zeros((p, p))
    iu, ju = g.edge_indices()
    vals = rng.uniform(-1.0, 1.0, size=iu.size)
    m[iu, ju] = vals
    m[ju, iu] = vals
    diag = np.sum(np.abs(m), axis=1)
    if perturb:
        diag = diag + rng.uniform(0.0, 1.0, size=p)
    diag[diag == 0.0] = 1.0
    m[np.diag_indices(p)] = diag
    scale = 1.0 / np.sqrt(diag)
    c = m * scale[:, None] * scale[None, :]
    c[np.diag_indices(p)] = 1.0
    return SymMatrix(c)


@dataclass(frozen=True)
class CholeskyFactorPattern:
    """Sparsity-respecting triangular factor of a chordal-pattern sample.

    ``factor`` is upper triangular in the ``order`` labeling (reversed PEO,
    i.e. the MCS visit order), with unit-norm rows, positive diagonal, and
    zeros wherever the relabeled graph has a non-edge.
    """

    graph: Graph
    order: EliminationOrdering
    factor: np.ndarray


def sample_cholesky_factor(
    g: Graph, seed, settings: NumericalSettings = DEFAULT_SETTINGS
) -> CholeskyFactorPattern:
    """Draw the factor behind ``chordal_cholesky_sample``.

    Free entries are standard normal, the diagonal is |standard normal|,
    and every row is normalized to unit Euclidean norm.
    """
    peo, is_chordal = maximum_cardinality_search(g)
    if not is_chordal:
        raise NotChordal("chordal sampling requires a chordal graph")
    rng = np.random.default_rng(seed)
    p = g.p
    # Label vertices by reversed PEO: each vertex's smaller-labeled
    # neighbors then form a clique, which is exactly what makes U U^T
    # vanish on non-edges for an upper-triangular U.
    label_to_vertex = tuple(reversed(peo.order))
    vertex_to_label = {v: i for i, v in enumerate(label_to_vertex)}
    u = np.zeros((p, p))
    for i in range(p):
        d = abs(rng.standard_normal())
        u[i, i] = d if d > 1e-12 else 1e-12
    for a, b in g.edges:
        i, j = vertex_to_label[a], vertex_to_label[b]
        if i > j:
            i, j = j, i
        u[i, j] = rng.standard_normal()
    norms = np.linalg.norm(u, axis=1)
    u = u / norms[:, None]
    return CholeskyFactorPattern(
        graph=g, order=EliminationOrdering(label_to_vertex), factor=u
    )


def chordal_cholesky_sample(
    g: Graph, seed, settings: NumericalSettings = DEFAULT_SETTINGS
) -> SymMatrix:
    """Sample from the chordal-pattern correlation matrices via U U^T."""
    pat = sample_cholesky_factor(g, seed, settings)
    c_lab = pat.factor @ pat.factor.T
    perm = np.asarray(pat.order.order, dtype=np.intp)
    c = np.empty_like(c_lab)
    c[np.ix_(perm, perm)] = c_lab
    c[np.diag_indices(g.p)] = 1.0
    iu, ju = g.nonedge_indices()
    bad = np.abs(c[iu, ju]) > settings.pattern_snap_tol
    if np.any(bad):
        raise NumericalFailure("chordal sample produced fill above snap tolerance")
    c[iu, ju] = 0.0
    c[ju, iu] = 0.0
    return SymMatrix(c)


def partial_orthogonalization(
    g: Graph,
    initial: SymMatrix | None = None,
    seed=None,
    settings: NumericalSettings = DEFAULT_SETTINGS,
) -> SymMatrix:
    """Remove surplus edges of ``initial`` by row orthogonalization.

    Factors ``initial = Q Q^T`` through its eigendecomposition, then for
    each row in turn applies modified Gram-Schmidt against the earlier
    rows it must be orthogonal to (non-neighbors), repeating the pass
    until the inner products vanish: a single pass is not enough when the
    target rows are correlated with each other. Row ordering follows the
    vertex labels, so relabeling changes the output (but never its
    validity).

    ``initial`` must be PSD with unit diagonal and zeros only where the
    pattern allows them; by default it is a chordal sample on the
    triangulated graph.
    """
    if initial is None:
        initial = chordal_cholesky_sample(triangulate(g, seed), seed, settings)
    if initial.p != g.p:
        raise InvalidInput(f"initial matrix is {initial.p}x{initial.p}, graph has p={g.p}")
    w, v = _eigh_array(initial.values, settings)
    if w[-1] < -1e-8:
        raise InvalidInput(f"initial matrix is not PSD (min eigenvalue {w[-1]:.3g})")
    if np.max(np.abs(np.diag(initial.values) - 1.0)) > 1e-8:
        raise InvalidInput("initial matrix must have unit diagonal")
    # Eigenvalues at solver-noise level are true zeros of a rank-deficient
    # initial; keeping them would let noise masquerade as usable rows.
    w = np.where(w > 1e-12 * max(1.0, w[0]), w, 0.0)
    q = v * np.sqrt(w)
    nbrs = g.neighbor_sets()
    for i in range(1, g.p):
        targets = [j for j in range(i) if j not in nbrs[i]]
        if not targets:
            continue
        # The target rows are mutually correlated, so Gram-Schmidt passes
        # against them directly converge too slowly. Orthonormalizing a
        # scratch copy of the targets first makes the span projection
        # exact; the doubled inner pass is the usual reorthogonalization.
        ortho: list[np.ndarray] = []
        for vec in q[targets]:
            vec = vec.copy()
            for _ in range(2):
                for u in ortho:
                    vec = vec - (u @ vec) * u
            nrm = np.linalg.norm(vec)
            if nrm > 1e-12:
                ortho.append(vec / nrm)
        row = q[i]
        for _ in range(2):
            for u in ortho:
                row = row - (u @ row) * u
        if np.max(np.abs(q[targets] @ row)) > settings.pattern_snap_tol:
            raise NumericalFailure(
                f"row {i} orthogonalization stalled above snap tolerance"
            )
        norm = np.linalg.norm(row)
        if norm < 1e-10:
            raise DegenerateRow(
                f"row {i} collapsed during orthogonalization; retry with a new seed"
            )
        q[i] = row / norm
    c = q @ q.T
    iu, ju = g.nonedge_indices()
    c[iu, ju] = 0.0
    c[ju, iu] = 0.0
    c[np.diag_indices(g.p)] = 1.0
    return SymMatrix(c)
