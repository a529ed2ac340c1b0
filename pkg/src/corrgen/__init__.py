"""corrgen: correlation matrices with prescribed graph sparsity patterns."""

from corrgen.backend import BACKEND
from corrgen.baselines import (
    chordal_cholesky_sample,
    diagonal_dominance,
    partial_orthogonalization,
)
from corrgen.errors import (
    CorrgenError,
    DegenerateRow,
    InvalidInput,
    NotChordal,
    NotPositiveDefinite,
    NumericalFailure,
)
from corrgen.graphs import (
    EliminationOrdering,
    Graph,
    build_graph,
    density,
    gen_barabasi_albert,
    gen_erdos_renyi,
    gen_sbm,
    gen_watts_strogatz,
    maximum_cardinality_search,
    threshold_to_density,
    triangulate,
)
from corrgen.linalg import (
    DEFAULT_SETTINGS,
    EigenDecomposition,
    NumericalSettings,
    SymMatrix,
    cholesky,
    eigh,
    frobenius_distance,
    project_psd,
    read_matrix_csv,
    write_matrix_csv,
)
from corrgen.solver import (
    ProblemSpec,
    SolverReport,
    SolverStatus,
    edge_mean,
    post_process,
    project_mean_halfspace,
    project_pattern,
    solve,
    solve_with_guarantee,
)

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "CorrgenError",
    "DegenerateRow",
    "InvalidInput",
    "NotChordal",
    "NotPositiveDefinite",
    "NumericalFailure",
    "DEFAULT_SETTINGS",
    "EigenDecomposition",
    "NumericalSettings",
    "SymMatrix",
    "cholesky",
    "eigh",
    "frobenius_distance",
    "project_psd",
    "read_matrix_csv",
    "write_matrix_csv",
    "EliminationOrdering",
    "Graph",
    "build_graph",
    "density",
    "gen_barabasi_albert",
    "gen_erdos_renyi",
    "gen_sbm",
    "gen_watts_strogatz",
    "maximum_cardinality_search",
    "threshold_to_density",
    "triangulate",
    "chordal_cholesky_sample",
    "diagonal_dominance",
    "partial_orthogonalization",
    "ProblemSpec",
    "SolverReport",
    "SolverStatus",
    "edge_mean",
    "post_process",
    "project_mean_halfspace",
    "project_pattern",
    "solve",
    "solve_with_guarantee",
    "__version__",
]
