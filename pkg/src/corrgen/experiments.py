"""Batch experiment harness.

Each experiment sweeps seeded runs and writes one CSV artifact; plotting
is a separate consumer of these files. Reruns with the same config are
byte-identical except for the wall_time_s column.

Seeding scheme: the run seed is ``base_seed + run_index``; independent
streams are derived per purpose as ``default_rng((run_seed, tag, ...))``
with tag 0 for the graph (plus the density in thousandths), tag 1 for the
uniform seed matrix, and tag 2 for method-internal draws (plus the retry
attempt).

CSV schemas (all files start with '# key: value' metadata lines):

  comparison.csv  method,graph_model,density,b,seed,status,iterations,
                  wall_time_s,achieved_mean,min_eigenvalue,value
                  (one row per nonzero off-diagonal entry, upper triangle)
  feasibility.csv graph_model,density,b,runs,n_converged,proportion,no_solution
  graphtypes.csv  same schema as comparison.csv
  timing.csv      graph_model,density,b,seed,status,iterations,wall_time_s
  realdata.csv    source,density,b,status,achieved_mean,min_eigenvalue,value
"""

from __future__ import annotations

import json
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, replace

import numpy as np

from corrgen.baselines import (
    chordal_cholesky_sample,
    diagonal_dominance,
    partial_orthogonalization,
)
from corrgen.errors import DegenerateRow, InvalidInput
from corrgen.graphs import GRAPH_MODELS, Graph, build_graph, threshold_to_density, triangulate
from corrgen.linalg import SymMatrix, read_matrix_csv
from corrgen.solver import (
    GAP_FACTOR,
    GAP_REL_CHANGE,
    GAP_WINDOW,
    ProblemSpec,
    SolverStatus,
    edge_mean,
    solve,
    solve_with_guarantee,
)
from corrgen.validate import check_matrix

METHODS = ("diagdom", "chordal", "partial-orth", "convex")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep grids and solver parameters for the harness."""

    p: int = 51
    runs: int = 50
    base_seed: int = 1000
    graph_models: tuple[str, ...] = GRAPH_MODELS
    density_grid: tuple[float, ...] = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    b_grid: tuple[float, ...] = (-1.0, -0.5, 0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
    methods: tuple[str, ...] = ("diagdom", "partial-orth", "convex")
    comparison_density: float = 0.5
    graphtype_b: float = 0.2
    ws_beta: float = 0.3
    tol: float = 1e-7
    max_iter: int = 20000
    epsilon: float = 1e-8

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise InvalidInput("runs must be at least 1")
        if self.p < 2:
            raise InvalidInput("p must be at least 2")
        if any(not 0.0 < d <= 1.0 for d in self.density_grid):
            raise InvalidInput("densities must lie in (0, 1]")
        for model in self.graph_models:
            if model not in GRAPH_MODELS:
                raise InvalidInput(f"unknown graph model {model!r}")
        for method in self.methods:
            if method not in METHODS:
                raise InvalidInput(f"unknown method {method!r}")

    @classmethod
    def quick(cls, **overrides) -> "ExperimentConfig":
        """CI-scale profile."""
        merged = {"p": 20, "runs": 10}
        merged.update(overrides)
        return cls(**merged)

    def metadata(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class RunRecord:
    method: str
    graph_model: str
    density: float
    b: float
    seed: int
    status: str
    iterations: int
    wall_time_s: float
    achieved_mean: float
    min_eigenvalue: float
    nonzero_offdiag_values: tuple[float, ...]


def uniform_seed_matrix(p: int, seed) -> SymMatrix:
    """Symmetric matrix with off-diagonal entries U[-1, 1] and unit diagonal."""
    rng = np.random.default_rng(seed)
    m = np.zeros((p, p))
    iu, ju = np.triu_indices(p, k=1)
    vals = rng.uniform(-1.0, 1.0, size=iu.size)
    m[iu, ju] = vals
    m[ju, iu] = vals
    np.fill_diagonal(m, 1.0)
    return SymMatrix(m)


def _workers() -> int:
    env = os.environ.get("CORRGEN_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _run_task(task: dict) -> tuple[RunRecord, list[str]]:
    """Execute one generation run and validate the output matrix."""
    method = task["method"]
    p, d, b = task["p"], task["density"], task["b"]
    run_seed = task["run_seed"]
    dmil = int(round(1000 * d))
    graph = build_graph(task["graph_model"], p, d, (run_seed, 0, dmil), task["ws_beta"])
    eig_floor = -1e-6
    t0 = time.perf_counter()
    status = SolverStatus.CONVERGED.value
    iterations = 0
    min_eig = math.nan

    if method == "diagdom":
        mat = diagonal_dominance(graph, (run_seed, 2), perturb=task.get("perturb", False))
        eig_floor = -1e-10
    elif method == "chordal":
        graph = triangulate(graph, (run_seed, 2, 1))
        mat = chordal_cholesky_sample(graph, (run_seed, 2))
        eig_floor = -1e-10
    elif method == "partial-orth":
        mat = None
        for attempt in range(5):
            try:
                mat = partial_orthogonalization(graph, seed=(run_seed, 2, attempt))
                break
            except DegenerateRow:
                continue
        if mat is None:
            raise DegenerateRow(f"partial orthogonalization failed 5 retries (seed {run_seed})")
        eig_floor = -1e-10
    else:
        cbar = uniform_seed_matrix(p, (run_seed, 1))
        spec = ProblemSpec(
            graph=graph,
            seed_matrix=cbar,
            b=b,
            tol=task["tol"],
            max_iter=task["max_iter"],
            epsilon=task["epsilon"],
        )
        rep = solve_with_guarantee(spec) if task["post_process"] else solve(spec)
        mat = rep.matrix
        status = rep.status.value
        iterations = rep.iterations
        min_eig = rep.min_eigenvalue
        eig_floor = -1e-12 if task["post_process"] else -1e-6
    wall = time.perf_counter() - t0

    violations: list[str] = []
    values: tuple[float, ...] = ()
    mean = edge_mean(mat, graph)
    if status == SolverStatus.CONVERGED.value:
        checks = check_matrix(mat, graph, b=b, eig_floor=eig_floor)
        label = f"{method}/{task['graph_model']}/d={d}/b={b}/seed={run_seed}"
        violations = [f"{label}: {ch.describe()}" for ch in checks if not ch.passed]
        if math.isnan(min_eig):
            min_eig = next(ch.measured for ch in checks if ch.name == "min_eigenvalue")
        if task.get("collect_values", False):
            iu, ju = graph.edge_indices()
            entries = mat.values[iu, ju]
            values = tuple(float(x) for x in entries[entries != 0.0])
    record = RunRecord(
        method=method,
        graph_model=task["graph_model"],
        density=d,
        b=b,
        seed=run_seed,
        status=status,
        iterations=iterations,
        wall_time_s=wall,
        achieved_mean=float(mean),
        min_eigenvalue=float(min_eig),
        nonzero_offdiag_values=values,
    )
    return record, violations


def _dispatch(tasks: list[dict]) -> tuple[list[RunRecord], list[str]]:
    workers = _workers()
    if workers == 1 or len(tasks) <= 1:
        results = [_run_task(t) for t in tasks]
    else:
        chunk = max(1, len(tasks) // (workers * 4))
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_task, tasks, chunksize=chunk))
    records = [r for r, _ in results]
    violations = [v for _, vs in results for v in vs]
    return records, violations


def _fmt(x) -> str:
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _write_csv(path, metadata: dict, header: list[str], rows) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for key, value in metadata.items():
            fh.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def read_csv(path) -> tuple[dict, list[str], list[list[str]]]:
    """Read back a harness CSV: (metadata, header, rows)."""
    metadata: dict = {}
    header: list[str] = []
    rows: list[list[str]] = []
    with open(path, "r", encoding="ascii") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("# "):
                key, _, raw = line[2:].partition(": ")
                metadata[key] = json.loads(raw)
            elif not header:
                header = line.split(",")
            else:
                rows.append(line.split(","))
    return metadata, header, rows


_LONG_HEADER = [
    "method",
    "graph_model",
    "density",
    "b",
    "seed",
    "status",
    "iterations",
    "wall_time_s",
    "achieved_mean",
    "min_eigenvalue",
    "value",
]


def _long_rows(records: list[RunRecord]):
    for r in records:
        base = [
            r.method,
            r.graph_model,
            r.density,
            r.b,
            r.seed,
            r.status,
            r.iterations,
            r.wall_time_s,
            r.achieved_mean,
            r.min_eigenvalue,
        ]
        if r.nonzero_offdiag_values:
            for val in r.nonzero_offdiag_values:
                yield base + [val]
        else:
            yield base + [math.nan]


def exp_method_comparison(cfg: ExperimentConfig, out_path) -> tuple[list[RunRecord], list[str]]:
    """Entry-value distributions per method on ER graphs at the comparison
    density (the convex method runs unconstrained, b = -1)."""
    tasks = []
    for method in cfg.methods:
        for run in range(cfg.runs):
            tasks.append(
                {
                    "method": method,
                    "graph_model": "er",
                    "p": cfg.p,
                    "density": cfg.comparison_density,
                    "b": -1.0,
                    "run_seed": cfg.base_seed + run,
                    "ws_beta": cfg.ws_beta,
                    "tol": cfg.tol,
                    "max_iter": cfg.max_iter,
                    "epsilon": cfg.epsilon,
                    "post_process": True,
                    "collect_values": True,
                }
            )
    records, violations = _dispatch(tasks)
    meta = {"experiment": "comparison", "config": cfg.metadata()}
    _write_csv(out_path, meta, _LONG_HEADER, _long_rows(records))
    return records, violations


def exp_feasibility_sweep(cfg: ExperimentConfig, out_path) -> tuple[list[RunRecord], list[str]]:
    """Proportion of converged runs per (density, b) cell on ER graphs.

    The graph and seed matrix depend on (density, run) but not on b, so
    the feasible sets are nested along the b axis run by run.
    """
    tasks = []
    for d in cfg.density_grid:
        for b in cfg.b_grid:
            for run in range(cfg.runs):
                tasks.append(
                    {
                        "method": "convex",
                        "graph_model": "er",
                        "p": cfg.p,
                        "density": d,
                        "b": b,
                        "run_seed": cfg.base_seed + run,
                        "ws_beta": cfg.ws_beta,
                        "tol": cfg.tol,
                        "max_iter": cfg.max_iter,
                        "epsilon": cfg.epsilon,
                        "post_process": False,
                        "collect_values": False,
                    }
                )
    records, violations = _dispatch(tasks)
    rows = []
    idx = 0
    for d in cfg.density_grid:
        for b in cfg.b_grid:
            cell = records[idx : idx + cfg.runs]
            idx += cfg.runs
            n_conv = sum(r.status == SolverStatus.CONVERGED.value for r in cell)
            prop = n_conv / cfg.runs
            rows.append(["er", d, b, cfg.runs, n_conv, prop, prop == 0.0])
    meta = {
        "experiment": "feasibility",
        "config": cfg.metadata(),
        "detector": {
            "gap_window": GAP_WINDOW,
            "gap_rel_change": GAP_REL_CHANGE,
            "gap_threshold": f"{GAP_FACTOR}*tol",
        },
    }
    header = ["graph_model", "density", "b", "runs", "n_converged", "proportion", "no_solution"]
    _write_csv(out_path, meta, header, rows)
    return records, violations


def exp_graph_type_sweep(cfg: ExperimentConfig, out_path) -> tuple[list[RunRecord], list[str]]:
    """Entry-value distributions per graph model at density 0.5 with the
    mean bound active (b = 0.2 by default)."""
    tasks = []
    for model in cfg.graph_models:
        for run in range(cfg.runs):
            tasks.append(
                {
                    "method": "convex",
                    "graph_model": model,
                    "p": cfg.p,
                    "density": 0.5,
                    "b": cfg.graphtype_b,
                    "run_seed": cfg.base_seed + run,
                    "ws_beta": cfg.ws_beta,
                    "tol": cfg.tol,
                    "max_iter": cfg.max_iter,
                    "epsilon": cfg.epsilon,
                    "post_process": True,
                    "collect_values": True,
                }
            )
    records, violations = _dispatch(tasks)
    meta = {"experiment": "graphtypes", "config": cfg.metadata()}
    _write_csv(out_path, meta, _LONG_HEADER, _long_rows(records))
    return records, violations


def exp_timing(cfg: ExperimentConfig, out_path) -> tuple[list[RunRecord], list[str]]:
    """Solve wall time across models and densities at b = -1.

    Prints a median table; warns (does not fail) when the densest grid
    point is slower than the sparsest, since the expected trend is that
    denser patterns solve faster.
    """
    tasks = []
    for model in cfg.graph_models:
        for d in cfg.density_grid:
            for run in range(cfg.runs):
                tasks.append(
                    {
                        "method": "convex",
                        "graph_model": model,
                        "p": cfg.p,
                        "density": d,
                        "b": -1.0,
                        "run_seed": cfg.base_seed + run,
                        "ws_beta": cfg.ws_beta,
                        "tol": cfg.tol,
                        "max_iter": cfg.max_iter,
                        "epsilon": cfg.epsilon,
                        "post_process": False,
                        "collect_values": False,
                    }
                )
    records, violations = _dispatch(tasks)
    rows = [
        [r.graph_model, r.density, r.b, r.seed, r.status, r.iterations, r.wall_time_s]
        for r in records
    ]
    header = ["graph_model", "density", "b", "seed", "status", "iterations", "wall_time_s"]
    meta = {"experiment": "timing", "config": cfg.metadata()}
    _write_csv(out_path, meta, header, rows)
    d_lo, d_hi = min(cfg.density_grid), max(cfg.density_grid)
    for model in cfg.graph_models:
        med = {
            d: float(
                np.median(
                    [r.wall_time_s for r in records if r.graph_model == model and r.density == d]
                )
            )
            for d in cfg.density_grid
        }
        table = " ".join(f"d={d}:{med[d]:.3f}s" for d in cfg.density_grid)
        print(f"timing median [{model}] {table}")
        if med[d_hi] > med[d_lo]:
            print(
                f"WARN: [{model}] median time at d={d_hi} ({med[d_hi]:.3f}s) exceeds "
                f"d={d_lo} ({med[d_lo]:.3f}s); expected the denser grid to be faster",
                file=sys.stderr,
            )
    return records, violations


def exp_real_data(
    matrix_path, d: float, out_path, cfg: ExperimentConfig | None = None
) -> tuple[list[RunRecord], list[str]]:
    """Fit the generator to an externally supplied correlation matrix.

    Thresholds the input to density ``d``, sets b to the mean of the
    retained entries and the seed matrix to the input itself, then emits
    both empirical and generated entry lists for overlay plotting.
    """
    cfg = cfg or ExperimentConfig()
    empirical = read_matrix_csv(matrix_path)
    graph = threshold_to_density(empirical, d)
    b = edge_mean(empirical, graph)
    spec = ProblemSpec(
        graph=graph,
        seed_matrix=empirical,
        b=b,
        tol=cfg.tol,
        max_iter=cfg.max_iter,
        epsilon=cfg.epsilon,
    )
    rep = solve_with_guarantee(spec)
    iu, ju = graph.edge_indices()
    emp_vals = empirical.values[iu, ju]
    gen_vals = rep.matrix.values[iu, ju]
    rows = []
    for val in emp_vals[emp_vals != 0.0]:
        rows.append(["empirical", d, b, "input", b, math.nan, float(val)])
    for val in gen_vals[gen_vals != 0.0]:
        rows.append(
            [
                "generated",
                d,
                b,
                rep.status.value,
                rep.achieved_mean,
                rep.min_eigenvalue,
                float(val),
            ]
        )
    header = ["source", "density", "b", "status", "achieved_mean", "min_eigenvalue", "value"]
    meta = {"experiment": "realdata", "config": cfg.metadata(), "input": str(matrix_path)}
    _write_csv(out_path, meta, header, rows)
    violations = []
    if rep.status is SolverStatus.CONVERGED:
        checks = check_matrix(rep.matrix, graph, b=b, eig_floor=-1e-12)
        violations = [f"realdata: {ch.describe()}" for ch in checks if not ch.passed]
    record = RunRecord(
        method="convex",
        graph_model="threshold",
        density=d,
        b=float(b),
        seed=-1,
        status=rep.status.value,
        iterations=rep.iterations,
        wall_time_s=rep.wall_time,
        achieved_mean=rep.achieved_mean,
        min_eigenvalue=rep.min_eigenvalue,
        nonzero_offdiag_values=tuple(float(x) for x in gen_vals[gen_vals != 0.0]),
    )
    return [record], violations
