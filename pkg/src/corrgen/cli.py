"""corrgen command line interface.

Subcommands:
  generate    draw a graph (or read one) and generate a matrix by any method
  solve       project a seed matrix onto the constraint set of a given graph
  validate    check a matrix CSV against a graph file and mean bound
  experiment  run a harness sweep and write its CSV artifact

Exit codes: 0 success, 1 failed validation/hard invariant, 2 invalid
arguments or unreadable files, 3 suspected infeasibility, 4 numerical
failure. ``CORRGEN_THREADS`` caps the experiment worker pool.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from corrgen import experiments
from corrgen.errors import (
    CorrgenError,
    InvalidInput,
    NotChordal,
    NumericalFailure,
)
from corrgen.baselines import (
    chordal_cholesky_sample,
    diagonal_dominance,
    partial_orthogonalization,
)
from corrgen.experiments import ExperimentConfig, uniform_seed_matrix
from corrgen.graphs import (
    GRAPH_MODELS,
    Graph,
    build_graph,
    density,
    maximum_cardinality_search,
    read_graph,
    triangulate,
    write_graph,
)
from corrgen.linalg import eigh, read_matrix_csv, write_matrix_csv
from corrgen.solver import (
    ProblemSpec,
    SolverReport,
    SolverStatus,
    edge_mean,
    solve_with_guarantee,
)
from corrgen.validate import all_pass, check_matrix

EXIT_OK = 0
EXIT_FAILED_CHECK = 1
EXIT_INVALID = 2
EXIT_INFEASIBLE = 3
EXIT_NUMERICAL = 4


def _load_graph(args) -> Graph:
    if args.graph:
        return read_graph(args.graph)
    if not args.graph_model:
        raise InvalidInput("provide --graph FILE or --graph-model MODEL")
    if args.p is None or args.density is None:
        raise InvalidInput("--graph-model requires --p and --density")
    return build_graph(args.graph_model, args.p, args.density, (args.seed, 0), args.ws_beta)


def _seed_matrix(arg: str | None, p: int, default_seed: int):
    if arg is None or arg.startswith("uniform:"):
        seed = int(arg.split(":", 1)[1]) if arg else default_seed
        return uniform_seed_matrix(p, seed)
    mat = read_matrix_csv(arg)
    if mat.p != p:
        raise InvalidInput(f"seed matrix is {mat.p}x{mat.p}, graph has p={p}")
    return mat


def _write_report(report: SolverReport, path, extra: dict | None = None) -> None:
    payload = report.to_dict()
    if extra:
        payload.update(extra)
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _status_exit(status: SolverStatus) -> int:
    if status is SolverStatus.CONVERGED:
        return EXIT_OK
    if status is SolverStatus.INFEASIBLE_SUSPECTED:
        return EXIT_INFEASIBLE
    return EXIT_NUMERICAL


def cmd_generate(args) -> int:
    g = _load_graph(args)
    report_extra = {"method": args.method, "b": args.b}
    if args.method == "convex":
        cbar = _seed_matrix(args.seed_matrix, g.p, (args.seed, 1))
        spec = ProblemSpec(
            graph=g,
            seed_matrix=cbar,
            b=args.b,
            tol=args.tol,
            max_iter=args.max_iter,
            epsilon=args.epsilon,
        )
        rep = solve_with_guarantee(spec)
        mat, status = rep.matrix, rep.status
    else:
        if args.method == "chordal":
            _, is_chordal = maximum_cardinality_search(g)
            if not is_chordal:
                print(
                    "WARN: graph is not chordal; triangulating before sampling",
                    file=sys.stderr,
                )
                g = triangulate(g, (args.seed, 3))
            mat = chordal_cholesky_sample(g, (args.seed, 2))
        elif args.method == "diagdom":
            mat = diagonal_dominance(g, (args.seed, 2), perturb=args.perturb)
        else:
            mat = partial_orthogonalization(g, seed=(args.seed, 2))
        status = SolverStatus.CONVERGED
        dec = eigh(mat)
        rep = SolverReport(
            matrix=mat,
            status=status,
            iterations=0,
            min_eigenvalue=dec.min_eigenvalue,
            achieved_mean=edge_mean(mat, g),
            objective=float("nan"),
            wall_time=0.0,
        )
    write_matrix_csv(mat, args.out)
    if args.graph_out:
        write_graph(g, args.graph_out)
    if args.report:
        _write_report(rep, args.report, report_extra)
    _, is_chordal = maximum_cardinality_search(g)
    print(
        f"wrote {args.out}: p={g.p} |E|={g.edge_count} "
        f"density={density(g):.4f} chordal={is_chordal} status={status.value}"
    )
    return _status_exit(status)


def cmd_solve(args) -> int:
    g = read_graph(args.graph)
    cbar = _seed_matrix(args.seed_matrix, g.p, 0)
    spec = ProblemSpec(
        graph=g,
        seed_matrix=cbar,
        b=args.b,
        tol=args.tol,
        max_iter=args.max_iter,
        epsilon=args.epsilon,
    )
    rep = solve_with_guarantee(spec)
    write_matrix_csv(rep.matrix, args.out)
    if args.report:
        _write_report(rep, args.report)
    print(
        f"status={rep.status.value} iterations={rep.iterations} "
        f"objective={rep.objective:.6g} min_eig={rep.min_eigenvalue:.3e} "
        f"mean={rep.achieved_mean:.6g}"
    )
    return _status_exit(rep.status)


def cmd_validate(args) -> int:
    mat = read_matrix_csv(args.matrix)
    g = read_graph(args.graph)
    if mat.p != g.p:
        raise InvalidInput(f"matrix is {mat.p}x{mat.p}, graph has p={g.p}")
    checks = check_matrix(
        mat, g, b=args.b, eig_floor=args.eig_floor, pattern_tol=args.pattern_tol
    )
    for ch in checks:
        print(ch.describe())
    return EXIT_OK if all_pass(checks) else EXIT_FAILED_CHECK


def _experiment_config(args) -> ExperimentConfig:
    base = ExperimentConfig.quick() if args.quick else ExperimentConfig()
    overrides = {}
    if args.config:
        with open(args.config, "r", encoding="ascii") as fh:
            overrides.update(json.load(fh))
    for key in ("p", "runs", "base_seed", "tol", "max_iter", "epsilon"):
        val = getattr(args, key, None)
        if val is not None:
            overrides[key] = val
    if args.models:
        overrides["graph_models"] = tuple(args.models.split(","))
    if args.densities:
        overrides["density_grid"] = tuple(float(x) for x in args.densities.split(","))
    if args.b_grid:
        overrides["b_grid"] = tuple(float(x) for x in args.b_grid.split(","))
    merged = {**base.metadata(), **overrides}
    for key in ("graph_models", "density_grid", "b_grid", "methods"):
        merged[key] = tuple(merged[key])
    return ExperimentConfig(**merged)


def cmd_experiment(args) -> int:
    cfg = _experiment_config(args)
    os.makedirs(args.out_dir, exist_ok=True)
    out = os.path.join(args.out_dir, f"{args.name}.csv")
    if args.name == "comparison":
        _, violations = experiments.exp_method_comparison(cfg, out)
    elif args.name == "feasibility":
        _, violations = experiments.exp_feasibility_sweep(cfg, out)
    elif args.name == "graphtypes":
        _, violations = experiments.exp_graph_type_sweep(cfg, out)
    elif args.name == "timing":
        _, violations = experiments.exp_timing(cfg, out)
    else:
        if not args.matrix:
            raise InvalidInput("experiment realdata requires --matrix")
        _, violations = experiments.exp_real_data(args.matrix, args.density or 0.5, out, cfg)
    print(f"wrote {out}")
    for v in violations:
        print(f"INVARIANT VIOLATION {v}", file=sys.stderr)
    return EXIT_FAILED_CHECK if violations else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrgen",
        description="Generate correlation matrices with prescribed graph sparsity patterns.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pg = sub.add_parser("generate", help="generate a matrix with a chosen method")
    pg.add_argument("--method", required=True, choices=experiments.METHODS)
    pg.add_argument("--graph", help="edge-list file (alternative to --graph-model)")
    pg.add_argument("--graph-model", choices=GRAPH_MODELS)
    pg.add_argument("--p", type=int)
    pg.add_argument("--density", type=float)
    pg.add_argument("--ws-beta", type=float, default=0.3)
    pg.add_argument("--b", type=float, default=-1.0)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--perturb", action="store_true", help="diagdom: add a positive perturbation")
    pg.add_argument("--seed-matrix", help="convex: CSV path or uniform:SEED")
    pg.add_argument("--tol", type=float, default=1e-7)
    pg.add_argument("--max-iter", type=int, default=20000)
    pg.add_argument("--epsilon", type=float, default=1e-8)
    pg.add_argument("--out", required=True, help="output matrix CSV")
    pg.add_argument("--report", help="output report JSON")
    pg.add_argument("--graph-out", help="write the graph actually used")
    pg.set_defaults(func=cmd_generate)

    ps = sub.add_parser("solve", help="project a seed matrix onto the constraint set")
    ps.add_argument("--graph", required=True, help="edge-list file")
    ps.add_argument("--seed-matrix", required=True, help="CSV path or uniform:SEED")
    ps.add_argument("--b", type=float, default=-1.0)
    ps.add_argument("--tol", type=float, default=1e-7)
    ps.add_argument("--max-iter", type=int, default=20000)
    ps.add_argument("--epsilon", type=float, default=1e-8)
    ps.add_argument("--out", required=True)
    ps.add_argument("--report")
    ps.set_defaults(func=cmd_solve)

    pv = sub.add_parser("validate", help="check a matrix against a graph and mean bound")
    pv.add_argument("--matrix", required=True)
    pv.add_argument("--graph", required=True)
    pv.add_argument("--b", type=float, default=-1.0)
    pv.add_argument("--eig-floor", type=float, default=-1e-6)
    pv.add_argument("--pattern-tol", type=float, default=0.0)
    pv.set_defaults(func=cmd_validate)

    pe = sub.add_parser("experiment", help="run a harness sweep")
    pe.add_argument("name", choices=("comparison", "feasibility", "graphtypes", "timing", "realdata"))
    pe.add_argument("--quick", action="store_true", help="CI profile: p=20, runs=10")
    pe.add_argument("--config", help="JSON file with ExperimentConfig overrides")
    pe.add_argument("--p", type=int)
    pe.add_argument("--runs", type=int)
    pe.add_argument("--base-seed", dest="base_seed", type=int)
    pe.add_argument("--tol", type=float)
    pe.add_argument("--max-iter", dest="max_iter", type=int)
    pe.add_argument("--epsilon", type=float)
    pe.add_argument("--models", help="comma-separated graph models")
    pe.add_argument("--densities", help="comma-separated density grid")
    pe.add_argument("--b-grid", dest="b_grid", help="comma-separated b grid")
    pe.add_argument("--matrix", help="realdata: input correlation matrix CSV")
    pe.add_argument("--density", type=float, help="realdata: threshold density")
    pe.add_argument("--out-dir", default=".")
    pe.set_defaults(func=cmd_experiment)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidInput as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NotChordal as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except CorrgenError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
