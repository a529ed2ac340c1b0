"""Acceptance suite: every release criterion, one test each, at the
tolerances stated below. Prints one ACCEPTANCE PASS/FAIL line per
criterion (run with ``-s`` to see them live).

Scale notes: criteria that state a scale run at it (the constraint suite
and the distribution trend run every method over 50 seeds at p=51); the
feasibility, timing, and determinism criteria are scale-free properties
and run on reduced, fully documented grids so the whole suite stays
inside the runtime budget on one core.
"""

import time

import numpy as np
import pytest

from corrgen.experiments import (
    ExperimentConfig,
    _dispatch,
    exp_feasibility_sweep,
    exp_graph_type_sweep,
    exp_method_comparison,
    exp_timing,
    read_csv,
)
from corrgen.graphs import GRAPH_MODELS, Graph, gen_erdos_renyi
from corrgen.linalg import SymMatrix, eigh
from corrgen.solver import ProblemSpec, SolverStatus, solve, solve_with_guarantee
from oracles import grid_search_objective, small_instances

pytestmark = pytest.mark.acceptance

FULL_P = 51
FULL_RUNS = 50
TIMINGS: dict[str, float] = {}


def _report(name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {'PASS' if ok else 'FAIL'}: {name}" + (f" ({detail})" if detail else ""))
    assert ok, f"{name}: {detail}"


def _timed(name, fn):
    t0 = time.perf_counter()
    out = fn()
    TIMINGS[name] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="module")
def outdir(tmp_path_factory):
    return tmp_path_factory.mktemp("acceptance")


@pytest.fixture(scope="module")
def comparison(outdir):
    """Methods x 50 ER(p=51, d=0.5) seeds, convex at b=-1 (distribution-comparison data and
    the ER column of the constraint suite)."""
    cfg = ExperimentConfig(p=FULL_P, runs=FULL_RUNS)
    return _timed(
        "comparison", lambda: exp_method_comparison(cfg, outdir / "comparison.csv")
    )


@pytest.fixture(scope="module")
def graphtypes(outdir):
    """Convex runs over all five models at d=0.5, b=0.2, post-processed
    (graph-type sweep data and the convex column of the constraint suite)."""
    cfg = ExperimentConfig(p=FULL_P, runs=FULL_RUNS)
    return _timed(
        "graphtypes", lambda: exp_graph_type_sweep(cfg, outdir / "graphtypes.csv")
    )


@pytest.fixture(scope="module")
def baseline_suite():
    """The remaining method x model cells of the constraint suite:
    validation runs inside each task, violations surface here."""

    def build():
        tasks = []
        for method, models in (
            ("diagdom", ("ba", "ws", "sbm", "chordal")),
            ("partial-orth", ("ba", "ws", "sbm", "chordal")),
            ("chordal", GRAPH_MODELS),
        ):
            for model in models:
                for run in range(FULL_RUNS):
                    tasks.append(
                        {
                            "method": method,
                            "graph_model": model,
                            "p": FULL_P,
                            "density": 0.5,
                            "b": -1.0,
                            "run_seed": 1000 + run,
                            "ws_beta": 0.3,
                            "tol": 1e-7,
                            "max_iter": 20000,
                            "epsilon": 1e-8,
                            "post_process": False,
                            "collect_values": False,
                        }
                    )
        return _dispatch(tasks)

    return _timed("baseline_suite", build)


def test_constraint_suite(comparison, graphtypes, baseline_suite):
    """Criterion: every method x {ER, BA, WS, SBM, Chordal} x 50 seeds at
    p=51, d=0.5 yields unit diagonal within 1e-7, bit-exact zeros on
    non-edges, min eigenvalue >= -1e-6 (>= -1e-12 where post-processed,
    >= -1e-10 for the direct constructions), and entries within 1 + 1e-7.
    The per-matrix checks run inside the harness validator; any failure
    surfaces as a violation string here."""
    comp_records, comp_violations = comparison
    gt_records, gt_violations = graphtypes
    base_records, base_violations = baseline_suite
    violations = comp_violations + gt_violations + base_violations
    _report("constraint suite: no validator violations", violations == [], "; ".join(violations[:5]))

    cells = {(r.method, r.graph_model) for r in comp_records + gt_records + base_records}
    for method in ("diagdom", "partial-orth", "chordal", "convex"):
        for model in GRAPH_MODELS:
            assert (method, model) in cells, f"missing cell {(method, model)}"
    n_runs = len(comp_records) + len(gt_records) + len(base_records)
    _report(
        "constraint suite: full coverage",
        n_runs == 3 * FULL_RUNS + 5 * FULL_RUNS + 13 * FULL_RUNS,
        f"{n_runs} runs",
    )
    statuses = {r.status for r in gt_records}
    _report(
        "constraint suite: convex runs converged",
        statuses == {SolverStatus.CONVERGED.value},
        str(statuses),
    )


def test_oracle_equivalence():
    """Criterion: on 20 frozen instances with p <= 4 and <= 3 free
    entries, the solver objective matches a step-1e-3 grid-search oracle
    within 1e-3."""

    def run():
        worst = 0.0
        for p, edges, cbar, b in small_instances(20):
            rep = solve(ProblemSpec(graph=Graph(p, edges), seed_matrix=SymMatrix(cbar), b=b))
            assert rep.status is SolverStatus.CONVERGED
            oracle = grid_search_objective(p, edges, cbar, b)
            worst = max(worst, abs(rep.objective - oracle))
        return worst

    worst = _timed("oracle", run)
    _report("oracle equivalence on 20 small instances", worst <= 1e-3, f"worst |diff| = {worst:.2e}")


def test_oracle_path_graph():
    """Mandatory named instance: p=3 path (edges 01, 12), seed entries
    0.9. The feasible set in the free entries is the disk
    c01^2 + c12^2 <= 1, so the projection of (0.9, 0.9) is
    (1, 1)/sqrt(2)."""
    m = np.full((3, 3), 0.9)
    np.fill_diagonal(m, 1.0)
    edges = [(0, 1), (1, 2)]
    rep = solve(ProblemSpec(graph=Graph(3, edges), seed_matrix=SymMatrix(m)))
    oracle = grid_search_objective(3, edges, m, -1.0)
    diff = abs(rep.objective - oracle)
    r = 1 / np.sqrt(2)
    ok = (
        diff <= 1e-3
        and abs(rep.matrix.values[0, 1] - r) <= 1e-5
        and abs(rep.matrix.values[1, 2] - r) <= 1e-5
    )
    _report("oracle equivalence on the path-graph instance", ok, f"|diff| = {diff:.2e}")


def test_entry_distribution_trend(comparison):
    """Criterion (distribution comparison): at p=51, d=0.5 over 50 ER seeds, diagonal
    dominance concentrates near zero, so its median absolute entry lies
    below the convex method's."""
    records, _ = comparison
    med = {}
    for method in ("diagdom", "convex"):
        vals = np.concatenate(
            [r.nonzero_offdiag_values for r in records if r.method == method]
        )
        med[method] = float(np.median(np.abs(vals)))
    _report(
        "entry distribution trend (diagdom below convex)",
        med["diagdom"] < med["convex"],
        f"medians: diagdom={med['diagdom']:.4f}, convex={med['convex']:.4f}",
    )


@pytest.fixture(scope="module")
def feasibility(outdir):
    """Reduced documented grid: p=20, 8 runs, d in {0.1..0.9 step 0.2},
    b in {-1, -0.5, 0, 0.2, 0.4, 0.6, 0.8, 0.9}; grids and detector
    parameters are echoed in the CSV metadata."""
    cfg = ExperimentConfig(
        p=20,
        runs=8,
        base_seed=2000,
        density_grid=(0.1, 0.3, 0.5, 0.7, 0.9),
        b_grid=(-1.0, -0.5, 0.0, 0.2, 0.4, 0.6, 0.8, 0.9),
    )
    return cfg, _timed(
        "feasibility", lambda: exp_feasibility_sweep(cfg, outdir / "feasibility.csv")
    )


def test_feasibility_properties(feasibility, outdir):
    """Criterion (feasibility grid): the b=-1 column converges everywhere (identity
    certificate), proportions are nonincreasing in b at every density,
    and at least one high-b low-d cell reports 0.0.

    Zero-cell witness: on a path i-j-k, edge mean >= b close to 1 forces
    both edge entries toward 1, and PSD then forces the (i,k) entry to 1
    even though it must be 0 on the non-edge; sparse patterns contain
    many such paths, so the constraints cannot intersect."""
    cfg, _ = feasibility
    meta, header, rows = read_csv(outdir / "feasibility.csv")
    assert "detector" in meta and "config" in meta
    prop = {(float(r[1]), float(r[2])): float(r[5]) for r in rows}

    unconstrained = [prop[(d, -1.0)] for d in cfg.density_grid]
    _report(
        "feasibility: b=-1 column all 1.0",
        all(x == 1.0 for x in unconstrained),
        str(unconstrained),
    )

    monotone = all(
        prop[(d, b2)] <= prop[(d, b1)] + 1e-12
        for d in cfg.density_grid
        for b1, b2 in zip(cfg.b_grid, cfg.b_grid[1:])
    )
    _report("feasibility: proportion nonincreasing in b", monotone)

    zero_cells = [
        (d, b) for (d, b), v in prop.items() if v == 0.0 and d <= 0.3 and b >= 0.6
    ]
    _report(
        "feasibility: high-b low-d cell with proportion 0.0",
        len(zero_cells) > 0,
        f"zero cells: {sorted(zero_cells)[:4]}",
    )


def test_graph_type_mean_property(graphtypes):
    """Criterion (graph-type sweep): at b=0.2, d=0.5, converged runs of every model
    achieve edge mean >= 0.2 - 1e-6, and per-model sample means of the
    entries lie in [0.15, 0.30]."""
    records, _ = graphtypes
    details = []
    ok = True
    for model in GRAPH_MODELS:
        conv = [
            r
            for r in records
            if r.graph_model == model and r.status == SolverStatus.CONVERGED.value
        ]
        ok &= len(conv) > 0
        ok &= all(r.achieved_mean >= 0.2 - 1e-6 for r in conv)
        sample_mean = float(np.mean(np.concatenate([r.nonzero_offdiag_values for r in conv])))
        details.append(f"{model}={sample_mean:.3f}")
        ok &= 0.15 <= sample_mean <= 0.30
    _report("graph-type sweep mean property", ok, ", ".join(details))


def test_timing_soft_trend(outdir, capsys):
    """Criterion (timing trend): median solve time at the densest grid point
    should not exceed the sparsest; violations WARN instead of failing.
    Absolute times are machine-dependent and deliberately not compared
    to published numbers."""
    cfg = ExperimentConfig(
        p=20,
        runs=10,
        base_seed=3000,
        density_grid=(0.1, 0.5, 0.9),
    )
    records, violations = _timed(
        "timing", lambda: exp_timing(cfg, outdir / "timing.csv")
    )
    assert violations == []
    out = capsys.readouterr()
    warned = "WARN" in out.err
    med = {}
    for model in cfg.graph_models:
        for d in (0.1, 0.9):
            med[(model, d)] = float(
                np.median(
                    [r.wall_time_s for r in records if r.graph_model == model and r.density == d]
                )
            )
    trend = {m: med[(m, 0.9)] <= med[(m, 0.1)] for m in cfg.graph_models}
    detail = ", ".join(f"{m}: {med[(m, 0.1)]:.3f}s->{med[(m, 0.9)]:.3f}s" for m in cfg.graph_models)
    if not all(trend.values()) and not warned:
        _report("timing soft trend (WARN semantics)", False, "violation without WARN line")
    print(f"timing trend per model (d=0.1 vs d=0.9): {detail}")
    _report(
        "timing soft trend",
        all(r.status == SolverStatus.CONVERGED.value for r in records),
        f"trend holds: {trend}" + (" [WARN emitted]" if warned else ""),
    )


def test_postprocess_guarantee():
    """Criterion: with b=0.2 and epsilon=0.1, the tightened solve runs at
    b' = 0.22 and the normalized output still meets the original bound
    with a nonnegative spectrum (verified by eigendecomposition)."""

    def run():
        g = gen_erdos_renyi(30, 0.5, 4)
        rng = np.random.default_rng(44)
        m = np.zeros((30, 30))
        iu, ju = np.triu_indices(30, 1)
        vals = rng.uniform(-1, 1, iu.size)
        m[iu, ju] = vals
        m[ju, iu] = vals
        np.fill_diagonal(m, 1.0)
        cbar = SymMatrix(m)
        pre = solve(ProblemSpec(graph=g, seed_matrix=cbar, b=0.2 * 1.1))
        rep = solve_with_guarantee(
            ProblemSpec(graph=g, seed_matrix=cbar, b=0.2, epsilon=0.1)
        )
        lam = eigh(rep.matrix).min_eigenvalue
        return pre, rep, lam

    pre, rep, lam = _timed("footnote", run)
    ok = (
        pre.achieved_mean >= 0.22 - 1e-9
        and rep.status is SolverStatus.CONVERGED
        and rep.achieved_mean >= 0.2 - 1e-9
        and lam >= 0.0
    )
    _report(
        "post-processing guarantee (b=0.2, eps=0.1)",
        ok,
        f"pre-mean={pre.achieved_mean:.4f}, final mean={rep.achieved_mean:.4f}, min eig={lam:.2e}",
    )


def _strip_wall_time(path):
    meta, header, rows = read_csv(path)
    drop = [i for i, name in enumerate(header) if name == "wall_time_s"]
    for row in rows:
        for i in drop:
            row[i] = ""
    return meta, header, rows


def test_determinism(outdir):
    """Criterion: rerunning any experiment with the same config and base
    seed reproduces every non-timing CSV column byte for byte."""

    def run():
        tiny = ExperimentConfig(
            p=10,
            runs=2,
            base_seed=4000,
            density_grid=(0.3, 0.7),
            b_grid=(-1.0, 0.2),
            graph_models=("er", "ws"),
        )
        results = {}
        for tag in ("one", "two"):
            d = outdir / f"det_{tag}"
            d.mkdir(exist_ok=True)
            exp_method_comparison(tiny, d / "comparison.csv")
            exp_feasibility_sweep(tiny, d / "feasibility.csv")
            exp_graph_type_sweep(tiny, d / "graphtypes.csv")
            exp_timing(tiny, d / "timing.csv")
            results[tag] = {
                name: _strip_wall_time(d / f"{name}.csv")
                for name in ("comparison", "feasibility", "graphtypes", "timing")
            }
        return results

    results = _timed("determinism", run)
    ok = results["one"] == results["two"]
    _report("determinism of rerun artifacts", ok)


def test_z_runtime_budget():
    """Criterion rider: the constraint suite (comparison + graphtypes +
    baseline cells) finishes within the 30-minute budget."""
    suite_keys = ("comparison", "graphtypes", "baseline_suite")
    missing = [k for k in suite_keys if k not in TIMINGS]
    assert not missing, f"fixtures not timed: {missing}"
    total = sum(TIMINGS[k] for k in suite_keys)
    detail = ", ".join(f"{k}={TIMINGS.get(k, 0):.0f}s" for k in sorted(TIMINGS))
    _report("constraint suite runtime budget (< 1800 s)", total < 1800, detail)
