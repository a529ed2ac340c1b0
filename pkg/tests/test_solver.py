import cvxpy as cp
import numpy as np
import pytest

from corrgen.baselines import chordal_cholesky_sample
from corrgen.errors import InvalidInput
from corrgen.graphs import Graph, gen_erdos_renyi, triangulate
from corrgen.linalg import SymMatrix, eigh, frobenius_distance
from corrgen.solver import (
    ProblemSpec,
    SolverStatus,
    edge_mean,
    post_process,
    project_mean_halfspace,
    project_pattern,
    solve,
    solve_with_guarantee,
)
from oracles import grid_search_objective

PATH3 = Graph(3, [(0, 1), (1, 2)])


def path3_seed(offdiag=0.9):
    m = np.full((3, 3), offdiag)
    np.fill_diagonal(m, 1.0)
    return SymMatrix(m)


def uniform_sym(p, seed):
    rng = np.random.default_rng(seed)
    m = np.zeros((p, p))
    iu, ju = np.triu_indices(p, 1)
    vals = rng.uniform(-1, 1, iu.size)
    m[iu, ju] = vals
    m[ju, iu] = vals
    np.fill_diagonal(m, 1.0)
    return SymMatrix(m)


class TestProjectPattern:
    def test_fixed_point(self):
        g = gen_erdos_renyi(8, 0.5, 1)
        member = project_pattern(uniform_sym(8, 1), g)
        again = project_pattern(member, g)
        assert np.array_equal(member.values, again.values)

    def test_all_ones_empty_graph(self):
        out = project_pattern(SymMatrix(np.ones((4, 4))), Graph(4))
        assert np.array_equal(out.values, np.eye(4))

    def test_idempotent_random(self):
        g = gen_erdos_renyi(10, 0.3, 2)
        a = uniform_sym(10, 5)
        once = project_pattern(a, g)
        assert np.array_equal(once.values, project_pattern(once, g).values)

    def test_dimension_mismatch(self):
        with pytest.raises(InvalidInput):
            project_pattern(SymMatrix(np.eye(3)), Graph(4))


class TestProjectMeanHalfspace:
    def test_unchanged_when_satisfied(self):
        g = Graph(2, [(0, 1)])
        a = SymMatrix([[1.0, 0.7], [0.7, 1.0]])
        out = project_mean_halfspace(a, g, 0.5)
        assert out is a

    def test_single_edge_forced(self):
        g = Graph(2, [(0, 1)])
        a = SymMatrix([[1.0, 0.2], [0.2, 1.0]])
        out = project_mean_halfspace(a, g, 0.5)
        assert abs(out.values[0, 1] - 0.5) <= 1e-15

    def test_empty_graph_rejected(self):
        with pytest.raises(InvalidInput):
            project_mean_halfspace(SymMatrix(np.eye(3)), Graph(3), 0.2)

    @pytest.mark.parametrize("seed", range(6))
    def test_matches_qp_oracle(self, seed):
        """Projection in the 2|E|-dimensional edge space: cross-check the
        textbook halfspace projection formula and an interior-point QP."""
        g = gen_erdos_renyi(9, 0.4, seed)
        a = uniform_sym(9, seed + 50)
        b = 0.45
        out = project_mean_halfspace(a, g, b)
        iu, ju = g.edge_indices()
        vec = a.values[iu, ju]
        # x + max(0, b - a^T x) a / ||a||^2 with a = 1/n
        closed = vec + max(0.0, b - float(np.mean(vec)))
        np.testing.assert_allclose(out.values[iu, ju], closed, atol=1e-12)
        n = 2 * vec.size  # both orientations of every edge
        x = cp.Variable(n)
        target = np.concatenate([vec, vec])
        qp = cp.Problem(cp.Minimize(cp.sum_squares(x - target)), [cp.sum(x) / n >= b])
        qp.solve(solver="CLARABEL")
        np.testing.assert_allclose(out.values[iu, ju], x.value[: vec.size], atol=1e-9)
        np.testing.assert_allclose(out.values[ju, iu], x.value[vec.size :], atol=1e-9)


class TestSolve:
    def test_member_is_fixed_point(self):
        g = triangulate(gen_erdos_renyi(10, 0.4, 3), 3)
        member = chordal_cholesky_sample(g, 3)
        rep = solve(ProblemSpec(graph=g, seed_matrix=member))
        assert rep.status is SolverStatus.CONVERGED
        assert rep.objective <= 1e-12
        assert frobenius_distance(rep.matrix, member) <= 1e-6

    def test_empty_graph_gives_identity(self):
        rep = solve(ProblemSpec(graph=Graph(5), seed_matrix=uniform_sym(5, 9)))
        assert rep.status is SolverStatus.CONVERGED
        assert np.max(np.abs(rep.matrix.values - np.eye(5))) <= 1e-6

    def test_path3_matches_grid_oracle(self):
        """Mandatory named instance: the feasible set in the two free
        entries is the disk c01^2 + c12^2 <= 1; the projection of
        (0.9, 0.9) lands at (1/sqrt 2, 1/sqrt 2)."""
        rep = solve(ProblemSpec(graph=PATH3, seed_matrix=path3_seed()))
        assert rep.status is SolverStatus.CONVERGED
        r = 1 / np.sqrt(2)
        np.testing.assert_allclose(rep.matrix.values[0, 1], r, atol=1e-5)
        np.testing.assert_allclose(rep.matrix.values[1, 2], r, atol=1e-5)
        oracle = grid_search_objective(3, [(0, 1), (1, 2)], path3_seed().values, -1.0)
        assert abs(rep.objective - oracle) <= 1e-3

    def test_path3_b_one_infeasible(self):
        # mean >= 1 forces both edges to 1, hence c02 = 1 on a non-edge
        rep = solve(ProblemSpec(graph=PATH3, seed_matrix=path3_seed(), b=1.0))
        assert rep.status is SolverStatus.INFEASIBLE_SUSPECTED

    def test_converged_postconditions(self):
        g = gen_erdos_renyi(15, 0.5, 7)
        rep = solve(ProblemSpec(graph=g, seed_matrix=uniform_sym(15, 8), b=0.1))
        assert rep.status is SolverStatus.CONVERGED
        vals = rep.matrix.values
        assert np.max(np.abs(np.diag(vals) - 1.0)) <= 1e-7
        iu, ju = g.nonedge_indices()
        assert np.max(np.abs(vals[iu, ju])) == 0.0
        assert rep.min_eigenvalue >= -1e-6
        assert rep.achieved_mean >= 0.1 - 1e-6
        assert np.max(np.abs(vals)) <= 1.0 + 1e-7

    def test_validates_spec(self):
        with pytest.raises(InvalidInput):
            ProblemSpec(graph=Graph(3), seed_matrix=SymMatrix(np.eye(4)))
        with pytest.raises(InvalidInput):
            ProblemSpec(graph=PATH3, seed_matrix=SymMatrix(np.eye(3)), tol=0.0)
        with pytest.raises(InvalidInput):
            ProblemSpec(graph=PATH3, seed_matrix=SymMatrix(np.eye(3)), max_iter=0)
        with pytest.raises(InvalidInput):
            ProblemSpec(graph=Graph(3), seed_matrix=SymMatrix(np.eye(3)), b=0.5)

    @pytest.mark.parametrize("seed", range(8))
    def test_feasibility_certificate_unconstrained(self, seed):
        # b <= -1 is always feasible: the identity satisfies every constraint
        rng = np.random.default_rng(seed)
        g = gen_erdos_renyi(int(rng.integers(2, 14)), float(rng.uniform(0, 1)), seed)
        rep = solve(ProblemSpec(graph=g, seed_matrix=uniform_sym(g.p, seed)))
        assert rep.status is SolverStatus.CONVERGED

    def test_objective_monotone_in_b(self):
        g = gen_erdos_renyi(10, 0.5, 12)
        cbar = uniform_sym(10, 13)
        objs = []
        for b in (-1.0, 0.0, 0.1, 0.2, 0.3, 0.4):
            rep = solve(ProblemSpec(graph=g, seed_matrix=cbar, b=b))
            assert rep.status is SolverStatus.CONVERGED
            objs.append(rep.objective)
        assert all(b2 >= b1 - 1e-9 for b1, b2 in zip(objs, objs[1:]))

    def test_bound_implication(self):
        rep = solve(ProblemSpec(graph=gen_erdos_renyi(12, 0.5, 1), seed_matrix=uniform_sym(12, 2)))
        assert np.max(np.abs(rep.matrix.values)) <= 1.0 + 1e-7

    @pytest.mark.parametrize("idx", range(3))
    def test_small_instance_grid_oracle(self, idx):
        # spot checks here; the full 20-instance battery runs in acceptance
        cases = [
            (3, [(0, 1)], -1.0, 101),
            (4, [(0, 1), (2, 3)], 0.0, 102),
            (4, [(0, 1), (1, 2), (0, 2)], 0.2, 103),
        ]
        p, edges, b, seed = cases[idx]
        cbar = uniform_sym(p, seed)
        rep = solve(ProblemSpec(graph=Graph(p, edges), seed_matrix=cbar, b=b))
        assert rep.status is SolverStatus.CONVERGED
        oracle = grid_search_objective(p, edges, cbar.values, b)
        assert abs(rep.objective - oracle) <= 1e-3


class TestPostProcess:
    def test_epsilon_zero_unchanged(self):
        c = path3_seed(0.3)
        assert post_process(c, 0.0) is c

    def test_identity_unchanged(self):
        out = post_process(SymMatrix(np.eye(4)), 0.5)
        assert np.array_equal(out.values, np.eye(4))

    def test_lifts_slightly_negative_spectrum(self):
        # path pattern with c01 = c12 = r has min eigenvalue 1 - sqrt(2) r:
        # pick r so it sits at -1e-9, then a 1e-8 shift must clear zero
        r = (1.0 + 1e-9) / np.sqrt(2)
        m = np.eye(3)
        m[0, 1] = m[1, 0] = m[1, 2] = m[2, 1] = r
        c = SymMatrix(m)
        assert eigh(c).min_eigenvalue < 0
        out = post_process(c, 1e-8)
        assert eigh(out).min_eigenvalue >= 0
        assert out.values[0, 2] == 0.0

    def test_preserves_diag_and_scales_offdiag(self):
        c = path3_seed(0.5)
        out = post_process(c, 0.25)
        assert np.all(np.diag(out.values) == 1.0)
        np.testing.assert_allclose(out.values[0, 1], 0.5 / 1.25)

    def test_rejects_negative_epsilon(self):
        with pytest.raises(InvalidInput):
            post_process(SymMatrix(np.eye(2)), -0.1)

    def test_rejects_non_unit_diagonal(self):
        with pytest.raises(InvalidInput):
            post_process(SymMatrix(2 * np.eye(2)), 0.1)


class TestSolveWithGuarantee:
    def test_unconstrained_is_solve_plus_post(self):
        g = PATH3
        cbar = path3_seed(0.5)  # interior seed: solve returns it unchanged
        rep = solve_with_guarantee(ProblemSpec(graph=g, seed_matrix=cbar))
        plain = solve(ProblemSpec(graph=g, seed_matrix=cbar))
        recomposed = post_process(plain.matrix, rep.epsilon_used)
        assert np.array_equal(rep.matrix.values, recomposed.values)

    def test_boundary_solution_lifted(self):
        rep = solve_with_guarantee(ProblemSpec(graph=PATH3, seed_matrix=path3_seed()))
        assert rep.status is SolverStatus.CONVERGED
        assert rep.min_eigenvalue >= -1e-12
        assert eigh(rep.matrix).min_eigenvalue >= -1e-12

    def test_mean_bound_preserved(self):
        g = gen_erdos_renyi(15, 0.5, 20)
        rep = solve_with_guarantee(
            ProblemSpec(graph=g, seed_matrix=uniform_sym(15, 21), b=0.2)
        )
        assert rep.status is SolverStatus.CONVERGED
        assert rep.achieved_mean >= 0.2 - 1e-9
        assert rep.min_eigenvalue >= -1e-12

    def test_exaggerated_epsilon_footnote(self):
        # with eps = 0.1 the pre-normalization solve runs at b' = 0.22
        g = gen_erdos_renyi(15, 0.5, 22)
        cbar = uniform_sym(15, 23)
        spec = ProblemSpec(graph=g, seed_matrix=cbar, b=0.2, epsilon=0.1)
        pre = solve(ProblemSpec(graph=g, seed_matrix=cbar, b=0.2 * 1.1))
        assert pre.achieved_mean >= 0.22 - 1e-9
        rep = solve_with_guarantee(spec)
        assert rep.achieved_mean >= 0.2 - 1e-9
        assert rep.min_eigenvalue >= 0.0

    def test_infeasible_passthrough(self):
        rep = solve_with_guarantee(
            ProblemSpec(graph=PATH3, seed_matrix=path3_seed(), b=1.0)
        )
        assert rep.status is SolverStatus.INFEASIBLE_SUSPECTED

    def test_report_serializes(self):
        rep = solve_with_guarantee(ProblemSpec(graph=PATH3, seed_matrix=path3_seed(0.2)))
        payload = rep.to_dict()
        assert payload["status"] == "converged"
        assert set(payload) >= {"iterations", "min_eigenvalue", "objective", "wall_time_s"}
