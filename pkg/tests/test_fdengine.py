import math
from fractions import Fraction

import numpy as np
import pytest

from slfd import basicsolver, coeffmesh, fdengine, sincquad
from slfd.errors import DimensionMismatch, InvalidParameter, StagnationWarning


@pytest.fixture(scope="module")
def unit_problem():
    """qbar = 0 on one interval, K = 500, lowest eigenpair."""
    q = coeffmesh.Potential.from_text("x")
    mesh = coeffmesh.build_mesh(1)
    qbar = coeffmesh.approximate_coefficient(q, mesh)
    grid = sincquad.build_grid(mesh, 500)
    pair = basicsolver.solve_basic(0, qbar, grid)
    return q, qbar, grid, pair


class TestLambdaCorrection:
    def test_odd_integrand_vanishes(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        qdiff = grid.z.copy()
        lam1 = fdengine.compute_lambda_correction(1, u0, u0, qdiff, grid, pair.norm_sq)
        assert abs(lam1) <= 1e-12

    def test_zero_qdiff(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        lam = fdengine.compute_lambda_correction(3, u0, u0, np.zeros(grid.shape), grid, pair.norm_sq)
        assert lam == 0.0

    def test_second_correction_closed_form(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=2)
        assert sol.lambda_corrections[2] == pytest.approx(-1.0 / 6.0, abs=1e-8)

    def test_dimension_mismatch(self, unit_problem):
        _, _, grid, pair = unit_problem
        with pytest.raises(DimensionMismatch):
            fdengine.compute_lambda_correction(1, np.ones(3), np.ones(3), np.ones(3), grid, 1.0)


class TestComputeRhs:
    def test_direct_substitution(self):
        qdiff = np.linspace(-1, 1, 11).reshape(1, 11)
        u0 = np.full((1, 11), 2.0)
        f = fdengine.compute_rhs(1, np.array([0.0]), [u0], qdiff)
        assert f == pytest.approx(2.0 * qdiff)

    def test_zero_case(self):
        u0 = np.ones((2, 5))
        f = fdengine.compute_rhs(2, np.array([0.0, 0.0]), [u0, u0], np.zeros((2, 5)))
        assert np.all(f == 0.0)

    def test_includes_current_rank_term(self):
        u0 = np.ones((1, 4))
        u1 = np.full((1, 4), 3.0)
        f = fdengine.compute_rhs(2, np.array([0.5, 2.0]), [u0, u1], np.zeros((1, 4)))
        # F^(2) = -lambda^(2) u^(0) - lambda^(1) u^(1)
        assert f == pytest.approx(-2.0 * u0 - 0.5 * u1)

    def test_rhs_orthogonal_to_eigenfunction(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=3)
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        qdiff = grid.z - 0.0
        u_stack = [u0]
        # rebuild F^(1) and check the solvability condition
        f1 = fdengine.compute_rhs(1, sol.lambda_corrections[1:2], u_stack, qdiff)
        assert abs(sincquad.inner_product(grid, f1, u0)) <= 1e-12


class TestEigfunCorrection:
    def test_zero_rhs(self, unit_problem):
        _, _, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        w, _ = basicsolver.sample_function(pair.second, grid)
        out = fdengine.compute_eigfun_correction(np.zeros(grid.shape), u0, w, grid)
        assert np.all(out == 0.0)

    def test_first_correction_matches_closed_form(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=1)
        u1 = (sol.eigenfunction_samples - u0) / math.sqrt(pair.norm_sq)
        if u0[0, grid.K] < 0:
            u1 = -u1
        expect = -math.sqrt(2.0) / 4.0 * grid.z
        assert np.max(np.abs(u1 - expect)) <= 1e-7

    def test_second_correction_matches_closed_form(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol1 = fdengine.run_fd(pair, qbar, grid, q, rank=1)
        sol2 = fdengine.run_fd(pair, qbar, grid, q, rank=2)
        u2 = (sol2.eigenfunction_samples - sol1.eigenfunction_samples)
        u2 = u2 / math.sqrt(pair.norm_sq)
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        if u0[0, grid.K] < 0:
            u2 = -u2
        s2 = math.sqrt(2.0)
        expect = s2 * grid.z**2 / 24.0 - s2 / 72.0
        assert np.max(np.abs(u2 - expect)) <= 1e-7

    def test_kernel_consistency_by_finite_differences(self):
        # smooth synthetic right-hand side satisfying the solvability
        # condition (orthogonal to u0, as every F produced by the rank loop
        # does); the returned correction must satisfy the second-order
        # equation, checked by independent polynomial-fit differentiation
        mesh = coeffmesh.build_mesh(1)
        qbar = coeffmesh.PiecewiseConstantCoeff(mesh, (0.0,))
        grid = sincquad.build_grid(mesh, 1000)
        pair = basicsolver.solve_basic(0, qbar, grid)
        lam0 = pair.lambda0
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        w, _ = basicsolver.sample_function(pair.second, grid)
        F = fdengine.orthogonalize(np.cos(2.0 * grid.z), u0, grid, pair.norm_sq)
        u = fdengine.compute_eigfun_correction(F, u0, w, grid)
        K = grid.K
        worst = 0.0
        for center in range(K - 80, K + 81, 16):
            sl = slice(center - 4, center + 5)
            xs = grid.z[0, sl]
            x0 = xs[4]
            coef = np.polynomial.polynomial.polyfit(xs - x0, u[0, sl], 8)
            du = coef[1]
            d2u = 2.0 * coef[2]
            lhs = (1.0 - x0 * x0) * d2u - 2.0 * x0 * du + lam0 * u[0, center]
            worst = max(worst, abs(lhs - F[0, center]))
        assert worst <= 1e-6


class TestOrthogonalize:
    def test_projects_out_everything(self, unit_problem):
        _, _, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        out = fdengine.orthogonalize(u0.copy(), u0, grid, pair.norm_sq)
        assert np.max(np.abs(out)) <= 1e-12 * np.max(np.abs(u0))

    def test_leaves_orthogonal_untouched(self, unit_problem):
        _, _, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        v = grid.z.copy()  # odd, orthogonal to the constant eigenfunction
        out = fdengine.orthogonalize(v, u0, grid, pair.norm_sq)
        assert np.max(np.abs(out - v)) <= 1e-13

    def test_gram_schmidt_identity(self, unit_problem):
        _, _, grid, pair = unit_problem
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        v = np.sin(3.0 * grid.z)
        v_orth = fdengine.orthogonalize(v, u0, grid, pair.norm_sq)
        mixed = 0.7 * u0 + v_orth
        recovered = fdengine.orthogonalize(mixed, u0, grid, pair.norm_sq)
        assert np.max(np.abs(recovered - v_orth)) <= 1e-12 * max(1.0, np.max(np.abs(v_orth)))
        assert abs(sincquad.inner_product(grid, recovered, u0)) <= 1e-12


class TestRunFd:
    def test_requires_stopping_rule(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        with pytest.raises(InvalidParameter):
            fdengine.run_fd(pair, qbar, grid, q)

    def test_tolerance_stopping(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=40, tol=1e-6)
        assert sol.rank < 40
        assert max(abs(sol.lambda_corrections[-1]), sol.norms_normalized[-1]) < 1e-6

    def test_norm_consistency_invariant(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=4)
        assert sol.correction_norms[0] ** 2 == pytest.approx(sol.norm_sq, rel=1e-10)

    def test_orthogonality_invariant_every_rank(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=6)
        u0, _ = basicsolver.sample_function(pair.eigenfunction, grid)
        running = u0.copy()
        partial = [u0]
        # recompute the per-rank samples from the stored sum is not possible,
        # so re-run incrementally and check each stored rank
        for d in range(1, 7):
            sol_d = fdengine.run_fd(pair, qbar, grid, q, rank=d)
            u_d = sol_d.eigenfunction_samples - running
            running = sol_d.eigenfunction_samples
            ip = abs(sincquad.inner_product(grid, u_d, u0))
            assert ip <= 1e-10 * sol_d.correction_norms[d] * math.sqrt(sol_d.norm_sq)

    def test_stagnation_warning_for_strong_potential(self):
        # strong enough that the norms grow monotonically; amplitude 5 also
        # diverges but its norms oscillate with the parity of the rank
        q = coeffmesh.Potential.from_text("9*x")
        mesh = coeffmesh.build_mesh(1)
        qbar = coeffmesh.approximate_coefficient(q, mesh)
        grid = sincquad.build_grid(mesh, 64)
        pair = basicsolver.solve_basic(0, qbar, grid)
        with pytest.warns(StagnationWarning):
            sol = fdengine.run_fd(pair, qbar, grid, q, rank=25)
        assert sol.stagnated

    def test_single_interval_norm_column(self, vctx, golden):
        # the normalized correction norms of the reference series, printed to
        # two significant digits in the frozen table
        sol = vctx.solution("ex1_n1", 0)
        for m in range(1, 11):
            ref = golden.ex1_series_n1[m]["u_norm"]
            assert sol.norms_normalized[m] == pytest.approx(ref, rel=0.05)

    def test_single_interval_eta_bar_column(self, vctx, golden):
        # two low-rank cells of the frozen table (m = 0 and m = 2) disagree
        # with the closed-form values at the few-percent level; the settled
        # rows match within print rounding
        sol = vctx.solution("ex1_n1", 0)
        for m in range(3, 11):
            ref = golden.ex1_series_n1[m]["eta_bar"]
            assert sol.eta_bar[m] == pytest.approx(ref, rel=0.05)

    def test_monotone_truncation_improvement_in_index(self, vctx):
        # fixed truncation rank, above the round-off floor of the deep ranks
        errs = []
        for n in range(1, 5):
            sol = vctx.solution("ex1_n3", n)
            errs.append(abs(float(sol.lambda_partial[4]) - sol.eigenvalue_sum))
        assert all(a > b for a, b in zip(errs, errs[1:]))

    def test_convergence_in_mesh_refinement(self, vctx, golden):
        q = coeffmesh.Potential.from_text("x")
        ref = golden.ex1_reference_n3[0][1]
        errs = []
        for n_intervals in (1, 3, 9):
            mesh = coeffmesh.build_mesh(n_intervals)
            qbar = coeffmesh.approximate_coefficient(q, mesh)
            grid = sincquad.build_grid(mesh, 200)
            pair = basicsolver.solve_basic(0, qbar, grid)
            sol = fdengine.run_fd(pair, qbar, grid, q, rank=8)
            errs.append(abs(float(sol.lambda_partial[8]) - ref))
        assert errs[0] > errs[1] > errs[2]


class TestBounds:
    def test_alpha_values(self):
        assert fdengine.alpha_fraction(1) == Fraction(1, 4)
        assert fdengine.alpha_fraction(2) == Fraction(1, 8)
        assert fdengine.alpha_fraction(3) == Fraction(5, 64)

    def test_catalan_identity_exact(self):
        for j in range(16):
            assert fdengine.alpha_fraction(j) * 4**j == fdengine.catalan(j)

    def test_majorant_recursion_matches(self):
        seq = fdengine.majorant_sequence(16)
        for j in range(16):
            assert seq[j] == fdengine.catalan(j)

    def test_alpha_tail_estimate(self):
        for m in range(1, 31):
            assert fdengine.alpha(m + 1) <= 1.0 / ((m + 1) * math.sqrt(math.pi * m))

    def test_bounds_decrease_to_zero(self):
        bound = fdengine.apriori_bounds(0.1, 0.5)
        assert bound.r < 1.0
        values = [bound.eig_bound(m) for m in range(1, 30)]
        assert all(a > b for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-10
        fun_values = [bound.fun_bound(m) for m in range(1, 30)]
        assert all(a > b for a, b in zip(fun_values, fun_values[1:]))

    def test_zero_qbar_reduction(self):
        # with M_n = 1/(2n) and deviation ||q||, r reduces to 2*||q||/n
        for n in (1, 2, 5, 9):
            bound = fdengine.apriori_bounds(1.0 / (2.0 * n), 1.0)
            assert bound.r == pytest.approx(2.0 / n, rel=1e-15)

    def test_critical_and_divergent_status(self):
        assert fdengine.apriori_bounds(0.25, 1.0).status == "critical"
        crit = fdengine.apriori_bounds(0.25, 1.0)
        assert crit.eig_bound(5) == pytest.approx(
            2.0 / math.sqrt(math.pi) * math.atan(1.0 / math.sqrt(6.0)))
        div = fdengine.apriori_bounds(0.3, 1.0)
        assert div.status == "divergent"
        assert math.isnan(div.eig_bound(5))
        with pytest.raises(InvalidParameter):
            fdengine.apriori_bounds(0.1, math.inf)


class TestResiduals:
    def test_final_rank_matches_stored(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=5)
        eta = fdengine.residual_eta(sol, q, grid)
        assert eta == pytest.approx(float(sol.eta[5]), rel=1e-12)
        eta_bar = fdengine.residual_eta_bar(sol, q, grid, qbar)
        assert eta_bar == pytest.approx(float(sol.eta_bar[5]), rel=1e-12)

    def test_residual_decreases_with_rank(self, unit_problem):
        q, qbar, grid, pair = unit_problem
        sol = fdengine.run_fd(pair, qbar, grid, q, rank=10)
        assert float(sol.eta[10]) < float(sol.eta[2]) < float(sol.eta[0])
