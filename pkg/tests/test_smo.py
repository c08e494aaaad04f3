"""Dual solver against a projected-gradient QP oracle."""
import numpy as np
import pytest

import reference as ref
from painmon.models import dual_objective, fit_platt, rbf_kernel, solve_smo


def separable_problem(n=20, seed=0, gamma=0.5):
    rng = np.random.default_rng(seed)
    half = n // 2
    X = np.vstack([rng.normal(2.0, 0.4, (half, 2)),
                   rng.normal(-2.0, 0.4, (n - half, 2))])
    y = np.array([1.0] * half + [-1.0] * (n - half))
    return X, y, rbf_kernel(X, X, gamma)


class TestSolveSmo:
    def test_two_points_symmetric(self):
        X = np.array([[1.0, 0.0], [-1.0, 0.0]])
        y = np.array([1.0, -1.0])
        K = rbf_kernel(X, X, 1.0)
        alpha, b, converged = solve_smo(K, y, C=1e6)
        assert converged
        assert (alpha > 1e-10).all()             # both are support vectors
        # decision at the midpoint is zero and flips sign across it
        def decide(q):
            k = rbf_kernel(np.array([q]), X, 1.0)[0]
            return float((alpha * y) @ k + b)
        assert decide([0.0, 0.0]) == pytest.approx(0.0, abs=1e-6)
        assert decide([0.5, 0.0]) > 0 > decide([-0.5, 0.0])

    def test_constraints_hold(self):
        X, y, K = separable_problem(seed=3)
        alpha, b, _ = solve_smo(K, y, C=1.0, seed=1)
        assert (alpha >= -1e-12).all()
        assert (alpha <= 1.0 + 1e-12).all()
        assert abs(float(alpha @ y)) < 1e-9

    @pytest.mark.parametrize("seed,C", [(0, 1.0), (1, 10.0), (2, 0.5)])
    def test_objective_matches_qp_oracle(self, seed, C):
        X, y, K = separable_problem(seed=seed)
        alpha, b, _ = solve_smo(K, y, C=C, seed=seed)
        ours = dual_objective(K, y, alpha)
        a_ref = ref.qp_dual_oracle(K, y, np.full(len(y), C))
        best = ref.dual_objective_naive(K, y, a_ref)
        assert ours == pytest.approx(best, rel=1e-4)

    def test_kkt_within_tolerance(self):
        X, y, K = separable_problem(seed=5)
        C, tol = 1.0, 1e-3
        alpha, b, _ = solve_smo(K, y, C=C, tol=tol, seed=0)
        f = (alpha * y) @ K + b
        margins = y * f
        # KKT: alpha=0 -> margin >= 1-tol; 0<alpha<C -> margin ~ 1; alpha=C -> <= 1+tol
        for i in range(len(y)):
            if alpha[i] < 1e-9:
                assert margins[i] >= 1.0 - tol - 1e-9
            elif alpha[i] > C - 1e-9:
                assert margins[i] <= 1.0 + tol + 1e-9
            else:
                assert margins[i] == pytest.approx(1.0, abs=tol + 1e-9)

    def test_duplicated_point_equivalence(self):
        # Duplicating a training point is the same QP as giving that point
        # a doubled box: collapsing the duplicate duals yields a feasible
        # dedup solution with an identical decision function.
        X, y, K = separable_problem(n=10, seed=7)
        C = 0.3
        X_dup = np.vstack([X, X[0]])
        y_dup = np.concatenate([y, y[:1]])
        K_dup = rbf_kernel(X_dup, X_dup, 0.5)
        alpha, b, _ = solve_smo(K_dup, y_dup, C=C, seed=0, max_passes=500)

        collapsed = alpha[:10].copy()
        collapsed[0] += alpha[10]
        assert collapsed[0] <= 2 * C + 1e-12     # fits the doubled budget

        grid = np.random.default_rng(1).normal(0, 2, (50, 2))
        Kg_dup = rbf_kernel(grid, X_dup, 0.5)
        Kg = rbf_kernel(grid, X, 0.5)
        f_dup = Kg_dup @ (alpha * y_dup) + b
        f_collapsed = Kg @ (collapsed * y) + b
        np.testing.assert_allclose(f_dup, f_collapsed, atol=1e-9)

        # ... and the collapsed duals are as good as the oracle's optimum
        # of the dedup problem with the widened box.
        c_hi = np.full(10, C)
        c_hi[0] = 2 * C
        a_ref = ref.qp_dual_oracle(K, y, c_hi)
        assert ref.dual_objective_naive(K, y, collapsed) == pytest.approx(
            ref.dual_objective_naive(K, y, a_ref), rel=1e-4)

    def test_max_passes_flag(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((40, 2))
        y = np.where(rng.random(40) > 0.5, 1.0, -1.0)   # unlearnable labels
        K = rbf_kernel(X, X, 0.5)
        alpha, b, converged = solve_smo(K, y, C=1.0, max_passes=1, seed=0)
        assert not converged
        assert (alpha >= -1e-12).all() and (alpha <= 1.0 + 1e-12).all()


class TestPlatt:
    def test_symmetric_calibration(self):
        f = np.array([-2.0, -1.0, 1.0, 2.0])
        y = np.array([0, 0, 1, 1])
        A, B = fit_platt(f, y)
        p0 = 1.0 / (1.0 + np.exp(A * 0.0 + B))
        assert p0 == pytest.approx(0.5, abs=0.02)
        p_hi = 1.0 / (1.0 + np.exp(A * 2.0 + B))
        p_lo = 1.0 / (1.0 + np.exp(A * -2.0 + B))
        assert p_hi > 0.5 > p_lo

    def test_monotone_in_decision_value(self):
        rng = np.random.default_rng(2)
        f = rng.standard_normal(200) * 2
        y = (f + 0.3 * rng.standard_normal(200) > 0).astype(int)
        A, B = fit_platt(f, y)
        grid = np.linspace(-3, 3, 21)
        p = 1.0 / (1.0 + np.exp(A * grid + B))
        assert (np.diff(p) > 0).all()
