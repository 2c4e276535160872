import itertools

import numpy as np
import pytest

from tensorpoly import (
    Dataset,
    anova_terms,
    fm_fit_gd,
    fm_forward,
    krr_fit,
    krr_predict,
    linreg_fit,
    linreg_predict,
    pearson,
    poly_kernel,
    rmse,
    quadratics_dataset,
)
from tensorpoly.baselines import KRR_SIZE_CAP


class TestPolyKernel:
    def test_unit_vector(self):
        x = np.array([[1.0, 0.0]])
        assert poly_kernel(x, x, b=0.0, n_d=2)[0, 0] == pytest.approx(1.0)

    def test_orthogonal_vectors_vanish(self):
        x1 = np.array([[1.0, 0.0]])
        x2 = np.array([[0.0, 1.0]])
        for deg in (1, 2, 3, 5):
            assert poly_kernel(x1, x2, b=0.0, n_d=deg)[0, 0] == 0.0

    def test_against_entry_loop(self):
        rng = np.random.default_rng(3)
        X1 = rng.standard_normal((5, 3))
        X2 = rng.standard_normal((5, 3))
        K = poly_kernel(X1, X2, b=1.0, n_d=3)
        for i in range(5):
            for j in range(5):
                expected = (float(np.dot(X1[i], X2[j])) + 1.0) ** 3
                assert K[i, j] == pytest.approx(expected, rel=1e-12)

    def test_symmetric_positive_semidefinite(self):
        rng = np.random.default_rng(5)
        for b in (0.0, 0.5, 2.0):
            X = rng.standard_normal((12, 4))
            K = poly_kernel(X, X, b=b, n_d=2)
            assert np.allclose(K, K.T)
            assert np.min(np.linalg.eigvalsh(K)) >= -1e-8

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            poly_kernel(np.zeros((2, 3)), np.zeros((2, 4)), b=0.0, n_d=2)


class TestKrr:
    def test_interpolates_with_zero_ridge(self):
        # m below the polynomial feature dimension keeps K nonsingular
        rng = np.random.default_rng(7)
        X = rng.standard_normal((8, 3))
        y = rng.standard_normal(8)
        model = krr_fit(Dataset(views=[X], Y=y), b=1.0, n_d=2, ridge=0.0)
        assert rmse(y, krr_predict(model, X)) < 1e-8

    def test_duplicate_rows_need_ridge(self):
        rng = np.random.default_rng(8)
        X = rng.standard_normal((10, 2))
        X[5] = X[0]
        y = rng.standard_normal(10)
        model = krr_fit(Dataset(views=[X], Y=y), b=1.0, n_d=2, ridge=1e-6)
        assert np.all(np.isfinite(krr_predict(model, X)))

    def test_size_cap(self):
        X = np.zeros((KRR_SIZE_CAP + 1, 1))
        with pytest.raises(ValueError):
            krr_fit(Dataset(views=[X], Y=np.zeros(KRR_SIZE_CAP + 1)), n_d=2)

    def test_fits_quadratics(self):
        ds = quadratics_dataset("sq_diff", 400, seed=4)
        model = krr_fit(Dataset(views=[ds.X[:300]], Y=ds.Y[:300]), b=1.0, n_d=2, ridge=1e-8)
        yhat = krr_predict(model, ds.X[300:])
        assert pearson(ds.Y[300:, 0], yhat) >= 0.99


class TestLinearRegression:
    def test_exact_linear_data(self):
        rng = np.random.default_rng(9)
        X = rng.standard_normal((500, 3))
        y = X @ [1.0, -2.0, 0.5] + 0.7
        w = linreg_fit(Dataset(views=[X[:400]], Y=y[:400]))
        assert pearson(y[400:], linreg_predict(w, X[400:])) >= 0.999

    def test_blind_to_pure_interaction(self):
        ds = quadratics_dataset("xy", 1000, seed=10)
        w = linreg_fit(Dataset(views=[ds.X[:500]], Y=ds.Y[:500]))
        r = pearson(ds.Y[500:, 0], linreg_predict(w, ds.X[500:]))
        assert abs(r) <= 0.1

    def test_constant_target_zeroes_feature_weights(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((200, 4))
        w = linreg_fit(Dataset(views=[X], Y=np.full(200, 3.0)))
        assert np.max(np.abs(w[:-1])) < 1e-8
        assert w[-1] == pytest.approx(3.0, abs=1e-8)


def brute_force_interactions(x, p, max_degree):
    """Sum over strictly increasing index tuples of all lengths 1..max_degree."""
    n = x.shape[0]
    total = 0.0
    for d in range(1, max_degree + 1):
        for combo in itertools.combinations(range(n), d):
            prod = 1.0
            for j in combo:
                prod *= x[j] * p[j]
            total += prod
    return total


def brute_force_degree(x, p, d):
    """Single fixed-length elementary symmetric term."""
    total = 0.0
    for combo in itertools.combinations(range(x.shape[0]), d):
        prod = 1.0
        for j in combo:
            prod *= x[j] * p[j]
        total += prod
    return total


class TestFmForward:
    def test_degree2_term_is_elementary_symmetric(self):
        # e2 for p=(1,1), x=(2,3) via Newton's identity (s1^2 - s2)/2 = 6
        X = np.array([[2.0, 3.0]])
        P = np.array([[1.0, 1.0]])
        A = anova_terms(X, P, 2)
        assert A[1][0, 0] == pytest.approx(6.0, rel=1e-12)
        s1 = 2.0 + 3.0
        s2 = 4.0 + 9.0
        assert A[1][0, 0] == pytest.approx((s1**2 - s2) / 2, rel=1e-12)

    def test_degree_one_is_linear(self):
        rng = np.random.default_rng(13)
        X = rng.standard_normal((6, 4))
        P = rng.standard_normal((3, 4))
        out = fm_forward(X, P, 1)
        expected = (X @ P.T).sum(axis=1)
        assert np.allclose(out, expected, rtol=1e-12)

    def test_against_combinatorial_brute_force(self):
        rng = np.random.default_rng(15)
        X = rng.standard_normal((5, 4))
        P = rng.standard_normal((2, 4))
        for n_d in (2, 3):
            out = fm_forward(X, P, n_d)
            A = anova_terms(X, P, n_d)
            for i in range(5):
                expected = sum(
                    brute_force_interactions(X[i], P[t], n_d) for t in range(2)
                )
                assert out[i] == pytest.approx(expected, rel=1e-10)
                for d in range(1, n_d + 1):
                    for t in range(2):
                        assert A[d - 1][i, t] == pytest.approx(
                            brute_force_degree(X[i], P[t], d), rel=1e-10, abs=1e-12
                        )

    def test_column_permutation_invariance(self):
        rng = np.random.default_rng(17)
        X = rng.standard_normal((7, 5))
        P = rng.standard_normal((2, 5))
        perm = rng.permutation(5)
        a = fm_forward(X, P, 3)
        b = fm_forward(X[:, perm], P[:, perm], 3)
        assert np.allclose(a, b, rtol=1e-12)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            fm_forward(np.zeros((2, 3)), np.zeros((1, 4)), 2)


class TestFmGradientDescent:
    def test_learns_symmetric_but_not_antisymmetric(self):
        results = {}
        for fn in ("xy", "diff_sq"):
            ds = quadratics_dataset(fn, 400, seed=2)
            P = fm_fit_gd(ds.X[:200], ds.Y[:200, 0], n_d=2, n_t=2,
                          steps=150, learning_rate=0.05, restarts=2, seed=0)
            results[fn] = pearson(ds.Y[200:, 0], fm_forward(ds.X[200:], P, 2))
        assert results["xy"] >= 0.95
        assert abs(results["diff_sq"]) <= 0.3
