"""Reference learners: linear regression, polynomial-kernel ridge
regression, and the factorization-machine forward form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import homogenize

KRR_SIZE_CAP = 20_000


def poly_kernel(X1, X2, b, n_d):
    """Polynomial kernel K_ij = (<x1_i, x2_j> + b)^n_d."""
    X1 = np.asarray(X1, dtype=float)
    X2 = np.asarray(X2, dtype=float)
    if X1.shape[1] != X2.shape[1]:
        raise ValueError(f"column mismatch: {X1.shape[1]} vs {X2.shape[1]}")
    return (X1 @ X2.T + b) ** n_d


@dataclass
class KrrModel:
    X_train: np.ndarray
    alpha: np.ndarray
    b: float
    n_d: int
    ridge: float

    def __post_init__(self):
        if self.alpha.shape[0] != self.X_train.shape[0]:
            raise ValueError("alpha length must equal stored training rows")


def krr_fit(dataset, b=1.0, n_d=2, ridge=1e-8):
    """Kernel ridge regression: solve (K + ridge*I) alpha = y.

    Dense solve, capped at 20k examples; scalar outputs only.
    """
    if dataset.n_y != 1:
        raise ValueError("KRR baseline is scalar-output")
    X = dataset.X
    if X.shape[0] > KRR_SIZE_CAP:
        raise ValueError(f"m={X.shape[0]} exceeds the dense-solve cap {KRR_SIZE_CAP}")
    K = poly_kernel(X, X, b, n_d)
    if ridge > 0:
        K = K + ridge * np.eye(K.shape[0])
    try:
        alpha = np.linalg.solve(K, dataset.Y[:, 0])
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"kernel system is singular: {exc}") from exc
    return KrrModel(X_train=X, alpha=alpha, b=b, n_d=n_d, ridge=ridge)


def krr_predict(model, X):
    K = poly_kernel(np.asarray(X, dtype=float), model.X_train, model.b, model.n_d)
    return K @ model.alpha


def linreg_fit(dataset):
    """Least-squares weights on homogenized inputs (tiny ridge for safety)."""
    if dataset.n_y != 1:
        raise ValueError("linear baseline is scalar-output")
    A = homogenize(dataset.X)
    G = A.T @ A + 1e-10 * np.eye(A.shape[1])
    return np.linalg.solve(G, A.T @ dataset.Y[:, 0])


def linreg_predict(weights, X):
    return homogenize(np.asarray(X, dtype=float)) @ weights


def anova_terms(X, P, n_d):
    """Per-degree ANOVA interaction terms A_1 .. A_n_d.

    A_d[i, t] is the elementary symmetric polynomial of degree d of the
    componentwise products x_i * p_t, built from power sums by the
    Newton-identity recursion A_d = (1/d) * sum_r (-1)^(r+1) A_{d-r} * D^(r)
    with A_0 all-ones.
    """
    X = np.asarray(X, dtype=float)
    P = np.asarray(P, dtype=float)
    if X.shape[1] != P.shape[1]:
        raise ValueError(f"column mismatch: X has {X.shape[1]}, P has {P.shape[1]}")
    m, n_t = X.shape[0], P.shape[0]
    power_sums = [None]  # D^(r), 1-based
    for r in range(1, n_d + 1):
        power_sums.append((X**r) @ (P**r).T)
    A = [np.ones((m, n_t))]
    for d in range(1, n_d + 1):
        acc = np.zeros((m, n_t))
        for r in range(1, d + 1):
            sign = 1.0 if (r + 1) % 2 == 0 else -1.0
            acc += sign * A[d - r] * power_sums[r]
        A.append(acc / d)
    return A[1:]


def fm_forward(X, P, n_d):
    """Factorization-machine forward value: all interaction orders 1..n_d
    summed over the n_t components."""
    terms = anova_terms(X, P, n_d)
    total = terms[0].copy()
    for A_d in terms[1:]:
        total += A_d
    return total.sum(axis=1)


def _fm_fd_gradient(X, y, P, n_d, h=1e-6):
    g = np.zeros_like(P)
    m = X.shape[0]
    for idx in np.ndindex(P.shape):
        old = P[idx]
        P[idx] = old + h
        up = np.sum((y - fm_forward(X, P, n_d)) ** 2) / m
        P[idx] = old - h
        down = np.sum((y - fm_forward(X, P, n_d)) ** 2) / m
        P[idx] = old
        g[idx] = (up - down) / (2.0 * h)
    return g


def fm_fit_gd(X, y, n_d, n_t, steps=300, learning_rate=0.05, restarts=3, seed=0):
    """Fit the FM parameter matrix by plain gradient descent.

    Numerical gradients of the mean squared error drive the descent (no
    FM-specific training machinery); the best of a few seeded restarts
    by training MSE is returned. Used for baseline comparisons.
    """
    X = np.asarray(X, dtype=float)
    y = np.asarray(y, dtype=float).reshape(-1)
    best_P, best_mse = None, np.inf
    for r in range(restarts):
        rng = np.random.default_rng(seed + r)
        P = rng.standard_normal((n_t, X.shape[1])) / np.sqrt(X.shape[1])
        for _ in range(steps):
            P -= learning_rate * _fm_fd_gradient(X, y, P, n_d)
        mse = float(np.mean((y - fm_forward(X, P, n_d)) ** 2))
        if np.isfinite(mse) and mse < best_mse:
            best_P, best_mse = P, mse
    if best_P is None:
        raise RuntimeError("all FM gradient-descent restarts diverged")
    return best_P
