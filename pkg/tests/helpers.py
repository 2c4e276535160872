"""Shared builders for the test suite."""

import numpy as np

from tensorpoly import LtrModel


def random_model(rng, n, n_d, n_t, n_y=1):
    P = [rng.standard_normal((n_t, n)) for _ in range(n_d)]
    if n_y == 1:
        Q = np.ones((n_t, 1))
    else:
        Q = rng.standard_normal((n_t, n_y))
    lam = rng.standard_normal(n_t)
    return LtrModel(P=P, Q=Q, lam=lam)


def loop_forward(model, X):
    """Per-example evaluation by plain Python loops (oracle path)."""
    out = np.zeros((X.shape[0], model.n_y))
    for i in range(X.shape[0]):
        for t in range(model.n_t):
            prod = model.lam[t]
            for Pd in model.P:
                prod *= float(np.dot(Pd[t], X[i]))
            out[i] += prod * model.Q[t]
    return out
