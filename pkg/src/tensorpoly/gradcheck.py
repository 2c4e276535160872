"""Finite-difference verification of the analytic gradients."""

from __future__ import annotations

import numpy as np

from .model import Dataset, LtrModel
from .training import TrainConfig, gradients, loss

# Guarded relative error: near-zero components are compared on an
# absolute scale so finite-difference noise cannot trip the check.
ERROR_FLOOR = 1e-3
TOLERANCE = 1e-5


def numeric_gradients(model, dataset, config, h=1e-5):
    """Central finite differences of `loss` w.r.t. every parameter entry."""

    def fd(arr):
        g = np.zeros_like(arr)
        it = np.nditer(arr, flags=["multi_index"])
        while not it.finished:
            idx = it.multi_index
            old = arr[idx]
            arr[idx] = old + h
            up = loss(model, dataset, config)
            arr[idx] = old - h
            down = loss(model, dataset, config)
            arr[idx] = old
            g[idx] = (up - down) / (2.0 * h)
            it.iternext()
        return g

    g_lam = fd(model.lam)
    g_P = [fd(Pd) for Pd in model.P]
    g_Q = fd(model.Q)
    return g_lam, g_P, g_Q


def max_relative_error(analytic, numeric):
    a = np.asarray(analytic, dtype=float)
    f = np.asarray(numeric, dtype=float)
    scale = np.maximum(np.maximum(np.abs(a), np.abs(f)), ERROR_FLOOR)
    return float(np.max(np.abs(a - f) / scale)) if a.size else 0.0


def _worst_entry(analytic, numeric):
    a = np.asarray(analytic, dtype=float)
    f = np.asarray(numeric, dtype=float)
    if a.size == 0:
        return 0.0, ()
    scale = np.maximum(np.maximum(np.abs(a), np.abs(f)), ERROR_FLOOR)
    rel = np.abs(a - f) / scale
    flat = int(np.argmax(rel))
    index = tuple(int(i) for i in np.unravel_index(flat, a.shape))
    return float(rel.reshape(-1)[flat]), index


def make_case(n_d, n_y, multiview, seed=0, m=7, n_t=2):
    """A random model/dataset/config triple for one grid point."""
    rng = np.random.default_rng(seed)
    if multiview:
        widths = [3, 2, 4, 3][:n_d]
    else:
        widths = [3] * n_d
    P = [rng.standard_normal((n_t, w)) for w in widths]
    Q = np.ones((n_t, 1)) if n_y == 1 else rng.standard_normal((n_t, n_y))
    lam = rng.standard_normal(n_t)
    model = LtrModel(P=P, Q=Q, lam=lam)
    views = [rng.standard_normal((m, w)) for w in widths]
    if not multiview:
        views = [views[0]]
    Y = rng.standard_normal((m, n_y))
    dataset = Dataset(views=views, Y=Y)
    config = TrainConfig(n_d=n_d, n_t=n_t, C_p=0.37, C_q=0.23)
    return model, dataset, config


def default_grid():
    cases = []
    for n_d in (1, 2, 3, 4):
        for n_y in (1, 3):
            for multiview in (False, True):
                cases.append((n_d, n_y, multiview))
    return cases


def run_suite(grid=None, h=1e-5, corrupt=None, seed=0):
    """Run the finite-difference suite over a shape grid.

    Returns one record per case with the max guarded relative error per
    parameter group. ``corrupt='flip-q'`` negates the analytic Q
    gradient first (a self-test hook proving the detector fires).
    """
    if grid is None:
        grid = default_grid()
    records = []
    for i, (n_d, n_y, multiview) in enumerate(grid):
        model, dataset, config = make_case(n_d, n_y, multiview, seed=seed + i)
        a_lam, a_P, a_Q = gradients(model, dataset, config)
        if corrupt == "flip-q":
            a_Q = -a_Q
        f_lam, f_P, f_Q = numeric_gradients(model, dataset, config, h=h)
        err_lam, idx_lam = _worst_entry(a_lam, f_lam)
        per_d = [_worst_entry(a, f) for a, f in zip(a_P, f_P)]
        d_worst = int(np.argmax([e for e, _ in per_d]))
        err_Q, idx_Q = _worst_entry(a_Q, f_Q)
        errs = {
            "lambda": err_lam,
            "P": per_d[d_worst][0],
            "Q": err_Q,
        }
        indices = {
            "lambda": idx_lam,
            "P": (d_worst, *per_d[d_worst][1]),
            "Q": idx_Q,
        }
        records.append(
            {
                "n_d": n_d,
                "n_y": n_y,
                "multiview": multiview,
                "errors": errs,
                "indices": indices,
                "ok": all(v <= TOLERANCE for v in errs.values()),
            }
        )
    return records
