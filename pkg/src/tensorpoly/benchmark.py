"""Benchmark sweeps: generate data, cross-validate learners, tabulate.

One sweep varies exactly one of degree / rank / noise / variables /
sample-size over a grid while everything else stays fixed; each grid
point gets its own derived seeds so reruns reproduce the accuracy
columns exactly (timing columns are wall-clock and exempt).
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import baselines
from .datagen import GeneratorSpec, generate_model, sample_dataset
from .metrics import cross_validate
from .model import predict
from .training import TrainConfig, fit

SWEEP_VARIABLES = ("degree", "rank", "noise", "variables", "sample-size")

THREADS_ENV = "TENSORPOLY_THREADS"


def ltr_learner(config, fit_seconds=None):
    """Learner closure over a TrainConfig; optionally records fit times."""

    def learn(train):
        t0 = time.perf_counter()
        model, _ = fit(train, config)
        if fit_seconds is not None:
            fit_seconds.append(time.perf_counter() - t0)
        return lambda test: predict(model, test.views)

    return learn


def krr_learner(b=1.0, n_d=2, ridge=1e-8, fit_seconds=None):
    def learn(train):
        t0 = time.perf_counter()
        model = baselines.krr_fit(train, b=b, n_d=n_d, ridge=ridge)
        if fit_seconds is not None:
            fit_seconds.append(time.perf_counter() - t0)
        return lambda test: baselines.krr_predict(model, test.X)

    return learn


def linreg_learner(fit_seconds=None):
    def learn(train):
        t0 = time.perf_counter()
        w = baselines.linreg_fit(train)
        if fit_seconds is not None:
            fit_seconds.append(time.perf_counter() - t0)
        return lambda test: baselines.linreg_predict(w, test.X)

    return learn


def fm_learner(n_d=2, n_t=2, steps=300, learning_rate=0.05, restarts=3, seed=0, fit_seconds=None):
    def learn(train):
        t0 = time.perf_counter()
        P = baselines.fm_fit_gd(
            train.X,
            train.Y[:, 0],
            n_d=n_d,
            n_t=n_t,
            steps=steps,
            learning_rate=learning_rate,
            restarts=restarts,
            seed=seed,
        )
        if fit_seconds is not None:
            fit_seconds.append(time.perf_counter() - t0)
        return lambda test: baselines.fm_forward(test.X, P, n_d)

    return learn


def _point_params(base, variable, value):
    p = dict(base)
    key = {
        "degree": "degree",
        "rank": "rank",
        "noise": "noise",
        "variables": "n",
        "sample-size": "m",
        "sample_size": "m",
    }[variable]
    p[key] = value
    return p


def _point_seeds(seed, index):
    state = np.random.SeedSequence(entropy=(int(seed), int(index))).generate_state(3)
    return int(state[0]), int(state[1]), int(state[2])


def _build_learner(name, params, cfg, fit_seconds):
    train_cfg = dict(cfg.get("train", {}))
    train_cfg["n_d"] = int(params["degree"])
    train_cfg["n_t"] = int(params["rank"])
    if name == "ltr":
        return ltr_learner(TrainConfig(**train_cfg), fit_seconds)
    if name == "lr":
        return linreg_learner(fit_seconds)
    if name == "krr":
        krr_cfg = cfg.get("krr", {})
        return krr_learner(
            b=float(krr_cfg.get("bias", 1.0)),
            n_d=int(params["degree"]),
            ridge=float(krr_cfg.get("ridge", 1e-8)),
            fit_seconds=fit_seconds,
        )
    if name == "fm":
        fm_cfg = cfg.get("fm", {})
        return fm_learner(
            n_d=int(params["degree"]),
            n_t=int(params["rank"]),
            steps=int(fm_cfg.get("steps", 300)),
            learning_rate=float(fm_cfg.get("learning_rate", 0.05)),
            restarts=int(fm_cfg.get("restarts", 3)),
            seed=int(fm_cfg.get("seed", 0)),
            fit_seconds=fit_seconds,
        )
    raise ValueError(f"unknown learner {name!r}")


def _stderr(values):
    v = np.asarray(values, dtype=float)
    if v.size < 2:
        return 0.0
    return float(np.std(v, ddof=1) / np.sqrt(v.size))


def _run_point(index, value, cfg):
    base = cfg["base"]
    variable = cfg["sweep"]["variable"]
    params = _point_params(base, variable, value)
    model_seed, data_seed, fold_seed = _point_seeds(base.get("seed", 0), index)
    rows = []
    spec = GeneratorSpec(
        n=int(params["n"]),
        n_d=int(params["degree"]),
        n_t=int(params["rank"]),
        m=int(params["m"]),
        noise_level=float(params.get("noise", 0.0)),
        seed=model_seed,
    )
    true_model = generate_model(spec)
    dataset = sample_dataset(true_model, spec.m, spec.noise_level, seed=data_seed)
    folds = int(cfg.get("folds", 2))
    for name in cfg.get("learners", ["ltr", "lr"]):
        fit_seconds = []
        try:
            learner = _build_learner(name, params, cfg, fit_seconds)
            result = cross_validate(dataset, learner, folds, seed=fold_seed)
            rows.append((name, variable, value, "pearson", result.mean_pearson, result.stderr_pearson, "ok"))
            rows.append((name, variable, value, "rmse", result.mean_rmse, result.stderr_rmse, "ok"))
            rows.append(
                (
                    name,
                    variable,
                    value,
                    "train_seconds",
                    float(np.mean(fit_seconds)) if fit_seconds else float("nan"),
                    _stderr(fit_seconds),
                    "ok",
                )
            )
        except Exception as exc:  # keep sweeping, record the failure in-row
            for metric in ("pearson", "rmse", "train_seconds"):
                rows.append((name, variable, value, metric, float("nan"), float("nan"), f"failed: {exc}"))
    return rows


def run_benchmark(cfg):
    """Execute a sweep config; returns (rows, plot_data).

    Rows are (learner, variable, value, metric, mean, stderr, status).
    """
    sweep = cfg.get("sweep")
    if not sweep or "variable" not in sweep or "values" not in sweep:
        raise ValueError("benchmark config needs sweep.variable and sweep.values")
    variable = sweep["variable"]
    if variable not in SWEEP_VARIABLES and variable != "sample_size":
        raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
    values = list(sweep["values"])
    workers = max(1, int(os.environ.get(THREADS_ENV, "1")))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_point = list(pool.map(lambda iv: _run_point(iv[0], iv[1], cfg), enumerate(values)))
    else:
        per_point = [_run_point(i, v, cfg) for i, v in enumerate(values)]
    rows = [row for point in per_point for row in point]

    series = {}
    for name, _, value, metric, mean, _, status in rows:
        series.setdefault(name, {}).setdefault(metric, []).append(
            mean if status == "ok" else None
        )
    plot_data = {"variable": variable, "values": values, "series": series}
    return rows, plot_data
