"""File formats: dataset/prediction CSVs and model/report JSON.

CSV files carry a header of feature columns ``x1..xn`` followed by
output columns (``y`` for a single output, ``y1..yn_y`` otherwise).
Floats are serialized at full round-trip precision. All writes go
through a temp file plus rename so failures never leave partial output.
"""

from __future__ import annotations

import csv
import json
import math
import os
import tempfile

import numpy as np

from .model import LtrModel

MODEL_SCHEMA_VERSION = 1


def _atomic_write(path, text):
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _rows_to_csv(header, rows):
    import io as _io

    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()


def _y_names(n_y):
    return ["y"] if n_y == 1 else [f"y{j + 1}" for j in range(n_y)]


def write_dataset_csv(path, X, Y=None):
    """Write features (and outputs, if given) to one CSV."""
    X = np.asarray(X, dtype=float)
    header = [f"x{j + 1}" for j in range(X.shape[1])]
    if Y is None:
        rows = X
    else:
        Y = np.asarray(Y, dtype=float)
        if Y.ndim == 1:
            Y = Y.reshape(-1, 1)
        header += _y_names(Y.shape[1])
        rows = np.hstack([X, Y])
    _atomic_write(path, _rows_to_csv(header, rows))


def write_predictions_csv(path, Y):
    Y = np.asarray(Y, dtype=float)
    if Y.ndim == 1:
        Y = Y.reshape(-1, 1)
    _atomic_write(path, _rows_to_csv(_y_names(Y.shape[1]), Y))


def read_dataset_csv(path):
    """Read a CSV with x*/y* header into (X, Y); Y is None without y columns."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: missing header row") from None
        rows = [row for row in reader if row]
    x_idx = [i for i, name in enumerate(header) if name.strip().startswith("x")]
    y_idx = [i for i, name in enumerate(header) if name.strip().startswith("y")]
    if not x_idx and not y_idx:
        raise ValueError(f"{path}: header has no x*/y* columns")
    data = np.array([[float(v) for v in row] for row in rows], dtype=float)
    if data.size == 0:
        data = data.reshape(0, len(header))
    X = data[:, x_idx] if x_idx else None
    Y = data[:, y_idx] if y_idx else None
    return X, Y


def model_to_dict(model):
    dims = model.dims
    n = dims[0] if len(set(dims)) == 1 else list(dims)
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "n_d": model.n_d,
        "n_t": model.n_t,
        "n": n,
        "n_y": model.n_y,
        "homogenized": bool(model.homogenized),
        "lambda": [float(v) for v in model.lam],
        "P": [[[float(v) for v in row] for row in Pd] for Pd in model.P],
        "Q": [[float(v) for v in row] for row in model.Q],
        "link": model.link,
    }


def model_from_dict(d):
    if d.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise ValueError(f"unsupported model schema version {d.get('schema_version')!r}")
    return LtrModel(
        P=[np.asarray(Pd, dtype=float) for Pd in d["P"]],
        Q=np.asarray(d["Q"], dtype=float),
        lam=np.asarray(d["lambda"], dtype=float),
        homogenized=bool(d["homogenized"]),
        link=d.get("link", "identity"),
    )


def jsonable(obj):
    """Recursively convert to JSON-safe values; NaN/inf become null."""
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    return obj


def write_json(path, obj):
    _atomic_write(path, json.dumps(jsonable(obj), indent=2) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)


def save_model(path, model):
    write_json(path, model_to_dict(model))


def load_model(path):
    return model_from_dict(read_json(path))
