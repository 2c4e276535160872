"""End-to-end CLI session: generate -> train -> predict -> evaluate.

Runs the command-line entry points in-process inside a temp directory;
the same calls work as shell commands (`tensorpoly generate ...`).
"""

import json
import tempfile
from pathlib import Path

from tensorpoly.cli import main

with tempfile.TemporaryDirectory() as tmp:
    tmp = Path(tmp)

    config = {
        "generator": {"type": "quadratics", "function": "xy", "m": 1000, "seed": 7},
        "train": {"n_d": 2, "n_t": 2, "epochs": 10, "batch_size": 50,
                  "learning_rate": 0.05, "mode": "rank_wise", "seed": 3},
    }
    cfg = tmp / "run.json"
    cfg.write_text(json.dumps(config, indent=2))

    print("$ tensorpoly generate --config run.json --out data/")
    assert main(["generate", "--config", str(cfg), "--out", str(tmp / "data")]) == 0

    print("\n$ tensorpoly train --config run.json --data data/train.csv --out fit/")
    assert main(["train", "--config", str(cfg),
                 "--data", str(tmp / "data" / "train.csv"),
                 "--out", str(tmp / "fit")]) == 0

    print("\n$ tensorpoly predict --model fit/model.json --input data/test.csv --out pred/")
    assert main(["predict", "--model", str(tmp / "fit" / "model.json"),
                 "--input", str(tmp / "data" / "test.csv"),
                 "--out", str(tmp / "pred")]) == 0

    print("\n$ tensorpoly evaluate --predictions pred/predictions.csv "
          "--truth data/test.csv --out eval/")
    assert main(["evaluate", "--predictions", str(tmp / "pred" / "predictions.csv"),
                 "--truth", str(tmp / "data" / "test.csv"),
                 "--task", "regression", "--out", str(tmp / "eval")]) == 0

    print("\n$ tensorpoly gradcheck")
    assert main(["gradcheck"]) == 0
