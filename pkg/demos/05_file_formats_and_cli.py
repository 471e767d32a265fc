"""Feature dumps, checkpoints, and the command-line workflow.

Round-trips a dump through the binary format, then drives the CLI
end to end inside a scratch directory: synth -> train -> eval -> ablate.
"""

import json
import tempfile
from pathlib import Path

from streamcl import cli
from streamcl.dataio import read_dump

with tempfile.TemporaryDirectory() as scratch:
    scratch = Path(scratch)

    spec = {
        "version": 1,
        "class_count": 6,
        "dim": 16,
        "train_per_class": 60,
        "test_per_class": 20,
        "mean_scale": 1.0,
        "offset_scale": 2.0,
        "std_profile": {"low": 0.5, "high": 2.0, "shared_factors": 4,
                        "factor_strength": 0.7},
        "seed": 7,
    }
    (scratch / "spec.json").write_text(json.dumps(spec, indent=2))
    cli.main(["synth", "--spec", str(scratch / "spec.json"),
              "--output-dir", str(scratch / "data")])

    train = read_dump(scratch / "data" / "train.i2fv")
    print(f"dump header checks out: {train.record_count} records, dim {train.dim}, "
          f"classes {train.classes()}")

    config = {
        "version": 1,
        "train_dump": str(scratch / "data" / "train.i2fv"),
        "test_dump": str(scratch / "data" / "test.i2fv"),
        "run": {
            "mode": "online",
            "batch_size": 50,
            "schedule": {"kind": "step", "step": 1},
            "optimizer": {"learning_rate": 0.02, "weight_decay": 5e-5, "beta": 2.0},
            "augment": {"enabled": True, "generator": "analogical",
                        "pseudo_per_real": 1.0},
            "significance_enabled": True,
            "seed": 0,
        },
    }
    (scratch / "config.json").write_text(json.dumps(config, indent=2))

    print("\n== streamcl train ==")
    cli.main(["train", "--config", str(scratch / "config.json"),
              "--output-dir", str(scratch / "run")])

    print("\n== streamcl eval (reloads the checkpoint) ==")
    cli.main(["eval", "--checkpoint", str(scratch / "run" / "checkpoint.i2ck"),
              "--test-dump", str(scratch / "data" / "test.i2fv")])

    print("\n== streamcl ablate (2 seeds per cell) ==")
    cli.main(["ablate", "--config", str(scratch / "config.json"),
              "--output-dir", str(scratch / "grid"), "--runs", "2"])
    for line in (scratch / "grid" / "ablation.csv").read_text().splitlines():
        if not line.startswith("#"):
            print("  " + line)
