"""Command-line entry point: train, eval, synth, and ablate subcommands.

Every artifact carries the resolved configuration and seed so it can be
reproduced exactly. The default output directory comes from the
STREAMCL_OUTPUT_DIR environment variable when --output-dir is omitted.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import dataio, metrics
from .protocol import (
    RunConfig,
    build_schedule,
    run_from_config,
    subsample_low_data,
    train_offline,
    train_online,
)

CONFIG_VERSION = 1

ABLATION_VARIANTS = [
    ("naive", {"augment": False, "significance": False}),
    ("ican_only", {"augment": True, "significance": False}),
    ("isay_only", {"augment": False, "significance": True}),
    ("full", {"augment": True, "significance": True}),
]

QUANTITY_SWEEP = [0.0, 0.5, 1.0, 2.0]


class CliError(Exception):
    pass


def _output_dir(args) -> Path:
    path = args.output_dir or os.environ.get("STREAMCL_OUTPUT_DIR") or "."
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_config_file(path: str) -> dict:
    config_path = Path(path)
    if not config_path.exists():
        raise CliError(f"config file not found: {config_path}")
    with open(config_path) as fh:
        data = json.load(fh)
    version = data.get("version")
    if version != CONFIG_VERSION:
        raise CliError(f"unsupported config version {version!r}, expected {CONFIG_VERSION}")
    for key in ("train_dump", "test_dump"):
        if key not in data:
            raise CliError(f"config is missing {key!r}")
    return data


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    if getattr(args, "seed", None) is not None:
        config.seed = args.seed
    if getattr(args, "no_ican", False):
        config.augment.enabled = False
    if getattr(args, "no_isay", False):
        config.significance_enabled = False
    if getattr(args, "generator", None):
        config.augment.generator = args.generator
    if getattr(args, "pseudo_per_real", None) is not None:
        config.augment.pseudo_per_real = args.pseudo_per_real
    if getattr(args, "low_data", None) is not None:
        config.low_data_fraction = args.low_data
    return config


def _load_run_inputs(args):
    data = _load_config_file(args.config)
    config = _apply_overrides(RunConfig.from_dict(data.get("run", {})), args)
    train_set = dataio.read_dump(data["train_dump"])
    test_set = dataio.read_dump(data["test_dump"])
    return data, config, train_set, test_set


def cmd_train(args) -> int:
    _, config, train_set, test_set = _load_run_inputs(args)
    out = _output_dir(args)
    if config.low_data_fraction < 1.0:
        train_set = subsample_low_data(train_set, config.low_data_fraction, config.seed)
    if config.mode == "online":
        schedule = build_schedule(train_set, config)
        head, store, report = train_online(schedule, train_set, config, test_set)
        n_batches = len(schedule.batches)
    else:
        head, store, report = train_offline(train_set, config, test_set)
        n_batches = len(
            build_schedule(train_set, config).batches
        )
    metrics.write_metrics_csv(out / "metrics.csv", report)
    metrics.write_summary_json(out / "summary.json", report)
    dataio.save_checkpoint(out / "checkpoint.i2ck", store, head, report, n_batches)
    print(
        f"last accuracy {report.last_accuracy:.2f}%  "
        f"average accuracy {report.average_accuracy:.2f}%  "
        f"artifacts in {out}"
    )
    return 0


def cmd_eval(args) -> int:
    store, head, report, _ = dataio.load_checkpoint(args.checkpoint)
    test_set = dataio.read_dump(args.test_dump)
    if test_set.dim != head.dim:
        raise CliError(
            f"test dump dimension {test_set.dim} does not match checkpoint dimension {head.dim}"
        )
    use_bias = report.config_echo.get("significance_enabled", True)
    accuracy = metrics.evaluate_checkpoint(
        head, store, test_set, store.seen_classes(), use_bias_correction=use_bias
    )
    print(json.dumps({"accuracy": accuracy, "seen_classes": len(store.seen_classes()),
                      "records": test_set.record_count}, sort_keys=True))
    return 0


def cmd_synth(args) -> int:
    spec_path = Path(args.spec)
    if not spec_path.exists():
        raise CliError(f"synthetic spec file not found: {spec_path}")
    with open(spec_path) as fh:
        data = json.load(fh)
    if data.get("version", 1) != CONFIG_VERSION:
        raise CliError(f"unsupported spec version {data.get('version')!r}")
    spec = dataio.SyntheticSpec.from_dict(data)
    if args.seed is not None:
        spec.seed = args.seed
    train, test = dataio.generate_synthetic(spec)
    out = _output_dir(args)
    dataio.write_dump(out / "train.i2fv", train)
    dataio.write_dump(out / "test.i2fv", test)
    # the dump format is fixed, so the reproduction recipe goes in a sidecar
    with open(out / "manifest.json", "w") as fh:
        json.dump({"spec": spec.to_dict(), "seed": spec.seed}, fh, sort_keys=True, indent=2)
        fh.write("\n")
    print(f"wrote {train.record_count} train / {test.record_count} test records to {out}")
    return 0


def _summarize(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values)
    return float(arr.mean()), float(arr.std())


def cmd_ablate(args) -> int:
    data, base_config, train_set, test_set = _load_run_inputs(args)
    out = _output_dir(args)
    seeds = [base_config.seed + i for i in range(args.runs)]

    def run_cell(config_dict: dict) -> tuple[list[float], list[float]]:
        lasts, avgs = [], []
        for seed in seeds:
            config = RunConfig.from_dict({**config_dict, "seed": seed})
            _, _, report = run_from_config(config, train_set, test_set)
            lasts.append(report.last_accuracy)
            avgs.append(report.average_accuracy)
        return lasts, avgs

    rows = []
    base_dict = base_config.to_dict()
    for name, toggles in ABLATION_VARIANTS:
        cell = json.loads(json.dumps(base_dict))
        cell["augment"]["enabled"] = toggles["augment"]
        cell["significance_enabled"] = toggles["significance"]
        lasts, avgs = run_cell(cell)
        rows.append(("components", name, lasts, avgs))
    if args.sweep:
        for p in QUANTITY_SWEEP:
            cell = json.loads(json.dumps(base_dict))
            cell["augment"]["enabled"] = True
            cell["augment"]["pseudo_per_real"] = p
            cell["significance_enabled"] = True
            lasts, avgs = run_cell(cell)
            rows.append(("quantity", f"p={p}", lasts, avgs))

    path = out / "ablation.csv"
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {json.dumps(base_dict, sort_keys=True)}\n")
        fh.write(f"# seeds: {seeds}\n")
        writer = csv.writer(fh)
        writer.writerow(
            ["section", "row", "mean_last", "std_last", "mean_average", "std_average", "runs"]
        )
        for section, name, lasts, avgs in rows:
            mean_last, std_last = _summarize(lasts)
            mean_avg, std_avg = _summarize(avgs)
            writer.writerow(
                [section, name, f"{mean_last:.6f}", f"{std_last:.6f}",
                 f"{mean_avg:.6f}", f"{std_avg:.6f}", len(seeds)]
            )
    print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="streamcl",
        description="Online continual learning over feature streams, without memory buffers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--output-dir", help="artifact directory (default: $STREAMCL_OUTPUT_DIR or .)")
        p.add_argument("--seed", type=int, help="override the config seed")

    train = sub.add_parser("train", help="run one training configuration")
    train.add_argument("--config", required=True, help="versioned JSON run configuration")
    add_common(train)
    train.add_argument("--no-ican", action="store_true", help="disable pseudo-feature generation")
    train.add_argument("--no-isay", action="store_true", help="disable the importance-vector bias")
    train.add_argument("--generator", choices=["analogical", "gaussian"],
                       help="pseudo-feature generator")
    train.add_argument("--pseudo-per-real", type=float, dest="pseudo_per_real",
                       help="pseudo-features generated per real feature")
    train.add_argument("--low-data", type=float, dest="low_data",
                       help="per-class training fraction in (0, 1]")
    train.set_defaults(func=cmd_train)

    evalp = sub.add_parser("eval", help="evaluate a checkpoint on a feature dump")
    evalp.add_argument("--checkpoint", required=True)
    evalp.add_argument("--test-dump", required=True, dest="test_dump")
    evalp.set_defaults(func=cmd_eval)

    synth = sub.add_parser("synth", help="generate synthetic train/test dumps")
    synth.add_argument("--spec", required=True, help="JSON synthetic data spec")
    add_common(synth)
    synth.set_defaults(func=cmd_synth)

    ablate = sub.add_parser("ablate", help="component grid and optional quantity sweep")
    ablate.add_argument("--config", required=True)
    add_common(ablate)
    ablate.add_argument("--runs", type=int, default=5, help="seeds per grid cell")
    ablate.add_argument("--sweep", action="store_true",
                        help="also sweep pseudo-features per real over {0, 0.5, 1, 2}")
    ablate.set_defaults(func=cmd_ablate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (CliError, dataio.DumpFormatError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
