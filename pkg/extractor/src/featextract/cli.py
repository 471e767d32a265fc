"""Command line for feature extraction jobs."""

from __future__ import annotations

import argparse
import sys

from .backbones import supported_backbones
from .datasets import default_data_root, supported_datasets
from .extract import ExtractionJob, extract


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="i2fv-extract",
        description="Dump frozen-backbone image features in the I2FV format.",
    )
    parser.add_argument("--dataset", required=True,
                        help=f"one of: {', '.join(supported_datasets())}")
    parser.add_argument("--split", choices=["train", "test"], default="train")
    parser.add_argument("--backbone", default="resnet50",
                        help=f"one of: {', '.join(supported_backbones())}")
    parser.add_argument("--batch-size", type=int, default=128)
    parser.add_argument("--output", required=True, help="output .i2fv path")
    parser.add_argument("--data-root", default=default_data_root())
    parser.add_argument("--device", default="cpu")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    job = ExtractionJob(
        dataset=args.dataset,
        split=args.split,
        backbone=args.backbone,
        batch_size=args.batch_size,
        output=args.output,
        data_root=args.data_root,
        device=args.device,
    )
    try:
        path = extract(job)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {path}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
