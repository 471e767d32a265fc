"""Run a frozen backbone over an image dataset and dump the features."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import torch
from torch.utils.data import DataLoader

from .backbones import load_backbone
from .datasets import load_dataset
from .dumpio import write_feature_dump


@dataclass
class ExtractionJob:
    dataset: str
    split: str = "train"
    backbone: str = "resnet50"
    batch_size: int = 128
    output: str = "features.i2fv"
    data_root: str = "./data"
    device: str = "cpu"
    num_workers: int = 0  # single-process keeps extraction order deterministic


def extract(job: ExtractionJob) -> str:
    """Write one feature record per image, labels preserved, to ``job.output``.

    The backbone stays frozen in eval mode under ``no_grad``; with fixed
    preprocessing the dump is identical across re-runs.
    """
    backbone = load_backbone(job.backbone)
    dataset = load_dataset(job.dataset, job.data_root, job.split, backbone.transform)
    loader = DataLoader(dataset, batch_size=job.batch_size, shuffle=False,
                        num_workers=job.num_workers)
    device = torch.device(job.device)
    model = backbone.model.to(device)

    chunks, labels = [], []
    with torch.no_grad():
        for images, batch_labels in loader:
            features = model(images.to(device))
            if features.ndim != 2:
                features = torch.flatten(features, start_dim=1)
            chunks.append(features.cpu().to(torch.float32).numpy())
            labels.append(np.asarray(batch_labels, dtype=np.uint32))
    features = np.concatenate(chunks, axis=0)
    if features.shape[1] != backbone.feature_dim:
        raise RuntimeError(
            f"backbone {job.backbone!r} produced dimension {features.shape[1]}, "
            f"expected {backbone.feature_dim}"
        )
    write_feature_dump(job.output, np.concatenate(labels), features)
    return job.output
