"""Image dataset loaders keyed by name and split.

CIFAR datasets download through torchvision when a network is available;
CUB-200 and CoRe50 read standard local directory layouts. Every loader
yields (PIL image, integer label) pairs through a torch Dataset.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Callable

from PIL import Image
from torch.utils.data import Dataset

CORE50_TEST_SESSIONS = {3, 7, 10}  # conventional held-out sessions


class ImageList(Dataset):
    def __init__(self, entries: list[tuple[str, int]], transform=None):
        self.entries = entries
        self.transform = transform

    def __len__(self):
        return len(self.entries)

    def __getitem__(self, idx):
        path, label = self.entries[idx]
        image = Image.open(path).convert("RGB")
        if self.transform is not None:
            image = self.transform(image)
        return image, label


def _load_cifar(name: str, root: str, split: str, transform):
    from torchvision import datasets

    cls = {"cifar10": datasets.CIFAR10, "cifar100": datasets.CIFAR100}[name]
    try:
        return cls(root=root, train=(split == "train"), transform=transform, download=True)
    except Exception as exc:  # dataset archives unavailable offline
        raise RuntimeError(f"could not obtain {name} under {root}: {exc}") from exc


def _load_cub200(root: str, split: str, transform):
    base = Path(root) / "CUB_200_2011"
    required = ["images.txt", "image_class_labels.txt", "train_test_split.txt"]
    if not all((base / f).exists() for f in required):
        raise RuntimeError(
            f"CUB-200 layout not found under {base}; expected {', '.join(required)}"
        )
    paths = {}
    with open(base / "images.txt") as fh:
        for line in fh:
            idx, rel = line.split()
            paths[idx] = str(base / "images" / rel)
    labels = {}
    with open(base / "image_class_labels.txt") as fh:
        for line in fh:
            idx, label = line.split()
            labels[idx] = int(label) - 1
    wanted = "1" if split == "train" else "0"
    entries = []
    with open(base / "train_test_split.txt") as fh:
        for line in fh:
            idx, is_train = line.split()
            if is_train == wanted:
                entries.append((paths[idx], labels[idx]))
    entries.sort()
    return ImageList(entries, transform)


def _load_core50(root: str, split: str, transform):
    base = Path(root) / "core50_128x128"
    if not base.exists():
        raise RuntimeError(f"CoRe50 layout not found under {base}")
    entries = []
    for session_dir in sorted(base.glob("s*")):
        session = int(session_dir.name[1:])
        in_test = session in CORE50_TEST_SESSIONS
        if (split == "test") != in_test:
            continue
        for object_dir in sorted(session_dir.glob("o*")):
            label = int(object_dir.name[1:]) - 1
            for img in sorted(object_dir.iterdir()):
                entries.append((str(img), label))
    if not entries:
        raise RuntimeError(f"no CoRe50 images found for split {split!r}")
    return ImageList(entries, transform)


def _load_imagefolder(root: str, split: str, transform):
    base = Path(root) / split
    if not base.exists():
        raise RuntimeError(f"expected class-per-directory tree at {base}")
    classes = sorted(d.name for d in base.iterdir() if d.is_dir())
    entries = []
    for label, name in enumerate(classes):
        for img in sorted((base / name).iterdir()):
            entries.append((str(img), label))
    return ImageList(entries, transform)


_REGISTRY: dict[str, Callable] = {
    "cifar10": _load_cifar,
    "cifar100": _load_cifar,
    "cub200": lambda name, root, split, transform: _load_cub200(root, split, transform),
    "core50": lambda name, root, split, transform: _load_core50(root, split, transform),
    "imagefolder": lambda name, root, split, transform: _load_imagefolder(root, split, transform),
}


def supported_datasets() -> list[str]:
    return sorted(_REGISTRY)


def register_dataset(name: str, loader: Callable) -> None:
    """Add a dataset loader (used by tests to plug in synthetic data)."""
    _REGISTRY[name] = lambda _name, root, split, transform: loader(root, split, transform)


def load_dataset(name: str, root: str, split: str, transform):
    if split not in ("train", "test"):
        raise ValueError(f"split must be 'train' or 'test', got {split!r}")
    try:
        loader = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown dataset {name!r}; supported: {', '.join(supported_datasets())}"
        ) from None
    return loader(name, root, split, transform)


def default_data_root() -> str:
    return os.environ.get("FEATEXTRACT_DATA_ROOT", "./data")
