import numpy as np
import pytest
import torch
from PIL import Image
from torch import nn
from torch.utils.data import Dataset
from torchvision import transforms

from featextract.backbones import Backbone, register_backbone
from featextract.datasets import register_dataset

STUB_DIM = 6


class StubEncoder(nn.Module):
    """Tiny deterministic conv encoder standing in for a pretrained backbone."""

    def __init__(self):
        super().__init__()
        torch.manual_seed(0)
        self.conv = nn.Conv2d(3, STUB_DIM, kernel_size=3, padding=1)
        self.pool = nn.AdaptiveAvgPool2d(1)

    def forward(self, x):
        return torch.flatten(self.pool(self.conv(x)), start_dim=1)


def _stub_backbone() -> Backbone:
    model = StubEncoder()
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    transform = transforms.Compose([
        transforms.Resize(12),
        transforms.CenterCrop(12),
        transforms.ToTensor(),
    ])
    return Backbone("stub", model, STUB_DIM, transform)


class StubImages(Dataset):
    """Deterministic label-colored noise images."""

    def __init__(self, split, transform, per_class=8, classes=3):
        rng = np.random.default_rng(0 if split == "train" else 1)
        self.items = []
        for label in range(classes):
            for _ in range(per_class):
                pixels = rng.integers(0, 60, size=(16, 16, 3)) + label * 60
                self.items.append((Image.fromarray(pixels.astype(np.uint8)), label))
        self.transform = transform

    def __len__(self):
        return len(self.items)

    def __getitem__(self, idx):
        image, label = self.items[idx]
        if self.transform is not None:
            image = self.transform(image)
        return image, label


@pytest.fixture(autouse=True)
def stub_registry():
    register_backbone("stub", _stub_backbone)
    register_dataset("stubdata", lambda root, split, transform: StubImages(split, transform))
    yield


def make_png(path, seed=0, size=8):
    rng = np.random.default_rng(seed)
    Image.fromarray(rng.integers(0, 255, size=(size, size, 3)).astype(np.uint8)).save(path)
