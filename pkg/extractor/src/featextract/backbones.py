"""Frozen pretrained backbones and their inference preprocessing.

Each entry loads an ImageNet-pretrained model with the classification head
removed, frozen and in eval mode, plus the standard inference transform.
Features come from the penultimate pooled layer (class token for the DINO
ViT).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import torch
from torch import nn
from torchvision import transforms

IMAGENET_MEAN = (0.485, 0.456, 0.406)
IMAGENET_STD = (0.229, 0.224, 0.225)


@dataclass
class Backbone:
    name: str
    model: nn.Module
    feature_dim: int
    transform: Callable


def _freeze(model: nn.Module) -> nn.Module:
    model.eval()
    for p in model.parameters():
        p.requires_grad_(False)
    return model


def _standard_transform() -> Callable:
    return transforms.Compose([
        transforms.Resize(256),
        transforms.CenterCrop(224),
        transforms.ToTensor(),
        transforms.Normalize(IMAGENET_MEAN, IMAGENET_STD),
    ])


def _load_resnet(arch: str, dim: int) -> Backbone:
    from torchvision import models

    weights = {"resnet50": models.ResNet50_Weights.IMAGENET1K_V1,
               "resnet18": models.ResNet18_Weights.IMAGENET1K_V1}[arch]
    model = getattr(models, arch)(weights=weights)
    model.fc = nn.Identity()  # drop the classification head; keep pooled features
    return Backbone(arch, _freeze(model), dim, _standard_transform())


def _load_dino_vits8() -> Backbone:
    # forward() of the DINO ViT returns the normalized class token
    model = torch.hub.load("facebookresearch/dino:main", "dino_vits8")
    return Backbone("dino_vits8", _freeze(model), 384, _standard_transform())


_REGISTRY: dict[str, Callable[[], Backbone]] = {
    "resnet50": lambda: _load_resnet("resnet50", 2048),
    "resnet18": lambda: _load_resnet("resnet18", 512),
    "dino_vits8": _load_dino_vits8,
}


def supported_backbones() -> list[str]:
    return sorted(_REGISTRY)


def register_backbone(name: str, loader: Callable[[], Backbone]) -> None:
    """Add a backbone loader (used by tests to plug in stub encoders)."""
    _REGISTRY[name] = loader


def load_backbone(name: str) -> Backbone:
    try:
        loader = _REGISTRY[name]
    except KeyError:
        raise ValueError(
            f"unknown backbone {name!r}; supported: {', '.join(supported_backbones())}"
        ) from None
    return loader()
