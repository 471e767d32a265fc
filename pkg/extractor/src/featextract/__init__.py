"""Frozen-backbone image feature extraction to the I2FV dump format."""

from .backbones import Backbone, load_backbone, register_backbone, supported_backbones
from .datasets import load_dataset, register_dataset, supported_datasets
from .dumpio import write_feature_dump
from .extract import ExtractionJob, extract

__version__ = "0.1.0"

__all__ = [
    "Backbone",
    "ExtractionJob",
    "extract",
    "load_backbone",
    "load_dataset",
    "register_backbone",
    "register_dataset",
    "supported_backbones",
    "supported_datasets",
    "write_feature_dump",
]
