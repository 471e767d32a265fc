"""Writer for the I2FV feature-dump format.

Layout (little-endian): magic b"I2FV", version u32 (=1), dim u32,
record_count u64, then record_count x (label u32, values dim x f32).
This mirrors the consuming engine's public format byte for byte.
"""

from __future__ import annotations

import struct

import numpy as np

MAGIC = b"I2FV"
VERSION = 1
_HEADER = struct.Struct("<4sIIQ")


def write_feature_dump(path, labels: np.ndarray, features: np.ndarray) -> None:
    labels = np.asarray(labels)
    features = np.asarray(features)
    if features.ndim != 2 or len(labels) != len(features):
        raise ValueError("features must be (n, dim) with one label per row")
    if not np.isfinite(features).all():
        raise ValueError("refusing to write non-finite feature values")
    n, dim = features.shape
    records = np.empty(n, dtype=np.dtype([("label", "<u4"), ("values", "<f4", (dim,))]))
    records["label"] = labels
    records["values"] = features.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, VERSION, dim, n))
        fh.write(records.tobytes())
