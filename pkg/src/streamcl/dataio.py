"""Binary feature dumps, run checkpoints, and the synthetic benchmark generator.

Feature dump layout (all little-endian):

    magic         4 bytes  b"I2FV"
    version       u32      currently 1
    dim           u32
    record_count  u64
    records       record_count x (label: u32, values: dim x f32)

Values are 32-bit floats on disk and promoted to float64 in memory; the
synthetic generator quantizes to f32 up front so in-memory data equals a
write/read round trip exactly.

Checkpoint layout (magic b"I2CK", version 1) serializes the engine state
after a run: per-class statistics (one prototype vector, one squared-
expectation vector, one counter per class), the classifier head, the run
report as JSON, and the number of stream batches consumed. No raw training
features are ever written.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field

import numpy as np

from .classifier import LinearHead
from .stats import StatisticsStore

DUMP_MAGIC = b"I2FV"
DUMP_VERSION = 1
CHECKPOINT_MAGIC = b"I2CK"
CHECKPOINT_VERSION = 1

_DUMP_HEADER = struct.Struct("<4sIIQ")
_CHECKPOINT_HEADER = struct.Struct("<4sIIIQ")  # magic, version, dim, n_class, batches_done


class DumpFormatError(ValueError):
    """Base class for malformed dump or checkpoint files."""


class BadMagicError(DumpFormatError):
    pass


class VersionMismatchError(DumpFormatError):
    pass


class TruncatedDumpError(DumpFormatError):
    pass


class NonFiniteValueError(DumpFormatError):
    pass


@dataclass
class FeatureDump:
    """A labeled feature set: ``labels`` (n,) uint32 and ``features`` (n, dim) float64."""

    labels: np.ndarray
    features: np.ndarray

    def __post_init__(self):
        self.labels = np.asarray(self.labels, dtype=np.uint32)
        self.features = np.asarray(self.features, dtype=np.float64)
        if self.features.ndim != 2 or len(self.labels) != len(self.features):
            raise ValueError("features must be (n, dim) with one label per row")

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @property
    def record_count(self) -> int:
        return self.features.shape[0]

    def classes(self) -> list[int]:
        return sorted(int(c) for c in np.unique(self.labels))

    def class_counts(self) -> dict[int, int]:
        labels, counts = np.unique(self.labels, return_counts=True)
        return {int(label): int(n) for label, n in zip(labels, counts)}


def _record_dtype(dim: int) -> np.dtype:
    return np.dtype([("label", "<u4"), ("values", "<f4", (dim,))])


def write_dump(path, dump: FeatureDump) -> None:
    if not np.isfinite(dump.features).all():
        raise NonFiniteValueError("refusing to write non-finite feature values")
    records = np.empty(dump.record_count, dtype=_record_dtype(dump.dim))
    records["label"] = dump.labels
    records["values"] = dump.features.astype("<f4")
    with open(path, "wb") as fh:
        fh.write(_DUMP_HEADER.pack(DUMP_MAGIC, DUMP_VERSION, dump.dim, dump.record_count))
        fh.write(records.tobytes())


def read_dump(path) -> FeatureDump:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _DUMP_HEADER.size:
        raise TruncatedDumpError(f"file too short for header ({len(raw)} bytes)")
    magic, version, dim, count = _DUMP_HEADER.unpack_from(raw, 0)
    if magic != DUMP_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {DUMP_MAGIC!r}")
    if version != DUMP_VERSION:
        raise VersionMismatchError(f"unsupported version {version}, expected {DUMP_VERSION}")
    body = raw[_DUMP_HEADER.size:]
    expected = count * _record_dtype(dim).itemsize
    if len(body) < expected:
        raise TruncatedDumpError(
            f"declared {count} records but payload holds "
            f"{len(body) // max(1, _record_dtype(dim).itemsize)}"
        )
    if len(body) > expected:
        raise DumpFormatError(f"{len(body) - expected} trailing bytes after records")
    records = np.frombuffer(body, dtype=_record_dtype(dim))
    values = records["values"].astype(np.float64).reshape(count, dim)
    if not np.isfinite(values).all():
        raise NonFiniteValueError("dump contains non-finite feature values")
    return FeatureDump(labels=records["label"].copy(), features=values)


@dataclass
class StdProfile:
    """Per-class per-dimension STD recipe for synthetic data.

    A geometric ramp of STDs from ``low`` to ``high`` is permuted
    independently per class, so each class has its own discriminative
    (low-STD) dimensions. ``shared_factors`` > 0 mixes that many latent
    directions, shared across classes, into the deviations with weight
    ``factor_strength``; per-dimension marginal variance stays one, so
    empirical STDs still match the ramp while deviations of all classes
    share correlation structure.
    """

    low: float = 0.5
    high: float = 2.0
    shared_factors: int = 0
    factor_strength: float = 0.0

    def __post_init__(self):
        if self.low <= 0 or self.high < self.low:
            raise ValueError("need 0 < low <= high")
        if not 0.0 <= self.factor_strength < 1.0:
            raise ValueError("factor_strength must be in [0, 1)")
        if self.shared_factors < 0:
            raise ValueError("shared_factors must be nonnegative")


@dataclass
class SyntheticSpec:
    """Desk-scale stand-in for real feature dumps.

    ``offset_scale`` adds one positive mean component shared by every
    class, mimicking the common activation mass of pooled deep features;
    it is what makes a rehearsal-free online learner actually forget.
    """

    class_count: int = 20
    dim: int = 64
    train_per_class: int = 200
    test_per_class: int = 50
    mean_scale: float = 1.0
    offset_scale: float = 0.0
    std_profile: StdProfile = field(default_factory=StdProfile)
    seed: int = 0

    def __post_init__(self):
        if min(self.class_count, self.dim, self.train_per_class, self.test_per_class) <= 0:
            raise ValueError("all counts must be positive")

    def to_dict(self) -> dict:
        return {
            "class_count": self.class_count,
            "dim": self.dim,
            "train_per_class": self.train_per_class,
            "test_per_class": self.test_per_class,
            "mean_scale": self.mean_scale,
            "offset_scale": self.offset_scale,
            "std_profile": {
                "low": self.std_profile.low,
                "high": self.std_profile.high,
                "shared_factors": self.std_profile.shared_factors,
                "factor_strength": self.std_profile.factor_strength,
            },
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        profile = StdProfile(**data.get("std_profile", {}))
        keys = ("class_count", "dim", "train_per_class", "test_per_class",
                "mean_scale", "offset_scale", "seed")
        return cls(std_profile=profile, **{k: data[k] for k in keys if k in data})


def _sample_deviations(rng, n, dim, profile: StdProfile, loadings) -> np.ndarray:
    """Unit-marginal-variance deviations, optionally factor-correlated."""
    iid = rng.standard_normal((n, dim))
    if profile.shared_factors == 0 or profile.factor_strength == 0.0:
        return iid
    z = rng.standard_normal((n, profile.shared_factors))
    m = profile.factor_strength
    return m * (z @ loadings.T) + np.sqrt(1.0 - m * m) * iid


def generate_synthetic(spec: SyntheticSpec):
    """Seeded (train, test) feature dumps for the synthetic benchmark.

    Per class: a Gaussian mean at ``mean_scale`` spread, samples at
    ``mean + deviation * class_std``. Train and test use separate
    substreams of the seeded generator, so they are disjoint by
    construction. Output is quantized to f32 like the on-disk format.
    """
    root = np.random.SeedSequence(spec.seed)
    means_ss, perm_ss, factor_ss, offset_ss, train_ss, test_ss = root.spawn(6)
    k, dim = spec.class_count, spec.dim
    profile = spec.std_profile

    means = spec.mean_scale * np.random.default_rng(means_ss).standard_normal((k, dim))
    if spec.offset_scale > 0:
        offset = spec.offset_scale * np.abs(
            np.random.default_rng(offset_ss).standard_normal(dim)
        )
        means = means + offset[None, :]
    base_std = np.geomspace(profile.low, profile.high, dim)
    perm_rng = np.random.default_rng(perm_ss)
    class_std = np.array([base_std[perm_rng.permutation(dim)] for _ in range(k)])

    loadings = None
    if profile.shared_factors > 0:
        loadings = np.random.default_rng(factor_ss).standard_normal(
            (dim, profile.shared_factors)
        )
        loadings /= np.linalg.norm(loadings, axis=1, keepdims=True)  # unit row variance

    def build(split_ss, per_class):
        rng = np.random.default_rng(split_ss)
        labels = np.repeat(np.arange(k, dtype=np.uint32), per_class)
        features = np.empty((k * per_class, dim))
        for c in range(k):
            dev = _sample_deviations(rng, per_class, dim, profile, loadings)
            features[c * per_class:(c + 1) * per_class] = means[c] + dev * class_std[c]
        return FeatureDump(labels=labels, features=features.astype("<f4").astype(np.float64))

    return build(train_ss, spec.train_per_class), build(test_ss, spec.test_per_class)


def save_checkpoint(path, store: StatisticsStore, head: LinearHead, report, batches_done: int = 0) -> None:
    """Serialize engine state; ``report`` is stored as its JSON dict form."""
    from .metrics import report_to_dict  # local import to avoid a cycle

    labels, counts, protos, sq = store.state_arrays()
    if list(labels) != list(head.classes):
        raise ValueError("store and head class sets differ; refusing to checkpoint")
    dim = store.dim if store.dim is not None else head.dim
    report_blob = json.dumps(report_to_dict(report), sort_keys=True).encode("utf-8")
    with open(path, "wb") as fh:
        fh.write(
            _CHECKPOINT_HEADER.pack(
                CHECKPOINT_MAGIC, CHECKPOINT_VERSION, dim, len(labels), batches_done
            )
        )
        fh.write(labels.astype("<u4").tobytes())
        fh.write(counts.astype("<u8").tobytes())
        fh.write(protos.astype("<f8").tobytes())
        fh.write(sq.astype("<f8").tobytes())
        fh.write(head.weights.astype("<f8").tobytes())
        fh.write(struct.pack("<Q", len(report_blob)))
        fh.write(report_blob)


def load_checkpoint(path):
    """Inverse of :func:`save_checkpoint`.

    Returns ``(store, head, report, batches_done)`` with float64 state equal
    bit-for-bit to what was saved.
    """
    from .metrics import report_from_dict

    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _CHECKPOINT_HEADER.size:
        raise TruncatedDumpError("checkpoint too short for header")
    magic, version, dim, n_class, batches_done = _CHECKPOINT_HEADER.unpack_from(raw, 0)
    if magic != CHECKPOINT_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}, expected {CHECKPOINT_MAGIC!r}")
    if version != CHECKPOINT_VERSION:
        raise VersionMismatchError(
            f"unsupported version {version}, expected {CHECKPOINT_VERSION}"
        )
    offset = _CHECKPOINT_HEADER.size

    def take(dtype, shape):
        nonlocal offset
        count = int(np.prod(shape))
        nbytes = count * np.dtype(dtype).itemsize
        if len(raw) < offset + nbytes:
            raise TruncatedDumpError("checkpoint payload shorter than declared")
        arr = np.frombuffer(raw, dtype=dtype, count=count, offset=offset)
        offset += nbytes
        return arr.reshape(shape)

    labels = take("<u4", (n_class,))
    counts = take("<u8", (n_class,))
    protos = take("<f8", (n_class, dim)).astype(np.float64)
    sq = take("<f8", (n_class, dim)).astype(np.float64)
    weights = take("<f8", (n_class, dim)).astype(np.float64)
    if len(raw) < offset + 8:
        raise TruncatedDumpError("checkpoint missing report length")
    (report_len,) = struct.unpack_from("<Q", raw, offset)
    offset += 8
    blob = raw[offset:offset + report_len]
    if len(blob) != report_len:
        raise TruncatedDumpError("checkpoint report truncated")
    if len(raw) != offset + report_len:
        raise DumpFormatError("trailing bytes after checkpoint report")
    store = StatisticsStore.from_arrays(dim, labels, counts, protos, sq)
    head = LinearHead(dim, [int(label) for label in labels], weights)
    report = report_from_dict(json.loads(blob.decode("utf-8")))
    return store, head, report, int(batches_done)
