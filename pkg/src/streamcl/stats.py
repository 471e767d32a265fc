"""Streaming per-class feature statistics.

Each class keeps a running mean of its features (the prototype), a running
mean of the elementwise squared features, and a sample count. Both moments
are updated per sample with a simple moving average, so the retained state
is two vectors and one counter per class regardless of stream length.
Per-dimension standard deviations are derived on demand from the two
moments.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ClassStatistics:
    """First/second moment accumulators for a single class."""

    class_id: int
    prototype: np.ndarray       # running mean, float64, shape (dim,)
    sq_expectation: np.ndarray  # running mean of squares, float64, shape (dim,)
    count: int


class StatisticsStore:
    """Per-class streaming moments over a fixed feature dimension.

    ``observe`` is the single mutating operation and must be called from one
    logical writer at a time; reads (``std_of``, ``seen_classes``, ...) are
    safe to run concurrently with each other.
    """

    def __init__(self, dim: int | None = None):
        if dim is not None and dim <= 0:
            raise ValueError("dim must be positive")
        self._dim = dim
        self._classes: dict[int, ClassStatistics] = {}

    @property
    def dim(self) -> int | None:
        return self._dim

    def __len__(self) -> int:
        return len(self._classes)

    def __contains__(self, class_id: int) -> bool:
        return class_id in self._classes

    def _check_feature(self, feature) -> np.ndarray:
        arr = np.asarray(feature, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError(f"feature must be 1-D, got shape {arr.shape}")
        if self._dim is not None and arr.size != self._dim:
            raise ValueError(
                f"feature has dimension {arr.size}, store expects {self._dim}"
            )
        if not np.isfinite(arr).all():
            raise ValueError("feature contains non-finite components")
        return arr

    def observe(self, class_id: int, feature) -> None:
        """Fold one feature into the moments of ``class_id``.

        The first observation of a class initializes both moments directly
        from the feature; later ones apply the moving-average update
        ``m <- (m*n + x) / (n + 1)``.
        """
        arr = self._check_feature(feature)
        if self._dim is None:
            self._dim = arr.size
        stats = self._classes.get(class_id)
        if stats is None:
            self._classes[class_id] = ClassStatistics(
                class_id=int(class_id),
                prototype=arr.copy(),
                sq_expectation=arr * arr,
                count=1,
            )
            return
        n = stats.count
        stats.prototype = (stats.prototype * n + arr) / (n + 1)
        stats.sq_expectation = (stats.sq_expectation * n + arr * arr) / (n + 1)
        stats.count = n + 1

    def get(self, class_id: int) -> ClassStatistics:
        try:
            return self._classes[class_id]
        except KeyError:
            raise KeyError(f"class {class_id} has not been observed") from None

    def prototype_of(self, class_id: int) -> np.ndarray:
        return self.get(class_id).prototype

    def std_of(self, class_id: int) -> np.ndarray:
        """Per-dimension standard deviation ``sqrt(E[x^2] - E[x]^2)``.

        Negative residue from floating-point rounding is clamped to zero
        before the square root.
        """
        stats = self.get(class_id)
        variance = stats.sq_expectation - stats.prototype * stats.prototype
        return np.sqrt(np.clip(variance, 0.0, None))

    def count_of(self, class_id: int) -> int:
        return self.get(class_id).count

    def seen_classes(self) -> list[int]:
        """Observed class ids in ascending label order."""
        return sorted(self._classes)

    def state_arrays(self):
        """Dense snapshot (labels, counts, prototypes, sq_expectations).

        Rows follow ``seen_classes()`` order. Used by the checkpoint writer;
        arrays are copies and safe to hand to another thread.
        """
        labels = self.seen_classes()
        dim = self._dim if self._dim is not None else 0
        counts = np.array([self._classes[y].count for y in labels], dtype=np.uint64)
        protos = np.array(
            [self._classes[y].prototype for y in labels], dtype=np.float64
        ).reshape(len(labels), dim)
        sq = np.array(
            [self._classes[y].sq_expectation for y in labels], dtype=np.float64
        ).reshape(len(labels), dim)
        return np.array(labels, dtype=np.uint32), counts, protos, sq

    @classmethod
    def from_arrays(cls, dim, labels, counts, prototypes, sq_expectations):
        store = cls(dim=int(dim))
        for i, label in enumerate(labels):
            store._classes[int(label)] = ClassStatistics(
                class_id=int(label),
                prototype=np.asarray(prototypes[i], dtype=np.float64).copy(),
                sq_expectation=np.asarray(sq_expectations[i], dtype=np.float64).copy(),
                count=int(counts[i]),
            )
        return store
