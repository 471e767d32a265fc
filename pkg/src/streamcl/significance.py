"""Attribute-significance weighting and the importance bias vector.

For each class, dimensions with smaller standard deviation are more
discriminative; a softmax over (max STD - STD) turns that into a positive
per-dimension weight row summing to one. Distances from a feature to each
class prototype, weighted by those rows, are inverted and normalized into
an importance vector that the classifier adds to its softmax output in
place of a trained bias.

All functions here are pure reads over a statistics snapshot and are
recomputed from current statistics rather than cached.
"""

from __future__ import annotations

import numpy as np

from .stats import StatisticsStore

ZERO_DISTANCE_GUARD = 1e-12


def significance_matrix(store: StatisticsStore) -> np.ndarray:
    """Per-class softmax weights over dimensions, shape (n_classes, dim).

    Row order follows ``store.seen_classes()``. Each row is
    ``softmax(max_i(std_i) - std)``: strictly positive, sums to one, and
    order-reverses the STD within the row.
    """
    classes = store.seen_classes()
    if not classes:
        raise ValueError("statistics store is empty")
    rows = []
    for y in classes:
        r = store.std_of(y)
        shifted = r.max() - r
        e = np.exp(shifted - shifted.max())
        rows.append(e / e.sum())
    return np.array(rows)


def weighted_distances(feature, store: StatisticsStore, matrix: np.ndarray) -> np.ndarray:
    """Significance-weighted squared distance to every class prototype.

    ``gamma[y] = sum_i matrix[y, i] * (feature_i - prototype(y)_i)^2`` with
    rows of ``matrix`` aligned to ``store.seen_classes()``.
    """
    f = np.asarray(feature, dtype=np.float64)
    classes = store.seen_classes()
    if matrix.shape != (len(classes), f.size):
        raise ValueError(
            f"matrix shape {matrix.shape} does not match "
            f"({len(classes)}, {f.size})"
        )
    gamma = np.empty(len(classes))
    for row, y in enumerate(classes):
        diff = f - store.prototype_of(y)
        gamma[row] = float(np.dot(matrix[row], diff * diff))
    return gamma


def batch_weighted_distances(
    features: np.ndarray, store: StatisticsStore, matrix: np.ndarray
) -> np.ndarray:
    """Vectorized ``weighted_distances`` over rows of ``features``.

    Returns shape (n_samples, n_classes); identical values to the
    per-sample form.
    """
    f = np.asarray(features, dtype=np.float64)
    classes = store.seen_classes()
    gamma = np.empty((f.shape[0], len(classes)))
    for row, y in enumerate(classes):
        diff = f - store.prototype_of(y)[None, :]
        gamma[:, row] = (diff * diff) @ matrix[row]
    return gamma


def importance_vector(gamma) -> np.ndarray:
    """Invert and normalize weighted distances: ``tau_y = sum(gamma) / gamma_y``.

    Exact prototype hits are guarded by a small epsilon so they produce the
    largest finite entry instead of a division failure. An all-zero gamma
    degenerates to a uniform vector of ones.
    """
    g = np.asarray(gamma, dtype=np.float64)
    if g.size == 0:
        raise ValueError("gamma must be non-empty")
    if (g < 0).any():
        raise ValueError("gamma entries must be nonnegative")
    total = g.sum()
    if total == 0.0:
        return np.ones_like(g)
    return total / np.maximum(g, ZERO_DISTANCE_GUARD)


def batch_importance(features: np.ndarray, store: StatisticsStore) -> np.ndarray:
    """Importance vectors for many features at once, shape (n_samples, n_classes)."""
    matrix = significance_matrix(store)
    gamma = batch_weighted_distances(features, store, matrix)
    totals = gamma.sum(axis=1, keepdims=True)
    tau = totals / np.maximum(gamma, ZERO_DISTANCE_GUARD)
    tau[np.broadcast_to(totals == 0.0, tau.shape)] = 1.0
    return tau
