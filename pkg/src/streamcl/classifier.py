"""Dynamic-width linear softmax head trained with online SGD.

The head has no trainable bias: at prediction time the importance vector
from :mod:`streamcl.significance` is added to the softmax output instead.
Rows are kept in ascending class-label order so they stay aligned with the
statistics store; growing the head for newly arrived classes never touches
existing rows.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np


@dataclass
class OptimizerConfig:
    learning_rate: float = 0.02
    weight_decay: float = 5e-5
    beta: float = 2.0  # loss weight of the pseudo-feature term

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0 or self.beta < 0:
            raise ValueError("weight_decay and beta must be nonnegative")


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


class LinearHead:
    """Weight matrix with one row per seen class, ascending label order."""

    def __init__(self, dim: int, classes=(), weights: np.ndarray | None = None):
        if dim <= 0:
            raise ValueError("dim must be positive")
        self.dim = int(dim)
        self.classes: list[int] = [int(c) for c in classes]
        if sorted(set(self.classes)) != self.classes:
            raise ValueError("classes must be strictly ascending and unique")
        if weights is None:
            self.weights = np.zeros((len(self.classes), self.dim))
        else:
            self.weights = np.asarray(weights, dtype=np.float64).copy()
            if self.weights.shape != (len(self.classes), self.dim):
                raise ValueError(
                    f"weights shape {self.weights.shape} does not match "
                    f"({len(self.classes)}, {self.dim})"
                )

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def _check_feature(self, feature) -> np.ndarray:
        f = np.asarray(feature, dtype=np.float64)
        if f.shape != (self.dim,):
            raise ValueError(f"feature shape {f.shape}, expected ({self.dim},)")
        return f

    def _row_of(self, label: int) -> int:
        try:
            return self.classes.index(int(label))
        except ValueError:
            raise KeyError(f"label {label} is not a current class") from None

    def logits_softmax(self, feature) -> np.ndarray:
        """Softmax of ``weights @ feature``, max-subtracted for overflow safety."""
        if self.n_classes == 0:
            raise ValueError("head has no classes")
        f = self._check_feature(feature)
        return _softmax(self.weights @ f)

    def batch_probabilities(self, features: np.ndarray) -> np.ndarray:
        """Row-per-sample softmax probabilities, shape (n_samples, n_classes)."""
        if self.n_classes == 0:
            raise ValueError("head has no classes")
        f = np.asarray(features, dtype=np.float64)
        return _softmax(f @ self.weights.T)

    def ce_loss_and_grad(self, feature, label: int):
        """Cross-entropy loss and its gradient w.r.t. the weights.

        ``grad = (softmax - onehot(label)) outer feature``.
        """
        row = self._row_of(label)
        f = self._check_feature(feature)
        probs = self.logits_softmax(f)
        loss = -float(np.log(probs[row]))
        delta = probs.copy()
        delta[row] -= 1.0
        return loss, np.outer(delta, f)

    def sgd_batch_step(self, real, pseudo, cfg: OptimizerConfig) -> None:
        """One SGD step on a batch of real plus pseudo (feature, label) pairs.

        Gradient is the mean over real cross-entropy gradients plus
        ``cfg.beta`` times the mean over pseudo ones; the update applies L2
        weight decay inside the step:
        ``w <- w - lr * (grad + weight_decay * w)``.
        """
        if len(real) == 0:
            warnings.warn("sgd_batch_step called with no real samples; skipping")
            return
        grad = self._mean_ce_grad(real)
        if cfg.beta > 0 and len(pseudo) > 0:
            grad = grad + cfg.beta * self._mean_ce_grad(pseudo)
        self.weights -= cfg.learning_rate * (grad + cfg.weight_decay * self.weights)

    def _mean_ce_grad(self, pairs) -> np.ndarray:
        feats = np.asarray([f for f, _ in pairs], dtype=np.float64)
        if feats.shape[1:] != (self.dim,):
            raise ValueError(f"features must have dimension {self.dim}")
        rows = np.array([self._row_of(label) for _, label in pairs])
        delta = self.batch_probabilities(feats)
        delta[np.arange(len(rows)), rows] -= 1.0
        return delta.T @ feats / len(rows)

    def mean_ce_loss(self, pairs) -> float:
        """Mean cross-entropy over (feature, label) pairs, no update."""
        feats = np.asarray([f for f, _ in pairs], dtype=np.float64)
        rows = np.array([self._row_of(label) for _, label in pairs])
        probs = self.batch_probabilities(feats)
        return float(-np.log(probs[np.arange(len(rows)), rows]).mean())

    def expand_classes(self, new_labels) -> None:
        """Add zero-initialized rows for previously unseen labels.

        Rows are inserted at their ascending-label position so the head
        stays aligned with the statistics store; existing rows are copied
        bit-for-bit, leaving old-class logits unchanged.
        """
        new = [int(label) for label in new_labels]
        if len(set(new)) != len(new) or any(label in self.classes for label in new):
            raise ValueError("new labels must be unique and disjoint from current ones")
        if not new:
            return
        merged = sorted(self.classes + new)
        weights = np.zeros((len(merged), self.dim))
        for old_row, label in enumerate(self.classes):
            weights[merged.index(label)] = self.weights[old_row]
        self.classes = merged
        self.weights = weights

    def predict(self, feature, tau=None):
        """Label and score vector for one feature.

        Scores are the softmax output plus the importance vector ``tau``
        (omitted -> plain softmax). Ties resolve to the lowest class label.
        """
        probs = self.logits_softmax(feature)
        if tau is not None:
            t = np.asarray(tau, dtype=np.float64)
            if t.shape != probs.shape:
                raise ValueError(
                    f"tau length {t.size} does not match {self.n_classes} classes"
                )
            scores = probs + t
        else:
            scores = probs
        return self.classes[int(np.argmax(scores))], scores

    def copy(self) -> "LinearHead":
        return LinearHead(self.dim, self.classes, self.weights)
