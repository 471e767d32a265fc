"""Pseudo-feature generation for previously seen classes.

The analogical generator transplants a real feature's deviation from its
class prototype onto another class, rescaling each dimension by the ratio
of the two classes' standard deviations. A Gaussian-noise generator
(prototype plus independent per-dimension noise) is kept as the ablation
baseline.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .stats import StatisticsStore

DEFAULT_ALPHA = 1e-8

GENERATOR_KINDS = ("analogical", "gaussian")


@dataclass
class PseudoFeature:
    """A generated feature labeled as an already-seen class.

    ``source_label`` is the class of the real feature the deviation was
    taken from; it is ``None`` for noise-based generators that have no
    source sample.
    """

    vector: np.ndarray
    label: int
    source_label: int | None = None


@dataclass
class AugmentConfig:
    """Generation settings for the rehearsal stage of the training loop.

    ``pseudo_per_real`` is the number of pseudo-features generated per real
    feature; fractional values spread generation evenly across the batch
    (0.5 means one pseudo-feature for every other real one).
    """

    enabled: bool = True
    generator: str = "analogical"
    alpha: float = DEFAULT_ALPHA
    pseudo_per_real: float = 1.0

    def __post_init__(self):
        if self.generator == "gaussian_noise":  # accepted alias
            self.generator = "gaussian"
        if self.generator not in GENERATOR_KINDS:
            raise ValueError(
                f"unknown generator {self.generator!r}, expected one of {GENERATOR_KINDS}"
            )
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.pseudo_per_real < 0:
            raise ValueError("pseudo_per_real must be nonnegative")


def relative_distribution(feature, prototype) -> np.ndarray:
    """Deviation of a feature from its class prototype."""
    f = np.asarray(feature, dtype=np.float64)
    p = np.asarray(prototype, dtype=np.float64)
    if f.shape != p.shape:
        raise ValueError(f"shape mismatch: feature {f.shape} vs prototype {p.shape}")
    return f - p


def generate_analogical(
    store: StatisticsStore,
    feature,
    y: int,
    y_bar: int,
    alpha: float = DEFAULT_ALPHA,
) -> PseudoFeature:
    """Transfer a feature's deviation from class ``y`` onto class ``y_bar``.

    Elementwise: ``zeta = q * std(y_bar) / (std(y) + alpha) + prototype(y_bar)``
    where ``q = feature - prototype(y)``. ``alpha`` guards the division for
    dimensions with zero spread.
    """
    if y_bar == y:
        raise ValueError("target class must differ from the source class")
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    q = relative_distribution(feature, store.prototype_of(y))
    r_src = store.std_of(y)
    r_dst = store.std_of(y_bar)
    zeta = q * (r_dst / (r_src + alpha)) + store.prototype_of(y_bar)
    return PseudoFeature(vector=zeta, label=int(y_bar), source_label=int(y))


def sample_old_class(
    store: StatisticsStore, y: int, rng: np.random.Generator
) -> int | None:
    """Uniform draw over the seen classes other than ``y``; None if empty."""
    candidates = [c for c in store.seen_classes() if c != y]
    if not candidates:
        return None
    return candidates[int(rng.integers(len(candidates)))]


def generate_gaussian_baseline(
    store: StatisticsStore,
    y_bar: int,
    rng: np.random.Generator,
    source_label: int | None = None,
) -> PseudoFeature:
    """Prototype plus independent per-dimension Gaussian noise scaled by STD."""
    p = store.prototype_of(y_bar)
    r = store.std_of(y_bar)
    noise = rng.standard_normal(p.size)
    return PseudoFeature(vector=p + noise * r, label=int(y_bar), source_label=source_label)


def pseudo_counts(n_real: int, pseudo_per_real: float) -> list[int]:
    """How many pseudo-features each of ``n_real`` samples generates.

    Evenly spreads ``floor(n_real * pseudo_per_real)`` generations over the
    batch, so fractional rates are deterministic rather than stochastic.
    """
    return [
        int(np.floor((i + 1) * pseudo_per_real)) - int(np.floor(i * pseudo_per_real))
        for i in range(n_real)
    ]


def generate_for_batch(
    store: StatisticsStore,
    features: np.ndarray,
    labels,
    config: AugmentConfig,
    rng: np.random.Generator,
) -> list[PseudoFeature]:
    """Run the configured generator once over a batch of real features.

    The target class is drawn independently per generation. Samples whose
    class is the only one seen so far produce nothing.
    """
    if not config.enabled:
        return []
    out: list[PseudoFeature] = []
    counts = pseudo_counts(len(labels), config.pseudo_per_real)
    for i, (feature, y) in enumerate(zip(features, labels)):
        for _ in range(counts[i]):
            y_bar = sample_old_class(store, int(y), rng)
            if y_bar is None:
                continue
            if config.generator == "analogical":
                out.append(
                    generate_analogical(store, feature, int(y), y_bar, config.alpha)
                )
            else:
                out.append(
                    generate_gaussian_baseline(store, y_bar, rng, source_label=int(y))
                )
    return out
