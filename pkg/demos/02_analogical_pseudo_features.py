"""Analogical pseudo-feature generation.

Builds two 2-D classes with very different spreads, then transfers the
deviation of a fresh sample of class 0 onto class 1. The transferred
deviation keeps its sign pattern but is rescaled dimension by dimension to
the target class's spread -- unlike the Gaussian baseline, which draws an
unrelated deviation.
"""

import numpy as np

from streamcl import (
    StatisticsStore,
    generate_analogical,
    generate_gaussian_baseline,
    relative_distribution,
)

rng = np.random.default_rng(1)
store = StatisticsStore()

# class 0: wide in x, narrow in y; class 1: the opposite, elsewhere
for _ in range(400):
    store.observe(0, [rng.normal(0.0, 2.0), rng.normal(0.0, 0.2)])
    store.observe(1, [rng.normal(8.0, 0.3), rng.normal(8.0, 1.5)])

print("class 0: prototype", np.round(store.prototype_of(0), 3),
      "std", np.round(store.std_of(0), 3))
print("class 1: prototype", np.round(store.prototype_of(1), 3),
      "std", np.round(store.std_of(1), 3))

fresh = np.array([3.0, 0.25])  # strongly right, slightly up for class 0
q = relative_distribution(fresh, store.prototype_of(0))
print("\nfresh class-0 sample", fresh, "-> deviation", np.round(q, 3))

pseudo = generate_analogical(store, fresh, 0, 1)
transferred = pseudo.vector - store.prototype_of(1)
print("analogical pseudo-feature for class 1:", np.round(pseudo.vector, 3))
print("  its deviation from prototype 1     :", np.round(transferred, 3))
print("  per-dimension rescale factor       :",
      np.round(store.std_of(1) / (store.std_of(0) + 1e-8), 3))

baseline = generate_gaussian_baseline(store, 1, np.random.default_rng(2))
print("gaussian-noise baseline for class 1  :", np.round(baseline.vector, 3))

print("\nThe analogical deviation is a rescaled copy of a real one, so any")
print("correlation between dimensions survives the transfer; the baseline")
print("resamples each dimension independently and loses it.")
