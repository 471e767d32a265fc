"""Stream construction and the online/offline training loops.

A stream is an ordered list of disjoint batches of (sample index, label)
pairs covering the selected training subset exactly once. Two partitions
are supported: ``step`` groups classes into consecutive sessions, and
``gaussian`` spreads each class around an evenly spaced center so class
arrival overlaps without boundaries.

All randomness derives from one root seed, split per purpose; pseudo-
feature generation is keyed by (seed, batch index, epoch), so resuming
from a checkpoint reproduces an uninterrupted run bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .augment import AugmentConfig, generate_for_batch
from .classifier import LinearHead, OptimizerConfig
from .dataio import FeatureDump
from .metrics import CheckpointAccuracy, RunReport, evaluate_checkpoint, finalize_report
from .stats import StatisticsStore

# purpose tags for seed splitting
_SCHEDULE_STREAM = 1
_AUGMENT_STREAM = 2
_SUBSAMPLE_STREAM = 3


def _stream_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, key)]))


@dataclass
class StreamSchedule:
    """Ordered disjoint batches over dataset indices, plus evaluation points.

    ``sessions`` holds [start, end) batch ranges for step partitions and is
    None for gaussian streams; ``checkpoint_batches`` are the batch indices
    after which accuracy is measured.
    """

    batches: list[list[tuple[int, int]]]
    batch_size: int
    seed: int
    kind: str
    checkpoint_batches: list[int]
    sessions: list[tuple[int, int]] | None = None

    def sample_indices(self) -> list[int]:
        return [idx for batch in self.batches for idx, _ in batch]


def _chunk(pairs: list[tuple[int, int]], batch_size: int) -> list[list[tuple[int, int]]]:
    return [pairs[i:i + batch_size] for i in range(0, len(pairs), batch_size)]


def make_step_schedule(
    dataset: FeatureDump, step: int, batch_size: int, seed: int
) -> StreamSchedule:
    """Group classes into sessions of ``step`` (ascending label order).

    Samples within a session are pooled, shuffled by the seed, and chunked
    into batches; the final batch of a session may be short. Session
    boundaries become evaluation checkpoints.
    """
    if dataset.record_count == 0:
        raise ValueError("dataset is empty")
    if step <= 0:
        raise ValueError("step must be positive")
    if batch_size <= 0:
        raise ValueError("batch_size must be positive")
    classes = dataset.classes()
    if step > len(classes):
        raise ValueError(f"step {step} exceeds class count {len(classes)}")
    rng = _stream_rng(seed, _SCHEDULE_STREAM)
    labels = dataset.labels.astype(np.int64)

    batches: list[list[tuple[int, int]]] = []
    sessions: list[tuple[int, int]] = []
    checkpoints: list[int] = []
    for start in range(0, len(classes), step):
        session_classes = classes[start:start + step]
        idx = np.flatnonzero(np.isin(labels, session_classes))
        idx = idx[rng.permutation(len(idx))]
        pairs = [(int(i), int(labels[i])) for i in idx]
        first = len(batches)
        batches.extend(_chunk(pairs, batch_size))
        sessions.append((first, len(batches)))
        checkpoints.append(len(batches) - 1)
    return StreamSchedule(
        batches=batches,
        batch_size=batch_size,
        seed=int(seed),
        kind="step",
        checkpoint_batches=checkpoints,
        sessions=sessions,
    )


def make_gaussian_schedule(
    dataset: FeatureDump,
    sigma: float,
    batch_size: int,
    seed: int,
    eval_every: int = 10,
) -> StreamSchedule:
    """Order samples by a Gaussian draw around evenly spaced class centers.

    Class centers sit on [0, 1] in label order; each sample's stream
    position is its center plus N(0, sigma^2) noise. There are no session
    boundaries, so evaluation happens every ``eval_every`` batches and
    after the final one.
    """
    if dataset.record_count == 0:
        raise ValueError("dataset is empty")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if batch_size <= 0 or eval_every <= 0:
        raise ValueError("batch_size and eval_every must be positive")
    classes = dataset.classes()
    centers = np.linspace(0.0, 1.0, len(classes)) if len(classes) > 1 else np.array([0.5])
    center_of = {c: centers[i] for i, c in enumerate(classes)}
    labels = dataset.labels.astype(np.int64)

    rng = _stream_rng(seed, _SCHEDULE_STREAM)
    positions = np.array([center_of[int(label)] for label in labels])
    positions = positions + sigma * rng.standard_normal(len(positions))
    order = np.argsort(positions, kind="stable")
    pairs = [(int(i), int(labels[i])) for i in order]
    batches = _chunk(pairs, batch_size)
    checkpoints = sorted(
        set(range(eval_every - 1, len(batches), eval_every)) | {len(batches) - 1}
    )
    return StreamSchedule(
        batches=batches,
        batch_size=batch_size,
        seed=int(seed),
        kind="gaussian",
        checkpoint_batches=checkpoints,
        sessions=None,
    )


def subsample_low_data(dataset: FeatureDump, fraction: float, seed: int) -> FeatureDump:
    """Per-class uniform subsample of ``ceil(fraction * count)`` samples."""
    if not 0.0 < fraction <= 1.0:
        raise ValueError("fraction must be in (0, 1]")
    rng = _stream_rng(seed, _SUBSAMPLE_STREAM)
    labels = dataset.labels.astype(np.int64)
    keep: list[np.ndarray] = []
    for c in dataset.classes():
        idx = np.flatnonzero(labels == c)
        take = math.ceil(fraction * len(idx))
        keep.append(rng.choice(idx, size=take, replace=False))
    selected = np.sort(np.concatenate(keep))
    return FeatureDump(labels=dataset.labels[selected], features=dataset.features[selected])


@dataclass
class RunConfig:
    """Everything needed to reproduce one run (used verbatim as the report echo)."""

    mode: str = "online"
    epochs: int | None = None  # resolved to 1 online / 40 offline
    batch_size: int = 50
    schedule_kind: str = "step"
    step: int = 1
    sigma: float = 0.1
    eval_every: int = 10
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    augment: AugmentConfig = field(default_factory=AugmentConfig)
    significance_enabled: bool = True
    low_data_fraction: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in ("online", "offline"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.schedule_kind not in ("step", "gaussian"):
            raise ValueError(f"unknown schedule kind {self.schedule_kind!r}")
        if self.epochs is None:
            self.epochs = 1 if self.mode == "online" else 40
        if self.mode == "online":
            self.epochs = 1  # online learning is single-pass by definition
        if self.epochs <= 0:
            raise ValueError("epochs must be positive")
        if not 0.0 < self.low_data_fraction <= 1.0:
            raise ValueError("low_data_fraction must be in (0, 1]")
        if self.seed < 0:
            raise ValueError("seed must be nonnegative")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "epochs": self.epochs,
            "batch_size": self.batch_size,
            "schedule": {
                "kind": self.schedule_kind,
                "step": self.step,
                "sigma": self.sigma,
                "eval_every": self.eval_every,
            },
            "optimizer": {
                "learning_rate": self.optimizer.learning_rate,
                "weight_decay": self.optimizer.weight_decay,
                "beta": self.optimizer.beta,
            },
            "augment": {
                "enabled": self.augment.enabled,
                "generator": self.augment.generator,
                "alpha": self.augment.alpha,
                "pseudo_per_real": self.augment.pseudo_per_real,
            },
            "significance_enabled": self.significance_enabled,
            "low_data_fraction": self.low_data_fraction,
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        schedule = data.get("schedule", {})
        return cls(
            mode=data.get("mode", "online"),
            epochs=data.get("epochs"),
            batch_size=data.get("batch_size", 50),
            schedule_kind=schedule.get("kind", "step"),
            step=schedule.get("step", 1),
            sigma=schedule.get("sigma", 0.1),
            eval_every=schedule.get("eval_every", 10),
            optimizer=OptimizerConfig(**data.get("optimizer", {})),
            augment=AugmentConfig(**data.get("augment", {})),
            significance_enabled=data.get("significance_enabled", True),
            low_data_fraction=data.get("low_data_fraction", 1.0),
            seed=data.get("seed", 0),
        )


def build_schedule(dataset: FeatureDump, config: RunConfig) -> StreamSchedule:
    if config.schedule_kind == "step":
        return make_step_schedule(dataset, config.step, config.batch_size, config.seed)
    return make_gaussian_schedule(
        dataset, config.sigma, config.batch_size, config.seed, config.eval_every
    )


def _batch_arrays(dataset: FeatureDump, batch):
    idx = np.fromiter((i for i, _ in batch), dtype=np.int64, count=len(batch))
    labels = [label for _, label in batch]
    return dataset.features[idx], labels


def _learn_batch(
    store: StatisticsStore,
    head: LinearHead,
    dataset: FeatureDump,
    batch,
    config: RunConfig,
    batch_index: int,
    epoch: int,
    observe: bool,
    track_loss: bool = False,
):
    """One stream step: expand, observe, generate, then a single SGD update."""
    features, labels = _batch_arrays(dataset, batch)
    new_labels = sorted(set(labels) - set(head.classes))
    head.expand_classes(new_labels)
    if observe:
        for feature, label in zip(features, labels):
            store.observe(label, feature)
    rng = _stream_rng(config.seed, _AUGMENT_STREAM, batch_index, epoch)
    pseudo = generate_for_batch(store, features, labels, config.augment, rng)
    real_pairs = list(zip(features, labels))
    pseudo_pairs = [(p.vector, p.label) for p in pseudo]
    loss = head.mean_ce_loss(real_pairs) if track_loss else None
    head.sgd_batch_step(real_pairs, pseudo_pairs, config.optimizer)
    return loss


def _evaluate(store, head, test_set, config) -> float:
    return evaluate_checkpoint(
        head,
        store,
        test_set,
        store.seen_classes(),
        use_bias_correction=config.significance_enabled,
    )


def train_online(
    schedule: StreamSchedule,
    dataset: FeatureDump,
    config: RunConfig,
    test_set: FeatureDump | None = None,
    resume=None,
):
    """Single-pass training over the schedule; every sample is used once.

    Per batch: grow the head for new labels, fold every sample into the
    statistics, generate pseudo-features for already-seen classes, then
    take one SGD step on real plus pseudo samples. Accuracy is recorded at
    the schedule's checkpoints when a test set is given.

    ``resume=(store, head, batches_done)`` continues a checkpointed run;
    results match an uninterrupted run exactly.
    """
    if config.mode != "online":
        raise ValueError("config.mode must be 'online'")
    if resume is None:
        store, head, start_batch = StatisticsStore(dataset.dim), LinearHead(dataset.dim), 0
    else:
        store, head, start_batch = resume
        if store.dim is not None and store.dim != dataset.dim:
            raise ValueError(
                f"dataset dimension {dataset.dim} does not match state dimension {store.dim}"
            )
    report = RunReport(config_echo=config.to_dict(), seed=config.seed)
    checkpoints = set(schedule.checkpoint_batches)
    n_eval = 0
    for t, batch in enumerate(schedule.batches):
        if t < start_batch:
            if t in checkpoints:
                n_eval += 1
            continue
        _learn_batch(store, head, dataset, batch, config, t, epoch=0, observe=True)
        if t in checkpoints:
            n_eval += 1
            if test_set is not None:
                acc = _evaluate(store, head, test_set, config)
                report.session_accuracies.append(
                    CheckpointAccuracy(n_eval, len(store.seen_classes()), acc)
                )
    if report.session_accuracies:
        report.last_accuracy, report.average_accuracy = finalize_report(
            [row.accuracy for row in report.session_accuracies]
        )
    return head, store, report


def train_offline(
    dataset: FeatureDump,
    config: RunConfig,
    test_set: FeatureDump | None = None,
):
    """Session-partitioned training with multiple passes per session.

    The step schedule is built from the config; each session's batches are
    replayed for ``config.epochs`` passes. Statistics observe samples only
    on the first pass, keeping prototypes exact means; pseudo-feature
    draws are re-keyed per epoch. Accuracy is recorded after each session.
    """
    if config.mode != "offline":
        raise ValueError("config.mode must be 'offline'")
    if config.schedule_kind != "step":
        raise ValueError("offline training requires a step-partitioned schedule")
    schedule = make_step_schedule(dataset, config.step, config.batch_size, config.seed)
    store, head = StatisticsStore(dataset.dim), LinearHead(dataset.dim)
    report = RunReport(
        config_echo=config.to_dict(), seed=config.seed, session_epoch_losses=[]
    )
    for s, (first, last) in enumerate(schedule.sessions):
        epoch_losses: list[float] = []
        for epoch in range(config.epochs):
            total, weight = 0.0, 0
            for t in range(first, last):
                batch = schedule.batches[t]
                loss = _learn_batch(
                    store, head, dataset, batch, config, t,
                    epoch=epoch, observe=(epoch == 0), track_loss=True,
                )
                total += loss * len(batch)
                weight += len(batch)
            epoch_losses.append(total / weight)
        report.session_epoch_losses.append(epoch_losses)
        if test_set is not None:
            acc = _evaluate(store, head, test_set, config)
            report.session_accuracies.append(
                CheckpointAccuracy(s + 1, len(store.seen_classes()), acc)
            )
    if report.session_accuracies:
        report.last_accuracy, report.average_accuracy = finalize_report(
            [row.accuracy for row in report.session_accuracies]
        )
    return head, store, report


def run_from_config(
    config: RunConfig, train_set: FeatureDump, test_set: FeatureDump | None = None
):
    """Apply low-data subsampling, build the schedule, and train per config."""
    if config.low_data_fraction < 1.0:
        train_set = subsample_low_data(train_set, config.low_data_fraction, config.seed)
    if config.mode == "online":
        schedule = build_schedule(train_set, config)
        return train_online(schedule, train_set, config, test_set)
    return train_offline(train_set, config, test_set)
