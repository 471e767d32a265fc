import numpy as np
import pytest

from streamcl.augment import AugmentConfig
from streamcl.classifier import OptimizerConfig
from streamcl.dataio import FeatureDump, SyntheticSpec, generate_synthetic
from streamcl.metrics import report_to_dict
from streamcl.protocol import (
    RunConfig,
    make_gaussian_schedule,
    make_step_schedule,
    run_from_config,
    subsample_low_data,
    train_offline,
    train_online,
)


def toy_dataset(classes=4, per_class=30, dim=5, seed=0):
    spec = SyntheticSpec(class_count=classes, dim=dim, train_per_class=per_class,
                         test_per_class=10, seed=seed)
    return generate_synthetic(spec)


def naive_config(**kw):
    base = dict(
        mode="online",
        batch_size=10,
        step=1,
        augment=AugmentConfig(enabled=False),
        significance_enabled=False,
        seed=3,
    )
    base.update(kw)
    return RunConfig(**base)


# ---------------------------------------------------------------- schedules


def test_step_schedule_groups_classes_in_order():
    train, _ = toy_dataset(classes=4)
    schedule = make_step_schedule(train, step=2, batch_size=10, seed=0)
    assert len(schedule.sessions) == 2
    for (first, last), expected in zip(schedule.sessions, [{0, 1}, {2, 3}]):
        session_labels = {label for t in range(first, last) for _, label in schedule.batches[t]}
        assert session_labels == expected
    assert schedule.checkpoint_batches == [schedule.sessions[0][1] - 1,
                                           schedule.sessions[1][1] - 1]


def test_step_equal_to_class_count_is_one_session():
    train, _ = toy_dataset(classes=3)
    schedule = make_step_schedule(train, step=3, batch_size=16, seed=0)
    assert schedule.sessions == [(0, len(schedule.batches))]
    assert schedule.checkpoint_batches == [len(schedule.batches) - 1]


def test_step_schedule_covers_each_sample_once():
    train, _ = toy_dataset(classes=4, per_class=25)
    schedule = make_step_schedule(train, step=3, batch_size=7, seed=5)
    indices = schedule.sample_indices()
    assert sorted(indices) == list(range(train.record_count))
    # short final batch per session is kept
    sizes = [len(b) for b in schedule.batches]
    assert set(sizes) <= {7, 75 % 7, 25 % 7}
    assert all(int(train.labels[idx]) == label
               for batch in schedule.batches for idx, label in batch)


def test_step_schedule_determinism_and_seed_variation():
    train, _ = toy_dataset()
    a = make_step_schedule(train, step=2, batch_size=10, seed=1)
    b = make_step_schedule(train, step=2, batch_size=10, seed=1)
    c = make_step_schedule(train, step=2, batch_size=10, seed=2)
    assert a.batches == b.batches
    assert a.batches != c.batches


def test_step_schedule_errors():
    train, _ = toy_dataset(classes=3)
    empty = FeatureDump(labels=np.array([], dtype=np.uint32), features=np.zeros((0, 5)))
    with pytest.raises(ValueError):
        make_step_schedule(empty, step=1, batch_size=10, seed=0)
    with pytest.raises(ValueError):
        make_step_schedule(train, step=0, batch_size=10, seed=0)
    with pytest.raises(ValueError):
        make_step_schedule(train, step=4, batch_size=10, seed=0)


def test_gaussian_schedule_sigma_zero_limit_orders_by_class():
    train, _ = toy_dataset(classes=5, per_class=20)
    schedule = make_gaussian_schedule(train, sigma=1e-6, batch_size=10, seed=0)
    labels = [label for batch in schedule.batches for _, label in batch]
    assert labels == sorted(labels)


def test_gaussian_schedule_determinism_and_one_shot():
    train, _ = toy_dataset(classes=4, per_class=17)
    a = make_gaussian_schedule(train, sigma=0.2, batch_size=8, seed=9)
    b = make_gaussian_schedule(train, sigma=0.2, batch_size=8, seed=9)
    assert a.batches == b.batches
    assert sorted(a.sample_indices()) == list(range(train.record_count))
    assert a.sessions is None


def test_gaussian_schedule_checkpoint_cadence():
    train, _ = toy_dataset(classes=4, per_class=25)  # 100 samples
    schedule = make_gaussian_schedule(train, sigma=0.1, batch_size=10, seed=0, eval_every=3)
    assert schedule.checkpoint_batches == [2, 5, 8, 9]
    with pytest.raises(ValueError):
        make_gaussian_schedule(train, sigma=0.0, batch_size=10, seed=0)


def test_subsample_low_data():
    train, _ = toy_dataset(classes=3, per_class=50)
    same = subsample_low_data(train, 1.0, seed=4)
    assert np.array_equal(same.features, train.features)
    assert np.array_equal(same.labels, train.labels)
    tenth = subsample_low_data(train, 0.1, seed=4)
    assert tenth.class_counts() == {0: 5, 1: 5, 2: 5}
    again = subsample_low_data(train, 0.1, seed=4)
    assert np.array_equal(tenth.features, again.features)
    other = subsample_low_data(train, 0.1, seed=5)
    assert not np.array_equal(tenth.features, other.features)
    with pytest.raises(ValueError):
        subsample_low_data(train, 0.0, seed=0)
    with pytest.raises(ValueError):
        subsample_low_data(train, 1.2, seed=0)


# ------------------------------------------------------------------ config


def test_run_config_round_trip_and_defaults():
    config = RunConfig(seed=7)
    assert config.epochs == 1
    data = config.to_dict()
    again = RunConfig.from_dict(data)
    assert again.to_dict() == data
    offline = RunConfig.from_dict({"mode": "offline"})
    assert offline.epochs == 40
    forced = RunConfig(mode="online", epochs=5)
    assert forced.epochs == 1


def test_run_config_validation():
    with pytest.raises(ValueError):
        RunConfig(mode="sideways")
    with pytest.raises(ValueError):
        RunConfig(schedule_kind="spiral")
    with pytest.raises(ValueError):
        RunConfig(low_data_fraction=0.0)
    with pytest.raises(ValueError):
        RunConfig(seed=-1)


# ---------------------------------------------------------------- training


def softmax_rows(z):
    e = np.exp(z - z.max(axis=1, keepdims=True))
    return e / e.sum(axis=1, keepdims=True)


def reference_online_softmax(schedule, dataset, lr, wd):
    """Independent online softmax-regression loop (no rehearsal, no bias)."""
    classes: list[int] = []
    weights = np.zeros((0, dataset.dim))
    for batch in schedule.batches:
        for label in sorted({label for _, label in batch}):
            if label not in classes:
                pos = int(np.searchsorted(classes, label))
                classes.insert(pos, label)
                weights = np.insert(weights, pos, np.zeros(dataset.dim), axis=0)
        idx = [i for i, _ in batch]
        feats = dataset.features[idx]
        rows = np.array([classes.index(label) for _, label in batch])
        probs = softmax_rows(feats @ weights.T)
        probs[np.arange(len(rows)), rows] -= 1.0
        grad = probs.T @ feats / len(rows)
        weights = weights - lr * (grad + wd * weights)
    return classes, weights


def test_naive_run_matches_reference_loop():
    train, _ = toy_dataset(classes=3, per_class=40, dim=6, seed=2)
    config = naive_config(batch_size=10, step=1, seed=11)
    schedule = make_step_schedule(train, config.step, config.batch_size, config.seed)
    head, _, _ = train_online(schedule, train, config)
    classes, weights = reference_online_softmax(
        schedule, train, config.optimizer.learning_rate, config.optimizer.weight_decay
    )
    assert head.classes == classes
    np.testing.assert_allclose(head.weights, weights, rtol=0, atol=1e-9)


def test_online_run_accounts_every_sample_once():
    train, test = toy_dataset(classes=4, per_class=30)
    config = RunConfig(batch_size=7, step=2, seed=1)
    schedule = make_step_schedule(train, config.step, config.batch_size, config.seed)
    head, store, report = train_online(schedule, train, config, test)
    assert store.seen_classes() == [0, 1, 2, 3]
    for c, n in train.class_counts().items():
        assert store.count_of(c) == n
    assert head.classes == [0, 1, 2, 3]
    assert len(report.session_accuracies) == len(schedule.checkpoint_batches)
    assert report.last_accuracy == report.session_accuracies[-1].accuracy


def test_single_class_stream_never_generates_pseudo():
    train, _ = toy_dataset(classes=1, per_class=40)
    config_on = RunConfig(batch_size=10, step=1, seed=2,
                          augment=AugmentConfig(enabled=True))
    config_off = RunConfig(batch_size=10, step=1, seed=2,
                           augment=AugmentConfig(enabled=False))
    schedule = make_step_schedule(train, 1, 10, 2)
    head_on, _, _ = train_online(schedule, train, config_on)
    head_off, _, _ = train_online(schedule, train, config_off)
    assert np.array_equal(head_on.weights, head_off.weights)


def test_online_rejects_wrong_mode_and_dimension():
    train, _ = toy_dataset()
    schedule = make_step_schedule(train, 1, 10, 0)
    with pytest.raises(ValueError):
        train_online(schedule, train, RunConfig(mode="offline", seed=0))
    from streamcl.classifier import LinearHead
    from streamcl.stats import StatisticsStore
    with pytest.raises(ValueError):
        train_online(schedule, train, RunConfig(seed=0),
                     resume=(StatisticsStore(dim=9), LinearHead(9), 0))


def test_run_report_is_deterministic():
    train, test = toy_dataset(classes=4, per_class=25)
    config = RunConfig(batch_size=10, step=1, seed=5)
    a = run_from_config(config, train, test)[2]
    b = run_from_config(RunConfig(batch_size=10, step=1, seed=5), train, test)[2]
    assert report_to_dict(a) == report_to_dict(b)


def test_gaussian_run_reports_cadenced_checkpoints():
    train, test = toy_dataset(classes=4, per_class=25)
    config = RunConfig(batch_size=10, schedule_kind="gaussian", sigma=0.15,
                       eval_every=4, seed=6)
    head, store, report = run_from_config(config, train, test)
    assert [row.checkpoint for row in report.session_accuracies] == [1, 2, 3]
    assert store.seen_classes() == [0, 1, 2, 3]


def test_offline_epochs_one_equals_online():
    train, test = toy_dataset(classes=3, per_class=30)
    online = RunConfig(mode="online", batch_size=10, step=1, seed=4)
    offline = RunConfig(mode="offline", epochs=1, batch_size=10, step=1, seed=4)
    schedule = make_step_schedule(train, 1, 10, 4)
    head_a, store_a, _ = train_online(schedule, train, online, test)
    head_b, store_b, _ = train_offline(train, offline, test)
    assert np.array_equal(head_a.weights, head_b.weights)
    for y in store_a.seen_classes():
        assert np.array_equal(store_a.get(y).prototype, store_b.get(y).prototype)


def test_offline_multi_epoch_keeps_statistics_exact():
    train, test = toy_dataset(classes=3, per_class=20)
    config = RunConfig(mode="offline", epochs=3, batch_size=10, step=1, seed=8)
    _, store, report = train_offline(train, config, test)
    for c, n in train.class_counts().items():
        assert store.count_of(c) == n
    assert len(report.session_epoch_losses) == 3
    assert all(len(losses) == 3 for losses in report.session_epoch_losses)


def test_offline_training_loss_decreases():
    train, _ = toy_dataset(classes=3, per_class=40, dim=8, seed=1)
    ok, total = 0, 0
    for seed in range(10):
        config = RunConfig(
            mode="offline", epochs=4, batch_size=10, step=1, seed=seed,
            optimizer=OptimizerConfig(learning_rate=1e-3, weight_decay=5e-5, beta=2.0),
        )
        _, _, report = train_offline(train, config)
        for losses in report.session_epoch_losses:
            total += 1
            ok += losses[-1] <= losses[0]
    assert ok / total >= 0.9


def test_offline_requires_step_schedule():
    train, _ = toy_dataset()
    with pytest.raises(ValueError):
        train_offline(train, RunConfig(mode="offline", schedule_kind="gaussian", seed=0))


def test_resume_matches_uninterrupted_run(tmp_path):
    from streamcl.dataio import load_checkpoint, save_checkpoint

    train, test = toy_dataset(classes=4, per_class=30)
    config = RunConfig(batch_size=10, step=1, seed=9)
    schedule = make_step_schedule(train, config.step, config.batch_size, config.seed)
    full_head, full_store, full_report = train_online(schedule, train, config, test)

    half = len(schedule.batches) // 2
    truncated = type(schedule)(
        batches=schedule.batches[:half],
        batch_size=schedule.batch_size,
        seed=schedule.seed,
        kind=schedule.kind,
        checkpoint_batches=[t for t in schedule.checkpoint_batches if t < half],
        sessions=None,
    )
    head, store, _ = train_online(truncated, train, config, test)
    path = tmp_path / "mid.i2ck"
    save_checkpoint(path, store, head, full_report, batches_done=half)
    store2, head2, _, done = load_checkpoint(path)
    resumed_head, resumed_store, resumed_report = train_online(
        schedule, train, config, test, resume=(store2, head2, done)
    )
    assert np.array_equal(resumed_head.weights, full_head.weights)
    for y in full_store.seen_classes():
        assert np.array_equal(resumed_store.get(y).prototype, full_store.get(y).prototype)
        assert resumed_store.count_of(y) == full_store.count_of(y)
    tail = full_report.session_accuracies[-len(resumed_report.session_accuracies):]
    assert resumed_report.session_accuracies == tail


def test_low_data_fraction_flows_through_run():
    train, test = toy_dataset(classes=3, per_class=40)
    config = RunConfig(batch_size=5, step=1, seed=2, low_data_fraction=0.25)
    _, store, _ = run_from_config(config, train, test)
    assert all(store.count_of(c) == 10 for c in range(3))
