"""Continual-learning accuracy metrics and run reports."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .classifier import LinearHead
from .dataio import FeatureDump
from .significance import batch_importance
from .stats import StatisticsStore


class CheckpointAccuracy(NamedTuple):
    checkpoint: int      # 1-based evaluation index
    seen_classes: int
    accuracy: float      # percent


@dataclass
class RunReport:
    """Accuracy trajectory and configuration echo of one training run."""

    session_accuracies: list[CheckpointAccuracy] = field(default_factory=list)
    last_accuracy: float = 0.0
    average_accuracy: float = 0.0
    config_echo: dict = field(default_factory=dict)
    seed: int = 0
    session_epoch_losses: list[list[float]] | None = None


def evaluate_checkpoint(
    head: LinearHead,
    store: StatisticsStore,
    test_set: FeatureDump,
    seen_classes,
    use_bias_correction: bool = True,
) -> float:
    """Accuracy percent over the test samples whose label is already seen.

    With ``use_bias_correction`` the importance vector is computed per test
    sample from current statistics and added to the softmax scores,
    otherwise plain softmax decides. Ties resolve to the lowest class
    label, matching ``LinearHead.predict``.
    """
    seen = set(int(c) for c in seen_classes)
    mask = np.array([int(label) in seen for label in test_set.labels])
    if not mask.any():
        raise ValueError("no test samples belong to the seen classes")
    features = test_set.features[mask]
    labels = test_set.labels[mask].astype(np.int64)

    scores = head.batch_probabilities(features)
    if use_bias_correction:
        scores = scores + batch_importance(features, store)
    predicted = np.asarray(head.classes, dtype=np.int64)[np.argmax(scores, axis=1)]
    return float((predicted == labels).mean() * 100.0)


def finalize_report(checkpoint_accuracies) -> tuple[float, float]:
    """(last, average) accuracy over an ordered list of checkpoint accuracies."""
    accs = [float(a) for a in checkpoint_accuracies]
    if not accs:
        raise ValueError("at least one checkpoint accuracy is required")
    return accs[-1], float(np.mean(accs))


def report_to_dict(report: RunReport) -> dict:
    data = {
        "session_accuracies": [
            {"checkpoint": c, "seen_classes": s, "accuracy": a}
            for c, s, a in report.session_accuracies
        ],
        "last_accuracy": report.last_accuracy,
        "average_accuracy": report.average_accuracy,
        "config": report.config_echo,
        "seed": report.seed,
    }
    if report.session_epoch_losses is not None:
        data["session_epoch_losses"] = report.session_epoch_losses
    return data


def report_from_dict(data: dict) -> RunReport:
    return RunReport(
        session_accuracies=[
            CheckpointAccuracy(row["checkpoint"], row["seen_classes"], row["accuracy"])
            for row in data.get("session_accuracies", [])
        ],
        last_accuracy=data.get("last_accuracy", 0.0),
        average_accuracy=data.get("average_accuracy", 0.0),
        config_echo=data.get("config", {}),
        seed=data.get("seed", 0),
        session_epoch_losses=data.get("session_epoch_losses"),
    )


def write_metrics_csv(path, report: RunReport) -> None:
    """Per-checkpoint accuracies as CSV, config echo embedded as # comments."""
    with open(path, "w", newline="") as fh:
        fh.write(f"# config: {json.dumps(report.config_echo, sort_keys=True)}\n")
        fh.write(f"# seed: {report.seed}\n")
        writer = csv.writer(fh)
        writer.writerow(["checkpoint", "seen_classes", "accuracy"])
        for row in report.session_accuracies:
            writer.writerow([row.checkpoint, row.seen_classes, f"{row.accuracy:.6f}"])


def write_summary_json(path, report: RunReport) -> None:
    with open(path, "w") as fh:
        json.dump(report_to_dict(report), fh, sort_keys=True, indent=2)
        fh.write("\n")
