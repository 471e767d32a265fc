"""Buffer-free online continual learning on feature-vector streams.

The engine consumes labeled features one batch at a time, keeps only
per-class streaming moments, rehearses old classes through analogically
generated pseudo-features, and corrects a linear softmax head with a
significance-weighted importance vector instead of a trained bias.
"""

from .augment import (
    AugmentConfig,
    PseudoFeature,
    generate_analogical,
    generate_gaussian_baseline,
    relative_distribution,
    sample_old_class,
)
from .classifier import LinearHead, OptimizerConfig
from .dataio import (
    FeatureDump,
    StdProfile,
    SyntheticSpec,
    generate_synthetic,
    load_checkpoint,
    read_dump,
    save_checkpoint,
    write_dump,
)
from .metrics import (
    CheckpointAccuracy,
    RunReport,
    evaluate_checkpoint,
    finalize_report,
    write_metrics_csv,
    write_summary_json,
)
from .protocol import (
    RunConfig,
    StreamSchedule,
    build_schedule,
    make_gaussian_schedule,
    make_step_schedule,
    run_from_config,
    subsample_low_data,
    train_offline,
    train_online,
)
from .significance import (
    batch_importance,
    importance_vector,
    significance_matrix,
    weighted_distances,
)
from .stats import ClassStatistics, StatisticsStore

__version__ = "0.1.0"

__all__ = [
    "AugmentConfig",
    "ClassStatistics",
    "CheckpointAccuracy",
    "FeatureDump",
    "LinearHead",
    "OptimizerConfig",
    "PseudoFeature",
    "RunConfig",
    "RunReport",
    "StatisticsStore",
    "StdProfile",
    "StreamSchedule",
    "SyntheticSpec",
    "batch_importance",
    "build_schedule",
    "evaluate_checkpoint",
    "finalize_report",
    "generate_analogical",
    "generate_gaussian_baseline",
    "generate_synthetic",
    "importance_vector",
    "load_checkpoint",
    "make_gaussian_schedule",
    "make_step_schedule",
    "read_dump",
    "relative_distribution",
    "run_from_config",
    "sample_old_class",
    "save_checkpoint",
    "significance_matrix",
    "subsample_low_data",
    "train_offline",
    "train_online",
    "weighted_distances",
    "write_dump",
    "write_metrics_csv",
    "write_summary_json",
]
