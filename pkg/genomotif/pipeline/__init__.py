from genomotif.pipeline.dataset import (
    Dataset,
    DatasetManifest,
    build_dataset,
    motif_features,
    read_dataset,
    split,
    to_inputs,
    write_dataset,
)
from genomotif.pipeline.manifest import RunManifest, file_digest, tool_version
from genomotif.pipeline.metrics import (
    ClassMetrics,
    MetricsReport,
    RocCurve,
    RocPoint,
    confusion_matrix,
    evaluate,
    metrics_report,
    pairwise_auc,
    render_confusion,
    roc_curve,
    write_metrics,
)
from genomotif.pipeline.predict import PredictionReport, predict, predict_many, write_report_csv
from genomotif.pipeline.synthetic import composition_profile, synthetic_corpus
from genomotif.pipeline.training import EpochStats, TrainConfig, TrainingResult, batch_indices, read_history, train

__all__ = [
    "ClassMetrics",
    "Dataset",
    "DatasetManifest",
    "EpochStats",
    "MetricsReport",
    "PredictionReport",
    "RocCurve",
    "RocPoint",
    "RunManifest",
    "TrainConfig",
    "TrainingResult",
    "batch_indices",
    "build_dataset",
    "composition_profile",
    "confusion_matrix",
    "evaluate",
    "file_digest",
    "metrics_report",
    "motif_features",
    "pairwise_auc",
    "predict",
    "predict_many",
    "read_dataset",
    "read_history",
    "render_confusion",
    "roc_curve",
    "split",
    "synthetic_corpus",
    "to_inputs",
    "tool_version",
    "train",
    "write_dataset",
    "write_metrics",
    "write_report_csv",
]
