import csv
import io
import json
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict
from rich.console import Console
from rich.table import Table
from sklearn import metrics as sk_metrics

from genomotif.errors import DegenerateClass, EmptyDataset, ShapeMismatch
from genomotif.nn import Network
from genomotif.pipeline.dataset import Dataset
from genomotif.seqio import NUM_REGIONS, Region

METRICS_FILE = "metrics.json"
ROC_FILE = "roc.csv"
CONFUSION_FILE = "confusion.txt"


class RocPoint(BaseModel):
    model_config = ConfigDict(frozen=True)

    # None marks the anchor above every score, where nothing is predicted positive
    threshold: float | None
    fpr: float
    tpr: float


class RocCurve(BaseModel):
    model_config = ConfigDict(frozen=True)

    points: list[RocPoint]
    auc: float


class ClassMetrics(BaseModel):
    model_config = ConfigDict(frozen=True)

    region: Region
    precision: float
    recall: float
    f1: float
    support: int
    auc: float | None
    flags: list[str]


class MetricsReport(BaseModel):
    """Confusion matrix (rows true, columns predicted) and derived per-class and overall metrics."""

    model_config = ConfigDict(frozen=True)

    confusion: list[list[int]]
    classes: list[ClassMetrics]
    accuracy: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    micro_recall: float
    roc: dict[Region, RocCurve]

    @property
    def total(self) -> int:
        return int(np.sum(self.confusion))


def confusion_matrix(true: np.ndarray, pred: np.ndarray, num_classes: int = NUM_REGIONS) -> np.ndarray:
    true = np.asarray(true, dtype=np.int64)
    pred = np.asarray(pred, dtype=np.int64)
    if true.shape != pred.shape:
        raise ShapeMismatch(f"{true.shape[0]} labels but {pred.shape[0]} predictions")
    return sk_metrics.confusion_matrix(true, pred, labels=np.arange(num_classes)).astype(np.int64)


def pairwise_auc(scores: np.ndarray, positives: np.ndarray) -> float:
    """Mann-Whitney statistic: fraction of positive/negative pairs ranked correctly, ties count 1/2."""
    pos = scores[positives]
    neg = scores[~positives]
    if pos.size == 0 or neg.size == 0:
        raise DegenerateClass("AUC needs at least one positive and one negative sample")
    diff = pos[:, np.newaxis] - neg[np.newaxis, :]
    return float((np.sum(diff > 0) + 0.5 * np.sum(diff == 0)) / (pos.size * neg.size))


def roc_curve(scores: np.ndarray, positives: np.ndarray) -> RocCurve:
    """One-vs-rest ROC with one point per distinct score; tied scores share a threshold.

    Raises:
        DegenerateClass: If there are no positive or no negative samples.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    n_pos = int(positives.sum())
    n_neg = positives.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise DegenerateClass(f"ROC needs positives and negatives, got {n_pos} positive and {n_neg} negative")

    fpr, tpr, thresholds = sk_metrics.roc_curve(positives.astype(np.int64), scores, drop_intermediate=False)
    # the first point is the anchor above every score
    points = [RocPoint(threshold=None, fpr=float(fpr[0]), tpr=float(tpr[0]))]
    points += [
        RocPoint(threshold=float(t), fpr=float(f), tpr=float(r))
        for t, f, r in zip(thresholds[1:], fpr[1:], tpr[1:], strict=True)
    ]
    return RocCurve(points=points, auc=float(sk_metrics.auc(fpr, tpr)))


def metrics_report(labels: np.ndarray, probs: np.ndarray) -> MetricsReport:
    """Metrics for argmax predictions of `probs (N, 4)` against integer `labels (N,)`.

    Raises:
        EmptyDataset: If there are no samples.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size == 0:
        raise EmptyDataset("Cannot evaluate an empty dataset")
    if probs.shape != (labels.size, NUM_REGIONS):
        raise ShapeMismatch(f"Expected probabilities of shape ({labels.size}, {NUM_REGIONS}), got {probs.shape}")

    predictions = probs.argmax(axis=1)
    matrix = confusion_matrix(labels, predictions)
    predicted = matrix.sum(axis=0)
    actual = matrix.sum(axis=1)
    # zero denominators report 0 and are flagged below
    precision, recall, f1, support = sk_metrics.precision_recall_fscore_support(
        labels, predictions, labels=np.arange(NUM_REGIONS), average=None, zero_division=0
    )

    micro_recall = sk_metrics.recall_score(
        labels, predictions, labels=np.arange(NUM_REGIONS), average="micro", zero_division=0
    )

    classes: list[ClassMetrics] = []
    roc: dict[Region, RocCurve] = {}
    for region in Region:
        c = region.index
        flags = []
        if predicted[c] == 0:
            flags.append("precision_undefined")
        if actual[c] == 0:
            flags.append("recall_undefined")
        if precision[c] + recall[c] == 0:
            flags.append("f1_undefined")

        try:
            curve = roc_curve(probs[:, c], labels == c)
            roc[region] = curve
            auc: float | None = curve.auc
        except DegenerateClass:
            flags.append("auc_undefined")
            auc = None

        classes.append(
            ClassMetrics(
                region=region,
                precision=float(precision[c]),
                recall=float(recall[c]),
                f1=float(f1[c]),
                support=int(support[c]),
                auc=auc,
                flags=flags,
            )
        )

    return MetricsReport(
        confusion=matrix.tolist(),
        classes=classes,
        accuracy=float(sk_metrics.accuracy_score(labels, predictions)),
        macro_precision=float(np.mean(precision)),
        macro_recall=float(np.mean(recall)),
        macro_f1=float(np.mean(f1)),
        micro_recall=float(micro_recall),
        roc=roc,
    )


def evaluate(network: Network, dataset: Dataset, batch_size: int = 64) -> MetricsReport:
    if len(dataset) == 0:
        raise EmptyDataset("Cannot evaluate an empty dataset")
    probs = network.predict_proba(dataset.inputs(dtype=network.spec.precision.dtype), batch_size=batch_size)
    return metrics_report(dataset.labels, probs)


def render_confusion(report: MetricsReport) -> str:
    """Plain-text confusion matrix and per-class table."""
    matrix = Table(title="Confusion matrix (rows: true, columns: predicted)")
    matrix.add_column("true \\ pred")
    for region in Region:
        matrix.add_column(region.short, justify="right")
    for region, row in zip(Region, report.confusion, strict=True):
        matrix.add_row(region.short, *(str(v) for v in row))

    per_class = Table(title=f"Accuracy {report.accuracy:.4f}")
    for name in ("class", "precision", "recall", "f1", "support", "auc"):
        per_class.add_column(name, justify="left" if name == "class" else "right")
    for m in report.classes:
        auc = "n/a" if m.auc is None else f"{m.auc:.4f}"
        per_class.add_row(m.region.short, f"{m.precision:.4f}", f"{m.recall:.4f}", f"{m.f1:.4f}", str(m.support), auc)
    per_class.add_row(
        "macro", f"{report.macro_precision:.4f}", f"{report.macro_recall:.4f}", f"{report.macro_f1:.4f}", "", ""
    )

    console = Console(file=io.StringIO(), width=100, color_system=None, force_terminal=False)
    console.print(matrix)
    console.print(per_class)
    return console.file.getvalue()  # type: ignore[attr-defined]


def write_roc_csv(report: MetricsReport, path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["class", "threshold", "fpr", "tpr"])
        for region, curve in report.roc.items():
            for p in curve.points:
                threshold = "inf" if p.threshold is None else f"{p.threshold:.9g}"
                writer.writerow([region.value, threshold, f"{p.fpr:.9g}", f"{p.tpr:.9g}"])


def write_metrics(report: MetricsReport, output_dir: Path) -> list[Path]:
    """Write `metrics.json`, `roc.csv` and `confusion.txt`; returns the written paths."""
    output_dir.mkdir(parents=True, exist_ok=True)
    metrics_path = output_dir / METRICS_FILE
    payload = report.model_dump(mode="json", exclude={"roc"})
    metrics_path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    roc_path = output_dir / ROC_FILE
    write_roc_csv(report, roc_path)
    confusion_path = output_dir / CONFUSION_FILE
    confusion_path.write_text(render_confusion(report))
    return [metrics_path, roc_path, confusion_path]
