import csv
import logging
from collections.abc import Sequence
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict

from genomotif.motif import MotifGeometry
from genomotif.nn import Network
from genomotif.pipeline.dataset import motif_features, to_inputs
from genomotif.seqio import QualityConfig, Region, Reject, SequenceRecord, quality_filter
from genomotif.susan import SusanParams

logger = logging.getLogger(__name__)

REPORT_COLUMNS = ("accession", "location", "asia", "europe", "america", "oceania", "predicted")


class PredictionReport(BaseModel):
    """Per-region probabilities of one sequence, as percentages in region order."""

    model_config = ConfigDict(frozen=True)

    accession: str
    location: str = ""
    percentages: tuple[float, float, float, float]

    @property
    def predicted(self) -> Region:
        return Region.from_index(int(np.argmax(self.percentages)))

    def line(self) -> str:
        """E.g. `ASIA: 98.826% EUR: 0.051% AME: 0.001% AUSTR: 1.121%`."""
        return " ".join(f"{region.short}: {pct:.3f}%" for region, pct in zip(Region, self.percentages, strict=True))


def report_from_probabilities(accession: str, probs: np.ndarray, location: str = "") -> PredictionReport:
    pct = tuple(float(p) * 100.0 for p in probs)
    return PredictionReport(accession=accession, location=location, percentages=pct)  # type: ignore[arg-type]


def predict(
    network: Network,
    record: SequenceRecord,
    geometry: MotifGeometry,
    params: SusanParams,
    quality: QualityConfig | None = None,
) -> PredictionReport:
    """Run one record through rasterize -> SUSAN -> network -> softmax.

    Records failing the quality gates are still predicted, with a warning.
    """
    return predict_many(network, [record], geometry, params, quality)[0]


def predict_many(
    network: Network,
    records: Sequence[SequenceRecord],
    geometry: MotifGeometry,
    params: SusanParams,
    quality: QualityConfig | None = None,
    batch_size: int = 64,
) -> list[PredictionReport]:
    quality = quality or QualityConfig()
    images = []
    for record in records:
        verdict = quality_filter(record, quality)
        if isinstance(verdict, Reject):
            logger.warning(f"{record.accession} fails quality gate ({verdict.reason}); predicting anyway")
        image, truncated = motif_features(record, geometry, params)
        if truncated:
            logger.warning(f"{record.accession}: {truncated} bases beyond motif capacity were dropped")
        images.append(image)
    if not images:
        return []

    probs = network.predict_proba(to_inputs(np.stack(images), network.spec.precision.dtype), batch_size=batch_size)
    return [report_from_probabilities(r.accession, p, r.location) for r, p in zip(records, probs, strict=True)]


def write_report_csv(reports: Sequence[PredictionReport], path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(REPORT_COLUMNS)
        for r in reports:
            writer.writerow([r.accession, r.location, *(f"{p:.3f}" for p in r.percentages), r.predicted.value])
