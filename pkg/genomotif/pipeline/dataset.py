"""GMD1 dataset format, dataset assembly and stratified splitting.

Binary layout (little-endian):

    b"GMD1" | u32 count | u32 height | u32 width | u32 channels
    | per record: u8 label, height * width * channels bytes (row-major, channel-interleaved)

A JSON manifest next to the binary (`<name>.json`) carries accessions,
provenance and the region histogram.
"""

import json
import logging
import math
import struct
from collections.abc import Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from genomotif.errors import ClassTooSmall, EmptyDataset, FormatError, ShapeMismatch
from genomotif.motif import MotifGeometry, rasterize
from genomotif.seqio import NUM_REGIONS, MetadataEntry, Region, SequenceRecord, label_of
from genomotif.susan import SusanParams, replicate_channels, susan_edges, to_grayscale

logger = logging.getLogger(__name__)

MAGIC = b"GMD1"
_HEADER = struct.Struct("<4sIIII")


class DatasetManifest(BaseModel):
    """Sidecar provenance of a GMD1 file."""

    model_config = ConfigDict(frozen=True)

    accessions: list[str]
    region_histogram: dict[str, int]
    geometry: MotifGeometry | None = None
    susan: SusanParams | None = None
    truncated: dict[str, int] = Field(default_factory=dict)
    sources: dict[str, str] = Field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Equal-length images `(N, H, W, C)` uint8, labels `(N,)` region indices and accessions."""

    images: np.ndarray
    labels: np.ndarray
    accessions: list[str]
    manifest: DatasetManifest | None = None

    def __post_init__(self) -> None:
        if self.images.ndim != 4 or self.images.dtype != np.uint8:
            raise ShapeMismatch(f"Dataset images must be a uint8 (N, H, W, C) array, got {self.images.shape}")
        if not (len(self.images) == len(self.labels) == len(self.accessions)):
            raise ShapeMismatch(
                f"Dataset has {len(self.images)} images, {len(self.labels)} labels, {len(self.accessions)} accessions"
            )

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def image_shape(self) -> tuple[int, int, int]:
        return self.images.shape[1:]  # type: ignore[return-value]

    def histogram(self) -> dict[str, int]:
        counts = np.bincount(self.labels, minlength=NUM_REGIONS)
        return {region.value: int(counts[region.index]) for region in Region}

    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return Dataset(
            images=self.images[idx],
            labels=self.labels[idx],
            accessions=[self.accessions[i] for i in idx],
            manifest=self.manifest,
        )

    def inputs(
        self, indices: Sequence[int] | np.ndarray | None = None, dtype: np.dtype = np.dtype(np.float32)
    ) -> np.ndarray:
        images = self.images if indices is None else self.images[np.asarray(indices, dtype=np.int64)]
        return to_inputs(images, dtype)


def to_inputs(images: np.ndarray, dtype: np.dtype = np.dtype(np.float32)) -> np.ndarray:
    """Network input `(N, C, H, W)` from uint8 `(N, H, W, C)` images, pixels scaled to [0, 1]."""
    return np.ascontiguousarray(images.transpose(0, 3, 1, 2), dtype=dtype) / dtype.type(255)


def manifest_path(path: Path) -> Path:
    return path.with_suffix(".json")


def write_dataset(dataset: Dataset, path: Path) -> None:
    n, h, w, c = dataset.images.shape
    with open(path, "wb") as f:
        f.write(_HEADER.pack(MAGIC, n, h, w, c))
        for label, image in zip(dataset.labels, dataset.images, strict=True):
            f.write(struct.pack("<B", int(label)))
            f.write(np.ascontiguousarray(image).tobytes())

    manifest = dataset.manifest or DatasetManifest(
        accessions=list(dataset.accessions), region_histogram=dataset.histogram()
    )
    payload = manifest.model_dump(mode="json")
    manifest_path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def read_dataset(path: Path) -> Dataset:
    """Read a GMD1 file and its JSON manifest.

    Raises:
        FormatError: On a bad magic, a truncated body or an out-of-range label.
    """
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FormatError(f"{path}: too short for a GMD1 header")
    magic, n, h, w, c = _HEADER.unpack_from(data)
    if magic != MAGIC:
        raise FormatError(f"{path}: not a GMD1 dataset (magic {magic!r})")

    record_size = 1 + h * w * c
    expected = _HEADER.size + n * record_size
    if len(data) != expected:
        raise FormatError(f"{path}: expected {expected} bytes for {n} records of {h}x{w}x{c}, got {len(data)}")

    body = np.frombuffer(data, dtype=np.uint8, offset=_HEADER.size).reshape(n, record_size)
    labels = body[:, 0].astype(np.int64)
    if labels.size and labels.max() >= NUM_REGIONS:
        raise FormatError(f"{path}: label {labels.max()} outside 0..{NUM_REGIONS - 1}")
    images = body[:, 1:].reshape(n, h, w, c).copy()

    mpath = manifest_path(path)
    if mpath.exists():
        try:
            manifest = DatasetManifest.model_validate(json.loads(mpath.read_text()))
        except ValueError as e:
            raise FormatError(f"{mpath}: invalid dataset manifest: {e}") from e
        accessions = list(manifest.accessions)
        if len(accessions) != n:
            raise FormatError(f"{mpath}: lists {len(accessions)} accessions for {n} records")
    else:
        manifest = None
        accessions = [f"record{i}" for i in range(n)]

    return Dataset(images=images, labels=labels, accessions=accessions, manifest=manifest)


def motif_features(record: SequenceRecord, geometry: MotifGeometry, params: SusanParams) -> tuple[np.ndarray, int]:
    """rasterize -> grayscale -> SUSAN -> three channels; returns the image and the truncated count."""
    motif = rasterize(record.bases, geometry, record.accession)
    filtered = susan_edges(to_grayscale(motif), params)
    return replicate_channels(filtered), motif.truncated


def build_dataset(
    records: Sequence[SequenceRecord],
    metadata: Mapping[str, MetadataEntry],
    geometry: MotifGeometry,
    params: SusanParams,
    *,
    threads: int = 1,
    sources: Mapping[str, str] | None = None,
) -> Dataset:
    """Transform labeled records into a post-SUSAN dataset, preserving record order.

    Raises:
        EmptyDataset: If `records` is empty.
        UnlabeledRecord: If a record has no metadata row.
    """
    if not records:
        raise EmptyDataset("No accepted records to build a dataset from")
    labels = np.array([label_of(record, metadata).index for record in records], dtype=np.int64)

    logger.info(f"Building dataset from {len(records)} records with {threads} thread(s)")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda r: motif_features(r, geometry, params), records))
    else:
        results = [motif_features(r, geometry, params) for r in records]

    truncated = {r.accession: t for r, (_, t) in zip(records, results, strict=True) if t}
    if truncated:
        logger.warning(
            f"{len(truncated)} sequence(s) exceeded the motif capacity of {geometry.capacity} and were truncated"
        )

    images = np.stack([image for image, _ in results])
    accessions = [r.accession for r in records]
    dataset = Dataset(images=images, labels=labels, accessions=accessions)
    manifest = DatasetManifest(
        accessions=accessions,
        region_histogram=dataset.histogram(),
        geometry=geometry,
        susan=params,
        truncated=truncated,
        sources=dict(sources or {}),
    )
    return Dataset(images=images, labels=labels, accessions=accessions, manifest=manifest)


def split(dataset: Dataset, fraction: float = 0.2, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Stratified train/validation split.

    Each class is shuffled with a generator seeded by `(seed, class)` and
    `max(1, round(n * fraction))` of its samples are held out.

    Raises:
        ClassTooSmall: If a present class has fewer than 2 samples.
    """
    if not 0.0 < fraction < 1.0:
        raise ValueError(f"Validation fraction must be in (0, 1), got {fraction}")
    if len(dataset) == 0:
        raise EmptyDataset("Cannot split an empty dataset")

    train_idx: list[np.ndarray] = []
    val_idx: list[np.ndarray] = []
    for cls in range(NUM_REGIONS):
        members = np.flatnonzero(dataset.labels == cls)
        if members.size == 0:
            continue
        if members.size < 2:
            raise ClassTooSmall(f"Region {Region.from_index(cls).value} has {members.size} sample(s); need at least 2")
        shuffled = np.random.default_rng([seed, cls]).permutation(members)
        n_val = min(members.size - 1, max(1, math.floor(members.size * fraction + 0.5)))
        val_idx.append(shuffled[:n_val])
        train_idx.append(shuffled[n_val:])

    train = np.sort(np.concatenate(train_idx))
    val = np.sort(np.concatenate(val_idx))
    return dataset.subset(train), dataset.subset(val)
