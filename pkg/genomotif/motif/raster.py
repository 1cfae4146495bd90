import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image as PILImage
from pydantic import BaseModel, ConfigDict

from genomotif.motif.colors import COLOR_LUT, WHITE
from genomotif.motif.geometry import MotifGeometry, disk_fill_order


@dataclass(frozen=True, eq=False)
class MotifImage:
    """RGB motif raster (`height x width x 3`, uint8) for one sequence."""

    pixels: np.ndarray
    geometry: MotifGeometry
    source_accession: str = ""
    truncated: int = 0


def rasterize(bases: str, geometry: MotifGeometry, accession: str = "") -> MotifImage:
    """Color the i-th fill-order pixel with the i-th base; everything else stays white.

    Bases beyond the geometry's capacity are dropped and counted in
    `MotifImage.truncated`.
    """
    order = disk_fill_order(geometry)
    capacity = len(order)
    n = min(len(bases), capacity)

    pixels = np.empty((geometry.height, geometry.width, 3), dtype=np.uint8)
    pixels[...] = WHITE.as_tuple()
    if n:
        codes = np.frombuffer(bases[:n].encode("ascii", errors="replace"), dtype=np.uint8)
        xs, ys = order[:n, 0], order[:n, 1]
        pixels[ys, xs] = COLOR_LUT[codes]

    return MotifImage(
        pixels=pixels,
        geometry=geometry,
        source_accession=accession,
        truncated=max(0, len(bases) - capacity),
    )


def write_png(image: MotifImage | np.ndarray, path: Path) -> None:
    """Write an 8-bit RGB (or grayscale for 2-D arrays) PNG without alpha."""
    pixels = image.pixels if isinstance(image, MotifImage) else image
    if pixels.dtype != np.uint8:
        raise ValueError(f"PNG export needs uint8 pixels, got {pixels.dtype}")
    match pixels.shape:
        case (_, _) | (_, _, 3):
            pass
        case _:
            raise ValueError(f"Unsupported pixel array shape {pixels.shape}")
    # uint8 (h, w) maps to mode L, (h, w, 3) to RGB
    PILImage.fromarray(np.ascontiguousarray(pixels)).save(path, format="PNG")


def write_gray_png(pixels: np.ndarray, path: Path) -> None:
    if pixels.ndim != 2:
        raise ValueError(f"Expected a single-channel (h, w) array, got shape {pixels.shape}")
    write_png(pixels, path)


def read_png(path: Path) -> np.ndarray:
    """Decode a PNG into a uint8 array: `(h, w)` for grayscale, `(h, w, 3)` otherwise."""
    with PILImage.open(path) as img:
        if img.mode not in ("L", "RGB"):
            img = img.convert("RGB")
        return np.asarray(img, dtype=np.uint8).copy()


class MotifManifestEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    accession: str
    file: str
    capacity: int
    truncated: int


class MotifManifest(BaseModel):
    """Per-batch record of written motif files."""

    model_config = ConfigDict(frozen=True)

    geometry: MotifGeometry
    entries: list[MotifManifestEntry]

    def save(self, path: Path) -> None:
        payload = self.model_dump(mode="json")
        path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")

    @classmethod
    def load(cls, path: Path) -> "MotifManifest":
        return cls.model_validate(json.loads(path.read_text()))
