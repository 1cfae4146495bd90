import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from genomotif.errors import ShapeMismatch
from genomotif.motif.raster import MotifImage
from genomotif.susan.params import MASK, MASK_SIZE, BorderMode, OutputMode, Similarity, SusanParams

_REACH = max(max(abs(dx), abs(dy)) for dx, dy in MASK)


@dataclass(frozen=True, eq=False)
class GrayImage:
    pixels: np.ndarray
    source_accession: str = ""


@dataclass(frozen=True, eq=False)
class FilteredImage:
    """SUSAN edge output.

    `pixels` holds the quantized 8-bit map, `response` the float64 edge
    strength `R` it was quantized from.
    """

    pixels: np.ndarray
    response: np.ndarray
    source_accession: str = ""


def to_grayscale(image: MotifImage | np.ndarray, accession: str | None = None) -> GrayImage:
    """ITU-R 601 luma, rounded half up: `round(0.299 R + 0.587 G + 0.114 B)`."""
    if isinstance(image, MotifImage):
        pixels, source = image.pixels, image.source_accession
    else:
        pixels, source = image, ""
    if pixels.ndim != 3 or pixels.shape[2] != 3:
        raise ShapeMismatch(f"Expected an (h, w, 3) RGB array, got shape {pixels.shape}")

    rgb = pixels.astype(np.int64)
    # integer weights keep the rounding exact
    luma = (299 * rgb[..., 0] + 587 * rgb[..., 1] + 114 * rgb[..., 2] + 500) // 1000
    return GrayImage(pixels=luma.astype(np.uint8), source_accession=source if accession is None else accession)


@lru_cache(maxsize=32)
def similarity_lut(t: float, similarity: Similarity = Similarity.SMOOTH) -> np.ndarray:
    """Similarity `c` for every brightness difference -255..255, indexed by `difference + 255`."""
    diff = np.arange(-255, 256, dtype=np.float64)
    match similarity:
        case Similarity.SMOOTH:
            lut = np.exp(-((diff / t) ** 6))
        case Similarity.HARD:
            lut = (np.abs(diff) <= t).astype(np.float64)
    lut.setflags(write=False)
    return lut


def usan_area(gray: GrayImage, center: tuple[int, int], params: SusanParams) -> float:
    """USAN area `n` at pixel `center = (x, y)`: summed similarity over in-bounds mask offsets."""
    return _usan(gray.pixels, center, similarity_lut(params.t, params.similarity))[0]


def _usan(pixels: np.ndarray, center: tuple[int, int], lut: np.ndarray) -> tuple[float, int]:
    h, w = pixels.shape
    x, y = center
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"Pixel {center} outside a {w}x{h} image")
    nucleus = int(pixels[y, x])
    n = 0.0
    m = 0
    for dx, dy in MASK:
        px, py = x + dx, y + dy
        if 0 <= px < w and 0 <= py < h:
            n += float(lut[int(pixels[py, px]) - nucleus + 255])
            m += 1
    return n, m


def susan_edges(gray: GrayImage, params: SusanParams | None = None) -> FilteredImage:
    """Edge response for every pixel, vectorized over the image one mask offset at a time.

    Out-of-bounds offsets add `0.0` in mask order, so every per-pixel sum is
    bitwise equal to `susan_edges_naive`.
    """
    params = params or SusanParams()
    lut = similarity_lut(params.t, params.similarity)
    img = gray.pixels.astype(np.int64)
    h, w = img.shape

    padded = np.pad(img, _REACH, mode="constant")
    inside = np.pad(np.ones((h, w), dtype=bool), _REACH, mode="constant", constant_values=False)

    n = np.zeros((h, w), dtype=np.float64)
    m = np.zeros((h, w), dtype=np.int64)
    for dx, dy in MASK:
        rows = slice(_REACH + dy, _REACH + dy + h)
        cols = slice(_REACH + dx, _REACH + dx + w)
        valid = inside[rows, cols]
        n += np.where(valid, lut[padded[rows, cols] - img + 255], 0.0)
        m += valid

    match params.border:
        case BorderMode.SCALED:
            g_eff = params.g * m / MASK_SIZE
        case BorderMode.UNSCALED:
            g_eff = np.full((h, w), params.g)
    response = np.where(n < g_eff, g_eff - n, 0.0)
    return FilteredImage(
        pixels=_quantize(response, params),
        response=response,
        source_accession=gray.source_accession,
    )


def _quantize(response: np.ndarray, params: SusanParams) -> np.ndarray:
    match params.output_mode:
        case OutputMode.GRADED:
            scaled = np.floor(response / params.g * 255.0 + 0.5)
            return np.clip(scaled, 0, 255).astype(np.uint8)
        case OutputMode.BINARY:
            return np.where(response > 0.0, 255, 0).astype(np.uint8)


def susan_edges_naive(gray: GrayImage, params: SusanParams | None = None) -> FilteredImage:
    """Reference implementation: a direct per-pixel loop over the 37 mask offsets."""
    params = params or SusanParams()
    lut = similarity_lut(params.t, params.similarity)
    h, w = gray.pixels.shape
    response = np.zeros((h, w), dtype=np.float64)
    pixels = np.zeros((h, w), dtype=np.uint8)

    for y in range(h):
        for x in range(w):
            n, m = _usan(gray.pixels, (x, y), lut)
            g_eff = params.g * m / MASK_SIZE if params.border == BorderMode.SCALED else params.g
            r = g_eff - n if n < g_eff else 0.0
            response[y, x] = r
            if params.output_mode == OutputMode.GRADED:
                pixels[y, x] = min(255, max(0, math.floor(r / params.g * 255.0 + 0.5)))
            else:
                pixels[y, x] = 255 if r > 0.0 else 0

    return FilteredImage(pixels=pixels, response=response, source_accession=gray.source_accession)


def replicate_channels(filtered: FilteredImage | np.ndarray) -> np.ndarray:
    """Stack the single-channel map into three identical channels, `(h, w, 3)` uint8."""
    pixels = filtered.pixels if isinstance(filtered, FilteredImage) else filtered
    if pixels.ndim != 2:
        raise ShapeMismatch(f"Expected an (h, w) array, got shape {pixels.shape}")
    return np.repeat(pixels[:, :, np.newaxis], 3, axis=2)
