from genomotif.motif.colors import BASE_COLORS, BLACK, BLUE, GREEN, RED, WHITE, YELLOW, Rgb, base_color
from genomotif.motif.geometry import FillMode, MotifGeometry, Pixel, circle_points, disk_fill_order
from genomotif.motif.raster import (
    MotifImage,
    MotifManifest,
    MotifManifestEntry,
    rasterize,
    read_png,
    write_gray_png,
    write_png,
)

__all__ = [
    "BASE_COLORS",
    "BLACK",
    "BLUE",
    "FillMode",
    "GREEN",
    "MotifGeometry",
    "MotifImage",
    "MotifManifest",
    "MotifManifestEntry",
    "Pixel",
    "RED",
    "Rgb",
    "WHITE",
    "YELLOW",
    "base_color",
    "circle_points",
    "disk_fill_order",
    "rasterize",
    "read_png",
    "write_gray_png",
    "write_png",
]
