import math
from enum import StrEnum
from functools import lru_cache
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Pixel = tuple[int, int]


class FillMode(StrEnum):
    RINGS = "rings"
    DISK = "disk"


class MotifGeometry(BaseModel):
    """Square canvas and the circle region sequences are drawn into.

    Pixels are `(x, y)` pairs with `x` the column and `y` the row.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    width: int = Field(default=200, gt=0)
    height: int = Field(default=200, gt=0)
    center: tuple[int, int] = (100, 100)
    max_radius: int = Field(default=99, ge=0)
    fill_mode: FillMode = FillMode.RINGS

    @model_validator(mode="after")
    def _check_bounds(self) -> Self:
        cx, cy = self.center
        r = self.max_radius
        if cx - r < 0 or cy - r < 0 or cx + r >= self.width or cy + r >= self.height:
            raise ValueError(
                f"Circle at {self.center} with radius {r} does not fit a {self.width}x{self.height} canvas"
            )
        return self

    @classmethod
    def square(cls, size: int = 200, max_radius: int | None = None, fill_mode: FillMode = FillMode.RINGS) -> Self:
        """Centered geometry; `max_radius` defaults to the largest radius that fits."""
        return cls(
            width=size,
            height=size,
            center=(size // 2, size // 2),
            max_radius=size // 2 - 1 if max_radius is None else max_radius,
            fill_mode=fill_mode,
        )

    @property
    def capacity(self) -> int:
        return len(disk_fill_order(self))


def _angle(dx: int, dy: int) -> float:
    return math.atan2(dy, dx) % (2 * math.pi)


def circle_points(radius: int, center: Pixel = (0, 0)) -> list[Pixel]:
    """Midpoint-circle perimeter, counterclockwise from the east point.

    One octant is stepped with the midpoint decision (next pixel is
    `(x, y + 1)` or `(x - 1, y + 1)`) and mirrored 8-fold; duplicates on the
    axes and diagonals are removed.
    """
    if radius < 0:
        raise ValueError(f"radius must be >= 0, got {radius}")
    cx, cy = center
    if radius == 0:
        return [(cx, cy)]

    offsets: set[Pixel] = set()
    x, y = radius, 0
    decision = 1 - radius
    while x >= y:
        for dx, dy in ((x, y), (y, x), (-y, x), (-x, y), (-x, -y), (-y, -x), (y, -x), (x, -y)):
            offsets.add((dx, dy))
        y += 1
        if decision < 0:
            decision += 2 * y + 1
        else:
            x -= 1
            decision += 2 * (y - x) + 1

    ordered = sorted(offsets, key=lambda p: _angle(p[0], p[1]))
    return [(cx + dx, cy + dy) for dx, dy in ordered]


@lru_cache(maxsize=16)
def disk_fill_order(geometry: MotifGeometry) -> np.ndarray:
    """Total order of fillable pixels as a read-only `(capacity, 2)` array of `(x, y)`.

    Rings: midpoint circles for radius 0..max_radius, each counterclockwise
    from east; pixels on no ring are never filled. Disk: every pixel within
    `max_radius + 0.5`, ordered by rounded distance, then angle.
    """
    match geometry.fill_mode:
        case FillMode.RINGS:
            pixels = [p for r in range(geometry.max_radius + 1) for p in circle_points(r, geometry.center)]
            order = np.array(pixels, dtype=np.int64).reshape(-1, 2)
        case FillMode.DISK:
            order = _disk_order(geometry)
    order.setflags(write=False)
    return order


def _disk_order(geometry: MotifGeometry) -> np.ndarray:
    cx, cy = geometry.center
    limit = geometry.max_radius + 0.5
    ys, xs = np.mgrid[0 : geometry.height, 0 : geometry.width]
    dx = (xs - cx).ravel()
    dy = (ys - cy).ravel()
    dist2 = dx * dx + dy * dy
    inside = dist2 <= limit * limit
    dx, dy, dist2 = dx[inside], dy[inside], dist2[inside]

    ring = np.rint(np.sqrt(dist2)).astype(np.int64)
    angle = np.mod(np.arctan2(dy, dx), 2 * np.pi)
    order = np.lexsort((angle, ring))
    return np.stack([dx[order] + cx, dy[order] + cy], axis=1).astype(np.int64)
