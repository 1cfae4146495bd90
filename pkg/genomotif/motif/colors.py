from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Rgb:
    r: int
    g: int
    b: int

    def __post_init__(self) -> None:
        for name, value in (("r", self.r), ("g", self.g), ("b", self.b)):
            if not 0 <= value <= 255:
                raise ValueError(f"Channel {name}={value} outside [0, 255]")

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.r, self.g, self.b)


WHITE = Rgb(255, 255, 255)
BLACK = Rgb(0, 0, 0)
YELLOW = Rgb(255, 255, 0)
BLUE = Rgb(0, 0, 255)
GREEN = Rgb(0, 255, 0)
RED = Rgb(255, 0, 0)

# U shares the T color; every other symbol is ambiguous and renders black.
BASE_COLORS: dict[str, Rgb] = {
    "A": YELLOW,
    "C": BLUE,
    "G": GREEN,
    "T": RED,
    "U": RED,
}


def base_color(base: str) -> Rgb:
    return BASE_COLORS.get(base, BLACK)


def _color_lut() -> np.ndarray:
    lut = np.zeros((256, 3), dtype=np.uint8)
    for base, color in BASE_COLORS.items():
        lut[ord(base)] = color.as_tuple()
    return lut


# byte value -> RGB, used to color whole sequences at once
COLOR_LUT = _color_lut()
COLOR_LUT.setflags(write=False)
