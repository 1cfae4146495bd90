from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

Offset = tuple[int, int]

MASK_RADIUS = 3.4


class OutputMode(StrEnum):
    GRADED = "graded"
    BINARY = "binary"


class Similarity(StrEnum):
    SMOOTH = "smooth"
    HARD = "hard"


class BorderMode(StrEnum):
    SCALED = "scaled"
    UNSCALED = "unscaled"


def circular_mask(radius: float = MASK_RADIUS) -> tuple[Offset, ...]:
    """Offsets `(dx, dy)` with `dx² + dy² <= radius²`, row-major from the top-left."""
    reach = int(radius)
    return tuple(
        (dx, dy)
        for dy in range(-reach, reach + 1)
        for dx in range(-reach, reach + 1)
        if dx * dx + dy * dy <= radius * radius
    )


# 37 offsets, symmetric under negation, nucleus included
MASK: tuple[Offset, ...] = circular_mask()
MASK_SIZE = len(MASK)


class SusanParams(BaseModel):
    """Edge-branch parameters of the SUSAN filter.

    Attributes:
        t: Brightness threshold. Differences well below `t` count as similar.
        g: Geometric threshold on the USAN area; responses are emitted where the area is smaller.
        output_mode: `graded` scales responses to 0..255, `binary` emits 0 or 255.
        similarity: `smooth` uses `exp(-(d/t)^6)`, `hard` uses `|d| <= t`.
        border: `scaled` compares pixels near the edge against `g` scaled by their in-bounds mask
            fraction, `unscaled` applies `g` unchanged.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    t: float = Field(default=27.0, gt=0.0)
    g: float = Field(default=0.75 * MASK_SIZE, gt=0.0, le=MASK_SIZE)
    output_mode: OutputMode = OutputMode.GRADED
    similarity: Similarity = Similarity.SMOOTH
    border: BorderMode = BorderMode.SCALED

    @property
    def mask(self) -> tuple[Offset, ...]:
        return MASK
