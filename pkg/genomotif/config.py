from collections.abc import Mapping
from pathlib import Path
from typing import TYPE_CHECKING, Any, Literal, Self

from dotenv import dotenv_values
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from genomotif.errors import ConfigError

if TYPE_CHECKING:
    from genomotif.motif import MotifGeometry
    from genomotif.nn import NetworkSpec
    from genomotif.pipeline import TrainConfig
    from genomotif.seqio import QualityConfig
    from genomotif.susan import SusanParams

THREADS_ENV = "GENOMOTIF_THREADS"


def read_key_values(path: Path) -> dict[str, str]:
    """Read flat `key = value` lines with python-dotenv; `-` in keys is read as `_`.

    Raises:
        ConfigError: If the file cannot be read or a key has no `=`.
    """
    if not path.is_file():
        raise ConfigError(f"Cannot read config file {path}: no such file")
    try:
        raw = dotenv_values(path, interpolate=False, encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e

    values: dict[str, str] = {}
    for key, value in raw.items():
        if value is None:
            raise ConfigError(f"{path}: expected 'key = value' for {key!r}")
        values[key.replace("-", "_")] = value
    return values


class PersistentConfig(BaseModel):
    """Base class for configuration persisted as a flat `key=value` file.

    Empty values mean "unset" and fall back to the field default.
    """

    model_config = ConfigDict(extra="forbid", validate_assignment=True, frozen=True)

    @classmethod
    def from_values(cls, values: Mapping[str, Any], source: str = "<config>") -> Self:
        try:
            return cls.model_validate({k: v for k, v in values.items() if v not in (None, "")})
        except ValidationError as e:
            raise ConfigError(f"{source}: invalid configuration: {e}") from e

    @classmethod
    def load(cls, path: Path) -> Self:
        """Load a config file; unknown keys are rejected."""
        return cls.from_values(read_key_values(path), str(path))

    def save(self, path: Path) -> None:
        lines = [f"{key} = {value}" for key, value in self.model_dump(mode="json").items() if value is not None]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")

    def with_overrides(self, **values: Any) -> Self:
        """Copy with the given fields replaced; `None` values are ignored."""
        updates = {k: v for k, v in values.items() if v is not None}
        if not updates:
            return self
        return self.from_values({**self.model_dump(), **updates}, "<command line>")


class CliConfig(PersistentConfig):
    """Every tunable of the command line, with defaults matching the documented design values."""

    # motif geometry
    size: int = Field(default=200, gt=0)
    max_radius: int | None = Field(default=None, ge=0)
    fill_mode: Literal["rings", "disk"] = "rings"

    # SUSAN
    t: float = Field(default=27.0, gt=0.0)
    g: float = Field(default=27.75, gt=0.0, le=37.0)
    output_mode: Literal["graded", "binary"] = "graded"
    similarity: Literal["smooth", "hard"] = "smooth"
    border: Literal["scaled", "unscaled"] = "scaled"

    # quality gates
    min_length: int = Field(default=29_000, gt=0)
    max_ambiguous_fraction: float = Field(default=0.05, ge=0.0, le=1.0)

    # network
    growth_rate: int = Field(default=8, ge=1)
    block_layers: int = Field(default=4, ge=1)
    num_blocks: int = Field(default=2, ge=1)
    compression: float = Field(default=0.5, gt=0.0, le=1.0)
    dropout: float = Field(default=0.5, ge=0.0, lt=1.0)

    # training
    epochs: int = Field(default=75, ge=1)
    batch_size: int = Field(default=32, ge=2)
    lr: float = Field(default=0.001, gt=0.0)
    seed: int = 0
    val_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    precision: Literal["float32", "float64"] = "float32"

    threads: int = Field(default=1, ge=1)

    @classmethod
    def resolve(
        cls,
        config_file: Path | None = None,
        overrides: Mapping[str, Any] | None = None,
        environ: Mapping[str, str] | None = None,
    ) -> Self:
        """Flag > config file > `GENOMOTIF_THREADS` (threads only) > default."""
        values: dict[str, Any] = {}
        if environ and environ.get(THREADS_ENV):
            values["threads"] = environ[THREADS_ENV]
        source = "<defaults>"
        if config_file is not None:
            values.update(read_key_values(config_file))
            source = str(config_file)
        config = cls.from_values(values, source)
        return config.with_overrides(**(overrides or {}))

    def geometry(self) -> "MotifGeometry":
        from genomotif.motif import FillMode, MotifGeometry

        return MotifGeometry.square(self.size, self.max_radius, FillMode(self.fill_mode))

    def susan(self) -> "SusanParams":
        from genomotif.susan import SusanParams

        return SusanParams(
            t=self.t,
            g=self.g,
            output_mode=self.output_mode,
            similarity=self.similarity,
            border=self.border,
        )

    def quality(self) -> "QualityConfig":
        from genomotif.seqio import QualityConfig

        return QualityConfig(min_length=self.min_length, max_ambiguous_fraction=self.max_ambiguous_fraction)

    def network_spec(self, image_size: int | None = None) -> "NetworkSpec":
        from genomotif.nn import DenseBlockSpec, NetworkSpec

        block = DenseBlockSpec(num_layers=self.block_layers, growth_rate=self.growth_rate)
        return NetworkSpec(
            image_size=image_size or self.size,
            blocks=(block,) * self.num_blocks,
            compression=self.compression,
            dropout=self.dropout,
            precision=self.precision,
        )

    def train_config(self) -> "TrainConfig":
        from genomotif.pipeline import TrainConfig

        return TrainConfig(
            epochs=self.epochs,
            batch_size=self.batch_size,
            learning_rate=self.lr,
            seed=self.seed,
            validation_fraction=self.val_fraction,
            precision=self.precision,
        )
