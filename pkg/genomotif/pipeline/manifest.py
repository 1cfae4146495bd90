import hashlib
import json
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as package_version
from pathlib import Path
from typing import Any

from pydantic import BaseModel, ConfigDict, Field

RUN_MANIFEST_FILE = "run-manifest.json"


def tool_version() -> str:
    try:
        version = package_version("genomotif")
    except PackageNotFoundError:
        return "unknown"
    return version.split("+", 1)[0]


def file_digest(path: Path) -> str:
    """Hex-encoded SHA256 of the file contents."""
    return hashlib.sha256(path.read_bytes()).hexdigest()


class RunManifest(BaseModel):
    """Machine-readable record of one CLI run. Carries no timestamps, so repeated runs are byte-identical."""

    model_config = ConfigDict(frozen=True)

    command: str
    config: dict[str, Any]
    inputs: dict[str, str] = Field(default_factory=dict)
    artifacts: list[str] = Field(default_factory=list)
    version: str = Field(default_factory=tool_version)

    @classmethod
    def create(
        cls, command: str, config: dict[str, Any], inputs: list[Path], artifacts: list[Path], base: Path | None = None
    ) -> "RunManifest":
        def rel(p: Path) -> str:
            if base is not None and p.is_relative_to(base):
                return p.relative_to(base).as_posix()
            return p.as_posix()

        return cls(
            command=command,
            config=config,
            inputs={rel(p): file_digest(p) for p in inputs if p.is_file()},
            artifacts=sorted(rel(p) for p in artifacts),
        )

    def save(self, output_dir: Path) -> Path:
        path = output_dir / RUN_MANIFEST_FILE
        path.write_text(json.dumps(self.model_dump(mode="json"), indent=2, sort_keys=True) + "\n")
        return path
