"""GMNN checkpoint format.

Layout (little-endian):

    b"GMNN" | u32 version | u32 header length | header JSON (UTF-8)
    | u32 tensor count | per tensor: u32 element count, float32 data

The header holds the `NetworkSpec` and the training state. Tensors follow
in declaration order: parameters, batchnorm running statistics, then the
optimizer's squared-gradient averages (if saved).
"""

import json
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import BinaryIO

import numpy as np
from pydantic import BaseModel, ConfigDict

from genomotif.errors import FormatError, ShapeMismatch
from genomotif.nn.network import Network, NetworkSpec, Precision
from genomotif.nn.optim import RMSProp

MAGIC = b"GMNN"
VERSION = 1


class TrainingState(BaseModel):
    model_config = ConfigDict(frozen=True)

    epoch: int = 0
    best_val_accuracy: float = 0.0
    seed: int = 0


@dataclass
class Checkpoint:
    network: Network
    state: TrainingState
    optimizer_state: list[np.ndarray] | None


def _header(network: Network, state: TrainingState, optimizer: RMSProp | None) -> bytes:
    payload = {
        "network": network.spec.model_dump(mode="json"),
        "state": state.model_dump(mode="json"),
        "tensors": {
            "parameters": len(network.parameters()),
            "buffers": len(network.buffers()),
            "optimizer": 0 if optimizer is None else len(optimizer.state),
        },
    }
    return json.dumps(payload, sort_keys=True, separators=(",", ":")).encode("utf-8")


def save_checkpoint(path: Path, network: Network, state: TrainingState, optimizer: RMSProp | None = None) -> None:
    tensors = [p.value for p in network.parameters()] + network.buffers()
    if optimizer is not None:
        tensors += optimizer.state

    header = _header(network, state, optimizer)
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", VERSION, len(header)))
        f.write(header)
        f.write(struct.pack("<I", len(tensors)))
        for t in tensors:
            f.write(struct.pack("<I", t.size))
            f.write(np.ascontiguousarray(t, dtype="<f4").tobytes())


def _read_exact(f: BinaryIO, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise FormatError(f"Truncated checkpoint while reading {what}: expected {n} bytes, got {len(data)}")
    return data


def load_checkpoint(path: Path, precision: Precision | None = None) -> Checkpoint:
    """Rebuild the network from the header spec and fill its tensors.

    Every tensor's element count is validated against the rebuilt network.
    `precision` overrides the stored spec's precision.
    """
    with open(path, "rb") as f:
        magic = _read_exact(f, 4, "magic")
        if magic != MAGIC:
            raise FormatError(f"{path}: not a GMNN checkpoint (magic {magic!r})")
        version, header_len = struct.unpack("<II", _read_exact(f, 8, "version"))
        if version != VERSION:
            raise FormatError(f"{path}: unsupported checkpoint version {version}")
        try:
            header = json.loads(_read_exact(f, header_len, "header").decode("utf-8"))
            spec = NetworkSpec.model_validate(header["network"])
            state = TrainingState.model_validate(header["state"])
            counts = header["tensors"]
        except (KeyError, ValueError) as e:
            raise FormatError(f"{path}: invalid checkpoint header: {e}") from e

        if precision is not None:
            spec = spec.model_copy(update={"precision": Precision(precision)})
        network = Network(spec, seed=state.seed)
        targets = [p.value for p in network.parameters()] + network.buffers()
        if counts["parameters"] + counts["buffers"] != len(targets):
            raise ShapeMismatch(f"{path}: header lists {counts} tensors, network has {len(targets)}")
        optimizer_state = [np.zeros_like(p.value) for p in network.parameters()] if counts["optimizer"] else None
        if optimizer_state is not None:
            targets += optimizer_state

        (count,) = struct.unpack("<I", _read_exact(f, 4, "tensor count"))
        if count != len(targets):
            raise ShapeMismatch(f"{path}: checkpoint has {count} tensors, expected {len(targets)}")
        for i, target in enumerate(targets):
            (size,) = struct.unpack("<I", _read_exact(f, 4, f"tensor {i} size"))
            if size != target.size:
                raise ShapeMismatch(f"{path}: tensor {i} has {size} elements, network expects shape {target.shape}")
            data = np.frombuffer(_read_exact(f, 4 * size, f"tensor {i}"), dtype="<f4")
            target[...] = data.reshape(target.shape)
        if f.read(1):
            raise FormatError(f"{path}: trailing bytes after the last tensor")

    return Checkpoint(network=network, state=state, optimizer_state=optimizer_state)


def restore_optimizer(optimizer: RMSProp, checkpoint: Checkpoint) -> None:
    if checkpoint.optimizer_state is None:
        return
    for v, saved in zip(optimizer.state, checkpoint.optimizer_state, strict=True):
        v[...] = saved
