from dataclasses import dataclass
from enum import StrEnum
from typing import Self

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from genomotif.errors import ShapeMismatch
from genomotif.nn.blocks import DenseBlock, Transition
from genomotif.nn.functional import softmax
from genomotif.nn.layers import BatchNorm, Conv2D, Dense, Dropout, GlobalAvgPool, Layer, Parameter, ReLU, Sequential


class Precision(StrEnum):
    FLOAT32 = "float32"
    FLOAT64 = "float64"

    @property
    def dtype(self) -> np.dtype:
        return np.dtype(self.value)


class DenseBlockSpec(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    num_layers: int = Field(default=4, ge=1)
    growth_rate: int = Field(default=8, ge=1)


class NetworkSpec(BaseModel):
    """Architecture of the dense-block classifier.

    The default is the desk-scale network: 3x3 stem (16 channels, stride 2),
    two dense blocks (4 layers, growth 8) joined by a transition, a final
    batchnorm and ReLU, global average pooling, 50% dropout and a 4-way
    dense head.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    in_channels: int = Field(default=3, ge=1)
    image_size: int = Field(default=200, ge=1)
    stem_channels: int = Field(default=16, ge=1)
    stem_kernel: int = Field(default=3, ge=1)
    stem_stride: int = Field(default=2, ge=1)
    blocks: tuple[DenseBlockSpec, ...] = (DenseBlockSpec(), DenseBlockSpec())
    compression: float = Field(default=0.5, gt=0.0, le=1.0)
    final_norm: bool = True
    dropout: float = Field(default=0.5, ge=0.0, lt=1.0)
    num_classes: int = Field(default=4, ge=2)
    precision: Precision = Precision.FLOAT32

    @model_validator(mode="after")
    def _check_spatial(self) -> Self:
        if not self.blocks:
            raise ValueError("Network needs at least one dense block")
        size = self.stem_output_size
        if size < 1:
            raise ValueError(f"Stem reduces a {self.image_size}px input to nothing")
        for i in range(len(self.blocks) - 1):
            if size % 2:
                raise ValueError(f"Transition {i} receives odd spatial size {size}; choose another image_size")
            size //= 2
        return self

    @property
    def stem_output_size(self) -> int:
        padding = self.stem_kernel // 2
        return (self.image_size + 2 * padding - self.stem_kernel) // self.stem_stride + 1

    @property
    def input_shape(self) -> tuple[int, int, int]:
        """Per-sample `(C, H, W)`."""
        return (self.in_channels, self.image_size, self.image_size)


@dataclass(frozen=True)
class ParameterCounts:
    trainable: int
    non_trainable: int

    @property
    def total(self) -> int:
        return self.trainable + self.non_trainable


class Network(Layer):
    """Dense-block CNN producing class logits from `(N, C, H, W)` input."""

    def __init__(self, spec: NetworkSpec | None = None, seed: int = 0) -> None:
        super().__init__()
        self.spec = spec or NetworkSpec()
        dtype = self.spec.precision.dtype
        rng = np.random.default_rng(seed)

        layers: list[Layer] = [
            Conv2D(
                self.spec.in_channels,
                self.spec.stem_channels,
                self.spec.stem_kernel,
                stride=self.spec.stem_stride,
                padding=self.spec.stem_kernel // 2,
                rng=rng,
                dtype=dtype,
                name="stem",
            )
        ]
        channels = self.spec.stem_channels
        self.dense_blocks: list[DenseBlock] = []
        for i, block_spec in enumerate(self.spec.blocks):
            block = DenseBlock(
                channels, block_spec.num_layers, block_spec.growth_rate, rng=rng, dtype=dtype, name=f"block{i}"
            )
            self.dense_blocks.append(block)
            layers.append(block)
            channels = block.out_channels
            if i < len(self.spec.blocks) - 1:
                transition = Transition(channels, self.spec.compression, rng=rng, dtype=dtype, name=f"transition{i}")
                layers.append(transition)
                channels = transition.out_channels
        if self.spec.final_norm:
            layers += [BatchNorm(channels, dtype=dtype, name="final.norm"), ReLU()]
        self.dropout = Dropout(self.spec.dropout)
        head = Dense(channels, self.spec.num_classes, rng=rng, dtype=dtype, name="head")
        layers += [GlobalAvgPool(), self.dropout, head]

        self.body = Sequential(*layers)
        self.feature_channels = channels

    def children(self) -> list[Layer]:
        return [self.body]

    def set_rng(self, rng: np.random.Generator | None) -> None:
        self.dropout.rng = rng

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.shape[1:] != self.spec.input_shape:
            expected = ", ".join(map(str, self.spec.input_shape))
            raise ShapeMismatch(f"Network expects (N, {expected}) input, got {x.shape}")
        return self.body.forward(x.astype(self.spec.precision.dtype, copy=False))

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return self.body.backward(grad)

    def predict_proba(self, x: np.ndarray, batch_size: int = 64) -> np.ndarray:
        """Eval-mode class probabilities; leaves the network in its previous mode."""
        was_training = self.training
        self.eval()
        try:
            chunks = [
                softmax(self.forward(x[i : i + batch_size]).astype(np.float64)) for i in range(0, len(x), batch_size)
            ]
        finally:
            self.train(was_training)
        if not chunks:
            return np.zeros((0, self.spec.num_classes))
        return np.concatenate(chunks, axis=0)

    def parameter_counts(self) -> ParameterCounts:
        return ParameterCounts(
            trainable=sum(p.size for p in self.parameters()),
            non_trainable=sum(b.size for b in self.buffers()),
        )

    def named_parameters(self) -> dict[str, Parameter]:
        return {p.name: p for p in self.parameters()}
