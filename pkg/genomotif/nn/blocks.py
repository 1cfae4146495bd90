import math

import numpy as np

from genomotif.errors import ShapeMismatch
from genomotif.nn.layers import AvgPool2D, BatchNorm, Conv2D, Layer, ReLU, Sequential


def dense_layer(
    in_channels: int, growth_rate: int, *, rng: np.random.Generator, dtype: np.dtype, name: str
) -> Sequential:
    """batchnorm -> ReLU -> 3x3 conv producing `growth_rate` channels."""
    return Sequential(
        BatchNorm(in_channels, dtype=dtype, name=f"{name}.norm"),
        ReLU(),
        Conv2D(in_channels, growth_rate, 3, padding=1, rng=rng, dtype=dtype, name=f"{name}.conv"),
    )


class DenseBlock(Layer):
    """Densely connected stack: layer `l` consumes the channel concatenation of
    the block input and the outputs of layers `0..l-1`.

    Output channels are `in_channels + num_layers * growth_rate`.
    """

    def __init__(
        self,
        in_channels: int,
        num_layers: int,
        growth_rate: int,
        *,
        rng: np.random.Generator,
        dtype: np.dtype = np.dtype(np.float32),
        name: str = "block",
    ) -> None:
        super().__init__()
        if num_layers < 1 or growth_rate < 1:
            raise ValueError(f"Dense block needs num_layers >= 1 and growth_rate >= 1, got {num_layers}, {growth_rate}")
        self.in_channels = in_channels
        self.num_layers = num_layers
        self.growth_rate = growth_rate
        self.layers = [
            dense_layer(in_channels + i * growth_rate, growth_rate, rng=rng, dtype=dtype, name=f"{name}.layer{i}")
            for i in range(num_layers)
        ]

    @property
    def out_channels(self) -> int:
        return self.in_channels + self.num_layers * self.growth_rate

    @property
    def connection_count(self) -> int:
        """Concatenation edges, counting the block input as a source: `L(L+1)/2`."""
        return sum(i + 1 for i in range(self.num_layers))

    def children(self) -> list[Layer]:
        return list(self.layers)

    def _splits(self) -> list[int]:
        # channel offsets of the input and each layer output within the concatenation
        return [self.in_channels + i * self.growth_rate for i in range(self.num_layers)]

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatch(f"Dense block expects (N, {self.in_channels}, H, W) input, got {x.shape}")
        features = x
        for layer in self.layers:
            features = np.concatenate([features, layer.forward(features)], axis=1)
        return features

    def backward(self, grad: np.ndarray) -> np.ndarray:
        grad = grad.copy()
        # walk layers backwards; each adds its input gradient onto the prefix it consumed
        for layer, width in zip(reversed(self.layers), reversed(self._splits()), strict=True):
            grad_in = layer.backward(grad[:, width : width + self.growth_rate])
            grad[:, :width] += grad_in
        return grad[:, : self.in_channels]


class Transition(Sequential):
    """batchnorm -> 1x1 conv compressing channels by `compression` -> 2x2 average pool."""

    def __init__(
        self,
        in_channels: int,
        compression: float = 0.5,
        *,
        rng: np.random.Generator,
        dtype: np.dtype = np.dtype(np.float32),
        name: str = "transition",
    ) -> None:
        if not 0.0 < compression <= 1.0:
            raise ValueError(f"Compression must be in (0, 1], got {compression}")
        self.out_channels = max(1, math.floor(compression * in_channels))
        super().__init__(
            BatchNorm(in_channels, dtype=dtype, name=f"{name}.norm"),
            Conv2D(in_channels, self.out_channels, 1, rng=rng, dtype=dtype, name=f"{name}.conv"),
            AvgPool2D(2),
        )

    def forward(self, x: np.ndarray) -> np.ndarray:
        if x.ndim != 4 or x.shape[2] % 2 or x.shape[3] % 2:
            raise ShapeMismatch(f"Transition needs even spatial dims, got {x.shape}")
        return super().forward(x)
