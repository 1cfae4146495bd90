import math
from dataclasses import dataclass, field

import numpy as np

from genomotif.nn import functional as F


@dataclass(eq=False)
class Parameter:
    name: str
    value: np.ndarray
    grad: np.ndarray = field(init=False)

    def __post_init__(self) -> None:
        self.grad = np.zeros_like(self.value)

    @property
    def size(self) -> int:
        return self.value.size


class Layer:
    """Base class: `forward` caches what `backward` needs; `backward` fills `Parameter.grad`
    and returns the gradient w.r.t. the layer input."""

    def __init__(self) -> None:
        self.training = True

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, grad: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def children(self) -> list["Layer"]:
        return []

    def own_parameters(self) -> list[Parameter]:
        return []

    def own_buffers(self) -> list[np.ndarray]:
        return []

    def parameters(self) -> list[Parameter]:
        return [*self.own_parameters(), *(p for child in self.children() for p in child.parameters())]

    def buffers(self) -> list[np.ndarray]:
        """Non-trainable state (batchnorm running statistics) in declaration order."""
        return [*self.own_buffers(), *(b for child in self.children() for b in child.buffers())]

    def modules(self) -> list["Layer"]:
        return [self, *(m for child in self.children() for m in child.modules())]

    def train(self, mode: bool = True) -> None:
        for module in self.modules():
            module.training = mode

    def eval(self) -> None:
        self.train(False)


class Conv2D(Layer):
    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        kernel_size: int,
        stride: int = 1,
        padding: int = 0,
        *,
        rng: np.random.Generator,
        dtype: np.dtype = np.dtype(np.float32),
        name: str = "conv",
    ) -> None:
        super().__init__()
        self.stride = stride
        self.padding = padding
        # He initialization for ReLU networks
        fan_in = in_channels * kernel_size * kernel_size
        w = rng.standard_normal((out_channels, in_channels, kernel_size, kernel_size)) * math.sqrt(2.0 / fan_in)
        self.weight = Parameter(f"{name}.weight", w.astype(dtype))
        self.bias = Parameter(f"{name}.bias", np.zeros(out_channels, dtype=dtype))
        self._x: np.ndarray | None = None

    @property
    def out_channels(self) -> int:
        return self.weight.value.shape[0]

    def own_parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return F.conv2d(x, self.weight.value, self.bias.value, self.stride, self.padding)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._x is not None, "backward called before forward"
        dx, dw, db = F.conv2d_backward(grad, self._x, self.weight.value, self.stride, self.padding)
        self.weight.grad[...] = dw
        self.bias.grad[...] = db
        return dx


class BatchNorm(Layer):
    """Per-channel batch normalization for `(N, C)` or `(N, C, H, W)` input.

    Running statistics follow `running = momentum * running + (1 - momentum) * batch`,
    with the unbiased batch variance.
    """

    def __init__(
        self,
        channels: int,
        momentum: float = 0.9,
        eps: float = 1e-5,
        *,
        dtype: np.dtype = np.dtype(np.float32),
        name: str = "norm",
    ) -> None:
        super().__init__()
        self.momentum = momentum
        self.eps = eps
        self.gamma = Parameter(f"{name}.gamma", np.ones(channels, dtype=dtype))
        self.beta = Parameter(f"{name}.beta", np.zeros(channels, dtype=dtype))
        self.running_mean = np.zeros(channels, dtype=dtype)
        self.running_var = np.ones(channels, dtype=dtype)
        self._cache: F.BatchNormCache | None = None

    def own_parameters(self) -> list[Parameter]:
        return [self.gamma, self.beta]

    def own_buffers(self) -> list[np.ndarray]:
        return [self.running_mean, self.running_var]

    def forward(self, x: np.ndarray) -> np.ndarray:
        if not self.training:
            return F.batchnorm_eval(x, self.gamma.value, self.beta.value, self.running_mean, self.running_var, self.eps)

        out, self._cache = F.batchnorm_train(x, self.gamma.value, self.beta.value, self.eps)
        m = x.size // x.shape[1]
        unbiased = self._cache.var * (m / (m - 1))
        # in place, so checkpoint references stay valid
        self.running_mean[...] = self.momentum * self.running_mean + (1 - self.momentum) * self._cache.mean
        self.running_var[...] = self.momentum * self.running_var + (1 - self.momentum) * unbiased
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._cache is not None, "backward called before a train-mode forward"
        dx, dgamma, dbeta = F.batchnorm_backward(grad, self.gamma.value, self._cache)
        self.gamma.grad[...] = dgamma
        self.beta.grad[...] = dbeta
        return dx


class ReLU(Layer):
    def __init__(self) -> None:
        super().__init__()
        self._x: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return F.relu(x)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._x is not None
        return F.relu_backward(grad, self._x)


class AvgPool2D(Layer):
    def __init__(self, size: int = 2) -> None:
        super().__init__()
        self.size = size

    def forward(self, x: np.ndarray) -> np.ndarray:
        return F.avg_pool2d(x, self.size)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return F.avg_pool2d_backward(grad, self.size)


class GlobalAvgPool(Layer):
    def __init__(self) -> None:
        super().__init__()
        self._spatial: tuple[int, int] = (1, 1)

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._spatial = (x.shape[2], x.shape[3])
        return F.global_avg_pool(x)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return F.global_avg_pool_backward(grad, self._spatial)


class Dropout(Layer):
    """Inverted dropout. In train mode `rng` must be set before each forward."""

    def __init__(self, rate: float = 0.5) -> None:
        super().__init__()
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"Dropout rate must be in [0, 1), got {rate}")
        self.rate = rate
        self.rng: np.random.Generator | None = None
        self._mask: np.ndarray | None = None

    def forward(self, x: np.ndarray) -> np.ndarray:
        out, self._mask = F.dropout(x, self.rate, self.training, self.rng)
        return out

    def backward(self, grad: np.ndarray) -> np.ndarray:
        return F.dropout_backward(grad, self._mask)


class Dense(Layer):
    def __init__(
        self,
        in_features: int,
        out_features: int,
        *,
        rng: np.random.Generator,
        dtype: np.dtype = np.dtype(np.float32),
        name: str = "dense",
    ) -> None:
        super().__init__()
        # Glorot uniform
        limit = math.sqrt(6.0 / (in_features + out_features))
        w = rng.uniform(-limit, limit, size=(out_features, in_features))
        self.weight = Parameter(f"{name}.weight", w.astype(dtype))
        self.bias = Parameter(f"{name}.bias", np.zeros(out_features, dtype=dtype))
        self._x: np.ndarray | None = None

    def own_parameters(self) -> list[Parameter]:
        return [self.weight, self.bias]

    def forward(self, x: np.ndarray) -> np.ndarray:
        self._x = x
        return F.dense(x, self.weight.value, self.bias.value)

    def backward(self, grad: np.ndarray) -> np.ndarray:
        assert self._x is not None
        dx, dw, db = F.dense_backward(grad, self._x, self.weight.value)
        self.weight.grad[...] = dw
        self.bias.grad[...] = db
        return dx


class Sequential(Layer):
    def __init__(self, *layers: Layer) -> None:
        super().__init__()
        self.layers = list(layers)

    def children(self) -> list[Layer]:
        return list(self.layers)

    def forward(self, x: np.ndarray) -> np.ndarray:
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad: np.ndarray) -> np.ndarray:
        for layer in reversed(self.layers):
            grad = layer.backward(grad)
        return grad
