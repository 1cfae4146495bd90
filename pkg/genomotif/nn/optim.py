from collections.abc import Iterable

import numpy as np

from genomotif.errors import ShapeMismatch
from genomotif.nn.layers import Parameter


def rmsprop_step(
    param: np.ndarray,
    grad: np.ndarray,
    v: np.ndarray,
    lr: float = 0.001,
    rho: float = 0.9,
    eps: float = 1e-8,
) -> tuple[np.ndarray, np.ndarray]:
    """One RMSProp update, returning `(param, v)`.

    v <- rho * v + (1 - rho) * grad^2
    param <- param - lr * grad / (sqrt(v) + eps)
    """
    if not (param.shape == grad.shape == v.shape):
        raise ShapeMismatch(f"param {param.shape}, grad {grad.shape} and v {v.shape} must have equal shape")
    v = rho * v + (1 - rho) * grad * grad
    param = param - lr * grad / (np.sqrt(v) + eps)
    return param, v


class RMSProp:
    """RMSProp over a fixed parameter list; keeps one squared-gradient average per parameter."""

    def __init__(self, params: Iterable[Parameter], lr: float = 0.001, rho: float = 0.9, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.rho = rho
        self.eps = eps
        self.state = [np.zeros_like(p.value) for p in self.params]

    def step(self) -> None:
        for p, v in zip(self.params, self.state, strict=True):
            value, v_new = rmsprop_step(p.value, p.grad, v, self.lr, self.rho, self.eps)
            p.value[...] = value
            v[...] = v_new

    def zero_grad(self) -> None:
        for p in self.params:
            p.grad[...] = 0
