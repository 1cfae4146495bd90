from collections.abc import Callable, Sequence

import numpy as np

from genomotif.nn.layers import Layer


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8, atol: float = 1e-9) -> float:
    """Max over elements of `|a - n| / max(|a|, |n|, floor)`.

    Elements within `atol` of each other count as equal, which covers gradients that
    cancel exactly, such as a conv bias feeding batchnorm.
    """
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.size == 0:
        return 0.0
    diff = np.abs(a - n)
    denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
    return float(np.max(np.where(diff <= atol, 0.0, diff / denom)))


def numeric_gradient(loss: Callable[[], float], array: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """Central differences of `loss` w.r.t. every element of `array`, perturbed in place."""
    grad = np.zeros(array.shape, dtype=np.float64)
    flat = array.reshape(-1)
    out = grad.reshape(-1)
    for i in range(flat.size):
        original = flat[i]
        flat[i] = original + h
        plus = loss()
        flat[i] = original - h
        minus = loss()
        flat[i] = original
        out[i] = (plus - minus) / (2 * h)
    return grad


def grad_check(
    loss: Callable[[], float],
    arrays: Sequence[np.ndarray],
    analytic: Sequence[np.ndarray],
    h: float = 1e-5,
) -> float:
    """Max relative error between analytic gradients and central differences over all arrays."""
    if any(a.dtype != np.float64 for a in arrays):
        raise ValueError("Gradient checks need float64 arrays")
    return max(
        (relative_error(g, numeric_gradient(loss, a, h)) for a, g in zip(arrays, analytic, strict=True)),
        default=0.0,
    )


def check_layer(layer: Layer, x: np.ndarray, seed: int = 0, h: float = 1e-5) -> float:
    """Grad-check a layer's input and parameter gradients under a random linear loss.

    The loss is `sum(layer(x) * P)` for a fixed random projection `P`, so the
    upstream gradient is exactly `P`.
    """
    x = np.array(x, dtype=np.float64)
    out = layer.forward(x)
    projection = np.random.default_rng(seed).standard_normal(out.shape)

    grad_x = layer.backward(projection.copy())
    params = layer.parameters()
    analytic = [grad_x.copy(), *(p.grad.copy() for p in params)]

    def loss() -> float:
        return float(np.sum(layer.forward(x) * projection))

    return grad_check(loss, [x, *(p.value for p in params)], analytic, h)
