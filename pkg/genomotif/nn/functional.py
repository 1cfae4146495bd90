"""Stateless forward and backward kernels on NCHW / NC arrays.

Every backward function takes the upstream gradient plus whatever the
forward pass saved, and returns gradients in the order of the forward
arguments.
"""

from dataclasses import dataclass

import numpy as np

from genomotif.errors import DegenerateBatch, NonFiniteInput, ShapeMismatch


def _conv_output_size(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _check_conv(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int, padding: int) -> tuple[int, int]:
    if x.ndim != 4 or w.ndim != 4:
        raise ShapeMismatch(f"conv2d expects 4-D input and weights, got {x.shape} and {w.shape}")
    if x.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"Input has {x.shape[1]} channels, weights expect {w.shape[1]}")
    if b.shape != (w.shape[0],):
        raise ShapeMismatch(f"Bias shape {b.shape} does not match {w.shape[0]} filters")
    if stride < 1 or padding < 0:
        raise ShapeMismatch(f"Invalid stride {stride} / padding {padding}")
    kh, kw = w.shape[2:]
    oh = _conv_output_size(x.shape[2], kh, stride, padding)
    ow = _conv_output_size(x.shape[3], kw, stride, padding)
    if oh < 1 or ow < 1:
        raise ShapeMismatch(f"Kernel {kh}x{kw} does not fit input {x.shape[2:]} with padding {padding}")
    return oh, ow


def _pad(x: np.ndarray, padding: int) -> np.ndarray:
    if padding == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))


def _window(i: int, stride: int, out: int) -> slice:
    return slice(i, i + stride * (out - 1) + 1, stride)


def conv2d(x: np.ndarray, w: np.ndarray, b: np.ndarray, stride: int = 1, padding: int = 0) -> np.ndarray:
    """Cross-correlation of `x (N, C, H, W)` with `w (F, C, kh, kw)` plus bias `b (F,)`.

    Accumulates one kernel tap at a time as a `(C) x (F)` contraction over
    the strided input view, which keeps peak memory at one output tensor.
    """
    oh, ow = _check_conv(x, w, b, stride, padding)
    xp = _pad(x, padding)
    kh, kw = w.shape[2:]

    out = np.zeros((x.shape[0], oh, ow, w.shape[0]), dtype=np.result_type(x, w))
    for i in range(kh):
        for j in range(kw):
            patch = xp[:, :, _window(i, stride, oh), _window(j, stride, ow)]
            out += np.tensordot(patch, w[:, :, i, j], axes=([1], [1]))
    out += b
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def conv2d_backward(
    grad: np.ndarray, x: np.ndarray, w: np.ndarray, stride: int = 1, padding: int = 0
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients `(dx, dw, db)` of `conv2d` given the upstream gradient `(N, F, oh, ow)`."""
    n, _, h, width = x.shape
    oh, ow = grad.shape[2:]
    kh, kw = w.shape[2:]
    if grad.shape[:2] != (n, w.shape[0]):
        raise ShapeMismatch(f"Upstream gradient {grad.shape} does not match output ({n}, {w.shape[0]}, ...)")

    xp = _pad(x, padding)
    dxp = np.zeros_like(xp)
    dw = np.zeros_like(w)
    for i in range(kh):
        for j in range(kw):
            rows, cols = _window(i, stride, oh), _window(j, stride, ow)
            dw[:, :, i, j] = np.tensordot(grad, xp[:, :, rows, cols], axes=([0, 2, 3], [0, 2, 3]))
            # (N, oh, ow, C) -> (N, C, oh, ow)
            dxp[:, :, rows, cols] += np.tensordot(grad, w[:, :, i, j], axes=([1], [0])).transpose(0, 3, 1, 2)
    db = grad.sum(axis=(0, 2, 3))
    dx = dxp[:, :, padding : padding + h, padding : padding + width]
    return np.ascontiguousarray(dx), dw, db


def _channel_axes(x: np.ndarray) -> tuple[int, ...]:
    match x.ndim:
        case 4:
            return (0, 2, 3)
        case 2:
            return (0,)
        case _:
            raise ShapeMismatch(f"batchnorm expects (N, C) or (N, C, H, W) input, got {x.shape}")


def _per_channel(v: np.ndarray, x: np.ndarray) -> np.ndarray:
    return v.reshape((1, -1, 1, 1)) if x.ndim == 4 else v.reshape((1, -1))


@dataclass(frozen=True, eq=False)
class BatchNormCache:
    xhat: np.ndarray
    invstd: np.ndarray
    mean: np.ndarray
    var: np.ndarray


def batchnorm_train(
    x: np.ndarray, gamma: np.ndarray, beta: np.ndarray, eps: float = 1e-5
) -> tuple[np.ndarray, BatchNormCache]:
    """Normalize with the batch's own per-channel mean and (biased) variance."""
    axes = _channel_axes(x)
    if x.shape[0] < 2:
        raise DegenerateBatch(f"batchnorm in train mode needs at least 2 samples, got {x.shape[0]}")
    if gamma.shape != (x.shape[1],) or beta.shape != (x.shape[1],):
        raise ShapeMismatch(f"gamma/beta shapes {gamma.shape}/{beta.shape} do not match {x.shape[1]} channels")

    mean = x.mean(axis=axes)
    var = x.var(axis=axes)
    invstd = 1.0 / np.sqrt(var + eps)
    xhat = (x - _per_channel(mean, x)) * _per_channel(invstd, x)
    out = xhat * _per_channel(gamma, x) + _per_channel(beta, x)
    return out, BatchNormCache(xhat=xhat, invstd=invstd, mean=mean, var=var)


def batchnorm_eval(
    x: np.ndarray,
    gamma: np.ndarray,
    beta: np.ndarray,
    running_mean: np.ndarray,
    running_var: np.ndarray,
    eps: float = 1e-5,
) -> np.ndarray:
    _channel_axes(x)
    scale = gamma / np.sqrt(running_var + eps)
    return (x - _per_channel(running_mean, x)) * _per_channel(scale, x) + _per_channel(beta, x)


def batchnorm_backward(
    grad: np.ndarray, gamma: np.ndarray, cache: BatchNormCache
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients `(dx, dgamma, dbeta)` for a train-mode batchnorm."""
    axes = _channel_axes(grad)
    m = grad.size // grad.shape[1]
    xhat = cache.xhat

    dbeta = grad.sum(axis=axes)
    dgamma = (grad * xhat).sum(axis=axes)
    dxhat = grad * _per_channel(gamma, grad)
    sum_dxhat = _per_channel(dxhat.sum(axis=axes), grad)
    sum_dxhat_xhat = _per_channel((dxhat * xhat).sum(axis=axes), grad)
    dx = _per_channel(cache.invstd / m, grad) * (m * dxhat - sum_dxhat - xhat * sum_dxhat_xhat)
    return dx, dgamma, dbeta


def relu(x: np.ndarray) -> np.ndarray:
    return np.maximum(x, 0)


def relu_backward(grad: np.ndarray, x: np.ndarray) -> np.ndarray:
    return grad * (x > 0)


def avg_pool2d(x: np.ndarray, size: int = 2) -> np.ndarray:
    """Non-overlapping `size x size` mean pooling (stride = size)."""
    if x.ndim != 4:
        raise ShapeMismatch(f"avg_pool2d expects NCHW input, got {x.shape}")
    n, c, h, w = x.shape
    if h % size or w % size:
        raise ShapeMismatch(f"Spatial dims {h}x{w} are not divisible by pool size {size}")
    return x.reshape(n, c, h // size, size, w // size, size).mean(axis=(3, 5))


def avg_pool2d_backward(grad: np.ndarray, size: int = 2) -> np.ndarray:
    n, c, oh, ow = grad.shape
    spread = np.broadcast_to(grad[:, :, :, np.newaxis, :, np.newaxis] / (size * size), (n, c, oh, size, ow, size))
    return spread.reshape(n, c, oh * size, ow * size)


def global_avg_pool(x: np.ndarray) -> np.ndarray:
    if x.ndim != 4:
        raise ShapeMismatch(f"global_avg_pool expects NCHW input, got {x.shape}")
    return x.mean(axis=(2, 3))


def global_avg_pool_backward(grad: np.ndarray, spatial: tuple[int, int]) -> np.ndarray:
    h, w = spatial
    n, c = grad.shape
    return np.broadcast_to(grad[:, :, np.newaxis, np.newaxis] / (h * w), (n, c, h, w)).copy()


def dense(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Affine map `x W^T + b` for `x (N, D)`, `w (K, D)`, `b (K,)`."""
    if x.ndim != 2 or w.ndim != 2 or x.shape[1] != w.shape[1]:
        raise ShapeMismatch(f"dense: input {x.shape} does not match weights {w.shape}")
    if b.shape != (w.shape[0],):
        raise ShapeMismatch(f"dense: bias shape {b.shape} does not match {w.shape[0]} units")
    return x @ w.T + b


def dense_backward(grad: np.ndarray, x: np.ndarray, w: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    return grad @ w, grad.T @ x, grad.sum(axis=0)


def dropout(
    x: np.ndarray, rate: float, training: bool, rng: np.random.Generator | None = None
) -> tuple[np.ndarray, np.ndarray | None]:
    """Inverted dropout. Returns the output and the scaled keep-mask (None when identity)."""
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"Dropout rate must be in [0, 1), got {rate}")
    if not training or rate == 0.0:
        return x, None
    if rng is None:
        raise ValueError("Train-mode dropout needs a random generator")
    mask = (rng.random(x.shape) >= rate).astype(x.dtype) / x.dtype.type(1.0 - rate)
    return x * mask, mask


def dropout_backward(grad: np.ndarray, mask: np.ndarray | None) -> np.ndarray:
    return grad if mask is None else grad * mask


def softmax(logits: np.ndarray) -> np.ndarray:
    """Max-shifted softmax over the last axis."""
    if not np.all(np.isfinite(logits)):
        raise NonFiniteInput(f"softmax received non-finite logits: {logits}")
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)
