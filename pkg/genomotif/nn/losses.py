import numpy as np

from genomotif.errors import ShapeMismatch
from genomotif.nn.functional import softmax

LOG_CLAMP = 1e-12


def one_hot(labels: np.ndarray, num_classes: int, dtype: np.dtype = np.dtype(np.float64)) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64)
    if labels.size and (labels.min() < 0 or labels.max() >= num_classes):
        raise ShapeMismatch(f"Labels must lie in [0, {num_classes}), got range {labels.min()}..{labels.max()}")
    targets = np.zeros((labels.shape[0], num_classes), dtype=dtype)
    targets[np.arange(labels.shape[0]), labels] = 1
    return targets


def cross_entropy(probs: np.ndarray, targets: np.ndarray) -> float:
    """Mean categorical cross-entropy over samples, `-(1/m) sum_ij t_ij log(p_ij)`."""
    if probs.shape != targets.shape or probs.ndim != 2:
        raise ShapeMismatch(f"Predictions {probs.shape} and targets {targets.shape} must be equal (m, n) arrays")
    m = probs.shape[0]
    log_p = np.log(np.maximum(probs.astype(np.float64), LOG_CLAMP))
    return float(-(targets * log_p).sum() / m)


def softmax_cross_entropy(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """Loss, probabilities and the gradient `(p - t) / m` w.r.t. the logits."""
    if logits.shape != targets.shape:
        raise ShapeMismatch(f"Logits {logits.shape} and targets {targets.shape} must have equal shape")
    probs = softmax(logits)
    loss = cross_entropy(probs, targets)
    grad = (probs - targets) / logits.shape[0]
    return loss, probs, grad.astype(logits.dtype, copy=False)
