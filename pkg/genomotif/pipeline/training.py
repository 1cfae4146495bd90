import csv
import logging
import math
from dataclasses import astuple, dataclass, fields
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from genomotif.errors import NonFiniteLoss, ShapeMismatch, TooFewSamples
from genomotif.nn import (
    Network,
    NetworkSpec,
    Precision,
    RMSProp,
    TrainingState,
    cross_entropy,
    load_checkpoint,
    one_hot,
    restore_optimizer,
    save_checkpoint,
    softmax_cross_entropy,
)
from genomotif.pipeline.dataset import Dataset, split
from genomotif.seqio import NUM_REGIONS

logger = logging.getLogger(__name__)

BEST_CHECKPOINT = "best.gmnn"
LAST_CHECKPOINT = "last.gmnn"
HISTORY_FILE = "history.csv"


class TrainConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    epochs: int = Field(default=75, ge=1)
    batch_size: int = Field(default=32, ge=2)
    learning_rate: float = Field(default=0.001, gt=0.0)
    seed: int = 0
    validation_fraction: float = Field(default=0.2, gt=0.0, lt=1.0)
    precision: Precision = Precision.FLOAT32
    rho: float = Field(default=0.9, ge=0.0, lt=1.0)
    eps: float = Field(default=1e-8, gt=0.0)


@dataclass(frozen=True)
class EpochStats:
    epoch: int
    train_loss: float
    train_acc: float
    val_loss: float
    val_acc: float


@dataclass
class TrainingResult:
    network: Network
    history: list[EpochStats]
    best_val_accuracy: float
    best_epoch: int


def batch_indices(order: np.ndarray, batch_size: int) -> list[np.ndarray]:
    """Consecutive batches of `order`; a trailing batch of one sample joins the previous batch."""
    batches = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate([batches[-2], batches.pop()])
    return batches


def write_history(history: list[EpochStats], path: Path) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow([field.name for field in fields(EpochStats)])
        for row in history:
            epoch, *values = astuple(row)
            writer.writerow([epoch, *(f"{v:.6f}" for v in values)])


def read_history(path: Path) -> list[EpochStats]:
    with open(path, newline="") as f:
        return [
            EpochStats(
                epoch=int(row["epoch"]),
                train_loss=float(row["train_loss"]),
                train_acc=float(row["train_acc"]),
                val_loss=float(row["val_loss"]),
                val_acc=float(row["val_acc"]),
            )
            for row in csv.DictReader(f)
        ]


def evaluate_loss(network: Network, dataset: Dataset, dtype: np.dtype) -> tuple[float, float]:
    """Eval-mode mean cross-entropy and accuracy."""
    probs = network.predict_proba(dataset.inputs(dtype=dtype))
    loss = cross_entropy(probs, one_hot(dataset.labels, NUM_REGIONS))
    acc = float(np.mean(probs.argmax(axis=1) == dataset.labels))
    return loss, acc


def _run_epoch(
    network: Network, optimizer: RMSProp, data: Dataset, cfg: TrainConfig, seed: int, epoch: int
) -> tuple[float, float]:
    dtype = cfg.precision.dtype
    order = np.random.default_rng([seed, epoch]).permutation(len(data))
    network.train()
    total_loss = 0.0
    correct = 0
    for b, idx in enumerate(batch_indices(order, cfg.batch_size)):
        x = data.inputs(idx, dtype=dtype)
        targets = one_hot(data.labels[idx], NUM_REGIONS, dtype=dtype)
        network.set_rng(np.random.default_rng([seed, epoch, b]))
        logits = network.forward(x)
        loss, probs, grad = softmax_cross_entropy(logits, targets)
        if not math.isfinite(loss):
            raise NonFiniteLoss(
                f"Loss became {loss} at epoch {epoch + 1}, batch {b} "
                f"(logits range {np.nanmin(logits)}..{np.nanmax(logits)}); try a smaller learning rate"
            )
        network.backward(grad)
        optimizer.step()
        total_loss += loss * len(idx)
        correct += int(np.sum(probs.argmax(axis=1) == data.labels[idx]))
    network.set_rng(None)
    return total_loss / len(data), correct / len(data)


def train(
    dataset: Dataset,
    spec: NetworkSpec,
    cfg: TrainConfig,
    output_dir: Path | None = None,
    resume: Path | None = None,
) -> TrainingResult:
    """Train on a stratified split of `dataset` with RMSProp.

    With `output_dir`, `last.gmnn` and `history.csv` are written after every
    epoch and `best.gmnn` whenever validation accuracy improves. `resume`
    continues from a checkpoint written by an earlier run.

    Raises:
        ShapeMismatch: If dataset images do not match the network input.
        NonFiniteLoss: If a batch loss becomes NaN or infinite.
    """
    h, w, c = dataset.image_shape
    if (c, h, w) != spec.input_shape:
        raise ShapeMismatch(f"Dataset images are {h}x{w}x{c}, network expects {spec.input_shape}")

    history: list[EpochStats] = []
    best_val, best_epoch, start = -1.0, 0, 0
    seed = cfg.seed
    ckpt = load_checkpoint(resume, precision=cfg.precision) if resume is not None else None
    if ckpt is not None and ckpt.state.seed != seed:
        logger.warning(f"Checkpoint was trained with seed {ckpt.state.seed}; keeping it instead of seed {seed}")
        seed = ckpt.state.seed

    # the split must match the one the checkpoint was trained on
    train_set, val_set = split(dataset, cfg.validation_fraction, seed)
    if len(train_set) < 2:
        raise TooFewSamples(f"Training split has {len(train_set)} sample(s); batch statistics need at least 2")
    logger.info(f"Training on {len(train_set)} samples, validating on {len(val_set)}")

    if resume is not None and ckpt is not None:
        if ckpt.network.spec != spec.model_copy(update={"precision": cfg.precision}):
            logger.warning("Checkpoint network spec differs from the requested one; using the checkpoint's")
        network = ckpt.network
        optimizer = RMSProp(network.parameters(), lr=cfg.learning_rate, rho=cfg.rho, eps=cfg.eps)
        restore_optimizer(optimizer, ckpt)
        start, best_val = ckpt.state.epoch, ckpt.state.best_val_accuracy
        history_path = resume.parent / HISTORY_FILE
        if history_path.exists():
            history = read_history(history_path)[:start]
            best_epoch = max((r.epoch for r in history if abs(r.val_acc - best_val) < 5e-7), default=0)
        logger.info(f"Resuming from {resume} after epoch {start}")
    else:
        network = Network(spec.model_copy(update={"precision": cfg.precision}), seed=seed)
        optimizer = RMSProp(network.parameters(), lr=cfg.learning_rate, rho=cfg.rho, eps=cfg.eps)

    if output_dir is not None:
        output_dir.mkdir(parents=True, exist_ok=True)

    for epoch in range(start, cfg.epochs):
        train_loss, train_acc = _run_epoch(network, optimizer, train_set, cfg, seed, epoch)
        val_loss, val_acc = evaluate_loss(network, val_set, cfg.precision.dtype)
        history.append(EpochStats(epoch + 1, train_loss, train_acc, val_loss, val_acc))
        logger.info(
            f"Epoch {epoch + 1}/{cfg.epochs}: loss {train_loss:.4f} acc {train_acc:.4f} "
            f"val_loss {val_loss:.4f} val_acc {val_acc:.4f}"
        )

        improved = val_acc > best_val
        if improved:
            best_val, best_epoch = val_acc, epoch + 1
        if output_dir is not None:
            state = TrainingState(epoch=epoch + 1, best_val_accuracy=best_val, seed=seed)
            if improved:
                save_checkpoint(output_dir / BEST_CHECKPOINT, network, state, optimizer)
            save_checkpoint(output_dir / LAST_CHECKPOINT, network, state, optimizer)
            write_history(history, output_dir / HISTORY_FILE)

    return TrainingResult(network=network, history=history, best_val_accuracy=best_val, best_epoch=best_epoch)
