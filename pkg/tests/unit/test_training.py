from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError

from genomotif.errors import NonFiniteLoss, ShapeMismatch, TooFewSamples
from genomotif.nn import NetworkSpec, load_checkpoint
from genomotif.pipeline import Dataset, EpochStats, TrainConfig, batch_indices, read_history, train
from genomotif.pipeline.training import write_history

QUICK = TrainConfig(epochs=2, batch_size=8, learning_rate=0.003, seed=3)


@pytest.mark.parametrize(
    "n,batch_size,sizes",
    [(8, 4, [4, 4]), (9, 4, [4, 5]), (10, 4, [4, 4, 2]), (3, 4, [3]), (1, 4, [1])],
)
def test_batch_indices(n: int, batch_size: int, sizes: list[int]):
    order = np.random.default_rng(0).permutation(n)

    batches = batch_indices(order, batch_size)

    assert [len(b) for b in batches] == sizes
    np.testing.assert_array_equal(np.concatenate(batches), order)


def test_history_round_trip(tmp_path: Path):
    history = [EpochStats(1, 1.3862944, 0.25, 1.2, 0.5), EpochStats(2, 0.9, 0.6, 0.8, 0.75)]
    path = tmp_path / "history.csv"

    write_history(history, path)

    assert path.read_text().splitlines()[0] == "epoch,train_loss,train_acc,val_loss,val_acc"
    assert read_history(path) == [EpochStats(1, 1.386294, 0.25, 1.2, 0.5), history[1]]


def test_config_validation():
    with pytest.raises(ValidationError):
        TrainConfig(batch_size=1)
    with pytest.raises(ValidationError):
        TrainConfig(learning_rate=0.0)


class TestTrain:
    def test_writes_checkpoints_and_history(self, tmp_path: Path, small_dataset: Dataset, small_spec: NetworkSpec):
        result = train(small_dataset, small_spec, QUICK, output_dir=tmp_path)

        assert [row.epoch for row in result.history] == [1, 2]
        assert result.best_val_accuracy == max(row.val_acc for row in result.history)
        assert result.best_epoch in (1, 2)
        assert {p.name for p in tmp_path.iterdir()} == {"best.gmnn", "last.gmnn", "history.csv"}
        assert [row.epoch for row in read_history(tmp_path / "history.csv")] == [1, 2]
        assert load_checkpoint(tmp_path / "last.gmnn").state.epoch == 2

    def test_losses_are_finite(self, small_dataset: Dataset, small_spec: NetworkSpec):
        result = train(small_dataset, small_spec, QUICK)

        for row in result.history:
            assert np.isfinite([row.train_loss, row.val_loss]).all()
            assert 0.0 <= row.train_acc <= 1.0

    def test_same_seed_same_history(self, small_dataset: Dataset, small_spec: NetworkSpec):
        a = train(small_dataset, small_spec, QUICK)
        b = train(small_dataset, small_spec, QUICK)

        assert a.history == b.history

    def test_resume_continues_the_same_run(self, tmp_path: Path, small_dataset: Dataset, small_spec: NetworkSpec):
        straight, first, resumed = tmp_path / "straight", tmp_path / "first", tmp_path / "resumed"
        cfg = QUICK.model_copy(update={"epochs": 3})

        train(small_dataset, small_spec, cfg, output_dir=straight)
        train(small_dataset, small_spec, QUICK, output_dir=first)
        result = train(small_dataset, small_spec, cfg, output_dir=resumed, resume=first / "last.gmnn")

        assert [row.epoch for row in result.history] == [1, 2, 3]
        assert (resumed / "last.gmnn").read_bytes() == (straight / "last.gmnn").read_bytes()
        assert (resumed / "history.csv").read_text() == (straight / "history.csv").read_text()

    def test_image_size_mismatch(self, small_dataset: Dataset):
        with pytest.raises(ShapeMismatch):
            train(small_dataset, NetworkSpec(image_size=32), QUICK)

    def test_non_finite_loss(self, monkeypatch: pytest.MonkeyPatch, small_dataset: Dataset, small_spec: NetworkSpec):
        def nan_loss(logits: np.ndarray, targets: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
            return float("nan"), np.zeros_like(logits), np.zeros_like(logits)

        monkeypatch.setattr("genomotif.pipeline.training.softmax_cross_entropy", nan_loss)

        with pytest.raises(NonFiniteLoss, match="epoch 1, batch 0"):
            train(small_dataset, small_spec, QUICK)

    def test_resume_keeps_the_checkpoint_seed(
        self, tmp_path: Path, small_dataset: Dataset, small_spec: NetworkSpec, package_logs: pytest.LogCaptureFixture
    ):
        straight, first, resumed = tmp_path / "straight", tmp_path / "first", tmp_path / "resumed"
        cfg = QUICK.model_copy(update={"epochs": 3})

        train(small_dataset, small_spec, cfg, output_dir=straight)
        train(small_dataset, small_spec, QUICK, output_dir=first)
        other_seed = cfg.model_copy(update={"seed": 99})
        train(small_dataset, small_spec, other_seed, output_dir=resumed, resume=first / "last.gmnn")

        assert (resumed / "last.gmnn").read_bytes() == (straight / "last.gmnn").read_bytes()
        assert load_checkpoint(resumed / "last.gmnn").state.seed == 3
        assert "trained with seed 3" in package_logs.text

    def test_single_training_sample_is_rejected_up_front(self, small_dataset: Dataset, small_spec: NetworkSpec):
        pair = small_dataset.subset(np.flatnonzero(small_dataset.labels == 0)[:2])

        with pytest.raises(TooFewSamples, match="1 sample"):
            train(pair, small_spec, QUICK)
