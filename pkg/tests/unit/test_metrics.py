import csv
import json
from pathlib import Path

import numpy as np
import pytest

from genomotif.errors import DegenerateClass, EmptyDataset, ShapeMismatch
from genomotif.nn import Network, NetworkSpec
from genomotif.pipeline import (
    Dataset,
    confusion_matrix,
    evaluate,
    metrics_report,
    pairwise_auc,
    render_confusion,
    roc_curve,
    write_metrics,
)
from genomotif.seqio import Region


def _probs(predicted: list[int]) -> np.ndarray:
    probs = np.full((len(predicted), 4), 0.1)
    probs[np.arange(len(predicted)), predicted] = 0.7
    return probs


class TestAuc:
    def test_separable_scores(self):
        curve = roc_curve(np.array([0.9, 0.8, 0.2, 0.1]), np.array([True, True, False, False]))

        assert curve.auc == 1.0

    def test_one_misranked_pair(self):
        scores = np.array([0.9, 0.8, 0.7, 0.6])
        positives = np.array([True, False, True, False])

        assert roc_curve(scores, positives).auc == pytest.approx(0.75)
        assert pairwise_auc(scores, positives) == pytest.approx(0.75)

    def test_all_tied_scores(self):
        curve = roc_curve(np.full(6, 0.4), np.array([True, False, True, False, False, True]))

        assert curve.auc == pytest.approx(0.5)
        assert len(curve.points) == 2

    def test_points_sweep_distinct_thresholds(self):
        curve = roc_curve(np.array([0.9, 0.8, 0.7, 0.6]), np.array([True, False, True, False]))

        assert [(p.threshold, p.fpr, p.tpr) for p in curve.points] == [
            (None, 0.0, 0.0),
            (0.9, 0.0, 0.5),
            (0.8, 0.5, 0.5),
            (0.7, 0.5, 1.0),
            (0.6, 1.0, 1.0),
        ]

    def test_area_equals_pairwise_ranking(self):
        rng = np.random.default_rng(0)
        for _ in range(1000):
            n = int(rng.integers(2, 30))
            # coarse scores force ties
            scores = rng.integers(0, 8, size=n) / 8
            positives = rng.random(n) < 0.4
            positives[:2] = [True, False]

            assert roc_curve(scores, positives).auc == pytest.approx(pairwise_auc(scores, positives), abs=1e-12)

    def test_rates_are_monotone_and_end_at_one(self, rng: np.random.Generator):
        for _ in range(50):
            scores = rng.integers(0, 5, size=40) / 5
            positives = rng.random(40) < 0.5
            positives[:2] = [True, False]

            points = roc_curve(scores, positives).points
            fpr = np.array([p.fpr for p in points])
            tpr = np.array([p.tpr for p in points])

            assert np.all(np.diff(fpr) >= 0)
            assert np.all(np.diff(tpr) >= 0)
            assert (fpr[-1], tpr[-1]) == (1.0, 1.0)
            thresholds = [p.threshold for p in points[1:]]
            assert thresholds == sorted(set(thresholds), reverse=True)

    @pytest.mark.parametrize("positives", [[True, True], [False, False]])
    def test_degenerate_class(self, positives: list[bool]):
        with pytest.raises(DegenerateClass):
            roc_curve(np.array([0.1, 0.2]), np.array(positives))


class TestConfusion:
    def test_rows_are_true_labels(self):
        matrix = confusion_matrix(np.array([0, 0, 1, 3]), np.array([0, 1, 1, 2]))

        assert matrix.tolist() == [[1, 1, 0, 0], [0, 1, 0, 0], [0, 0, 0, 0], [0, 0, 1, 0]]

    def test_length_mismatch(self):
        with pytest.raises(ShapeMismatch):
            confusion_matrix(np.array([0, 1]), np.array([0]))


class TestMetricsReport:
    def test_per_class_values_and_flags(self):
        report = metrics_report(np.array([0, 0, 1, 2]), _probs([0, 1, 1, 2]))
        asia, europe, america, oceania = report.classes

        assert report.accuracy == pytest.approx(0.75)
        assert (asia.precision, asia.recall, asia.f1) == pytest.approx((1.0, 0.5, 2 / 3))
        assert (europe.precision, europe.recall) == pytest.approx((0.5, 1.0))
        assert america.f1 == 1.0
        assert asia.flags == []
        assert oceania.support == 0
        assert oceania.auc is None
        assert oceania.flags == ["precision_undefined", "recall_undefined", "f1_undefined", "auc_undefined"]
        assert Region.OCEANIA not in report.roc

    def test_micro_recall_equals_accuracy(self, rng: np.random.Generator):
        labels = rng.integers(0, 4, size=50)
        probs = rng.dirichlet(np.ones(4), size=50)

        report = metrics_report(labels, probs)

        assert report.micro_recall == pytest.approx(report.accuracy)
        assert report.total == 50

    def test_perfect_predictions(self):
        labels = np.array([0, 1, 2, 3, 0, 1, 2, 3])

        report = metrics_report(labels, _probs(labels.tolist()))

        assert report.confusion == np.diag([2, 2, 2, 2]).tolist()
        assert report.accuracy == 1.0
        assert report.macro_f1 == 1.0
        assert all(m.auc == 1.0 for m in report.classes)

    def test_empty(self):
        with pytest.raises(EmptyDataset):
            metrics_report(np.array([], dtype=np.int64), np.zeros((0, 4)))

    def test_probability_shape(self):
        with pytest.raises(ShapeMismatch):
            metrics_report(np.array([0, 1]), np.zeros((2, 3)))


def test_render_confusion_lists_every_class():
    text = render_confusion(metrics_report(np.array([0, 0, 1, 2]), _probs([0, 1, 1, 2])))

    for label in ("ASIA", "EUR", "AME", "AUSTR", "macro"):
        assert label in text
    assert "n/a" in text


def test_write_metrics(tmp_path: Path):
    report = metrics_report(np.array([0, 0, 1, 2]), _probs([0, 1, 1, 2]))

    paths = write_metrics(report, tmp_path / "eval")

    assert [p.name for p in paths] == ["metrics.json", "roc.csv", "confusion.txt"]
    payload = json.loads(paths[0].read_text())
    assert payload["accuracy"] == pytest.approx(0.75)
    assert "roc" not in payload
    with open(paths[1], newline="") as f:
        rows = list(csv.reader(f))
    assert rows[0] == ["class", "threshold", "fpr", "tpr"]
    assert rows[1] == ["Asia", "inf", "0", "0"]
    assert {row[0] for row in rows[1:]} == {"Asia", "Europe", "America"}


def test_evaluate_network(small_spec: NetworkSpec, small_dataset: Dataset):
    report = evaluate(Network(small_spec, seed=0), small_dataset, batch_size=5)

    assert report.total == len(small_dataset)
    assert [m.support for m in report.classes] == [6, 6, 6, 6]
