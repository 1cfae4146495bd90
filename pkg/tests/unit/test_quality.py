import numpy as np
import pytest

from genomotif.seqio import (
    Accept,
    QualityConfig,
    Reject,
    RejectReason,
    SequenceRecord,
    ambiguous_fraction,
    base_composition,
    quality_filter,
)


def _record(bases: str) -> SequenceRecord:
    return SequenceRecord(accession="r", header="r", bases=bases)


def test_defaults_match_documented_gates():
    cfg = QualityConfig()

    assert cfg.min_length == 29_000
    assert cfg.max_ambiguous_fraction == 0.05


def test_clean_long_sequence_is_accepted():
    assert quality_filter(_record("ACGT" * 7500), QualityConfig()) == Accept()


def test_short_sequence_is_rejected():
    assert quality_filter(_record("ACGT" * 10), QualityConfig()) == Reject(RejectReason.TOO_SHORT)


def test_length_gate_is_inclusive():
    cfg = QualityConfig(min_length=10, max_ambiguous_fraction=0.5)

    assert quality_filter(_record("A" * 10), cfg) == Accept()
    assert quality_filter(_record("A" * 9), cfg) == Reject(RejectReason.TOO_SHORT)


def test_ambiguous_gate_is_exclusive():
    cfg = QualityConfig(min_length=1, max_ambiguous_fraction=0.05)

    assert quality_filter(_record("N" * 5 + "A" * 95), cfg) == Reject(RejectReason.TOO_AMBIGUOUS)
    assert quality_filter(_record("N" * 4 + "A" * 96), cfg) == Accept()


def test_length_is_checked_before_ambiguity():
    cfg = QualityConfig(min_length=100)

    assert quality_filter(_record("N" * 10), cfg) == Reject(RejectReason.TOO_SHORT)


def test_ambiguous_fraction():
    assert ambiguous_fraction("") == 0.0
    assert ambiguous_fraction("ACGU") == 0.0
    assert ambiguous_fraction("ACNR") == pytest.approx(0.5)


def test_base_composition_folds_u_into_t():
    assert base_composition("AAUT") == {"A": 0.5, "T": 0.5}
    assert base_composition("") == {}


def test_config_rejects_out_of_range_values():
    with pytest.raises(ValueError):
        QualityConfig(max_ambiguous_fraction=1.5)
    with pytest.raises(ValueError):
        QualityConfig(min_length=0)


def test_loosening_gates_never_rejects_an_accepted_record():
    rng = np.random.default_rng(21)
    records = [
        _record("".join(rng.choice(list("ACGTN"), size=int(n), p=[0.24, 0.24, 0.24, 0.24, 0.04])))
        for n in rng.integers(1, 400, size=60)
    ]
    strict_to_loose = [
        QualityConfig(min_length=length, max_ambiguous_fraction=fraction)
        for length, fraction in [(350, 0.01), (250, 0.03), (100, 0.05), (50, 0.2), (1, 1.0)]
    ]

    accepted = [
        {i for i, r in enumerate(records) if isinstance(quality_filter(r, cfg), Accept)} for cfg in strict_to_loose
    ]

    for stricter, looser in zip(accepted, accepted[1:]):
        assert stricter <= looser


def test_lengthening_with_clean_bases_never_fails_the_length_gate():
    cfg = QualityConfig(min_length=100)
    record = _record("ACGT" * 30)

    assert quality_filter(record, cfg) == Accept()
    assert quality_filter(_record(record.bases + "ACGU" * 50), cfg) == Accept()
