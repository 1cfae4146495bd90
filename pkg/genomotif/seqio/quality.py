from collections import Counter
from dataclasses import dataclass
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field

from genomotif.seqio.fasta import SequenceRecord

UNAMBIGUOUS_BASES = frozenset("ACGTU")


class QualityConfig(BaseModel):
    """Quality gates applied before a record enters a dataset."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    min_length: int = Field(default=29_000, gt=0)
    max_ambiguous_fraction: float = Field(default=0.05, ge=0.0, le=1.0)


class RejectReason(StrEnum):
    TOO_SHORT = "TooShort"
    TOO_AMBIGUOUS = "TooAmbiguous"


@dataclass(frozen=True)
class Accept:
    pass


@dataclass(frozen=True)
class Reject:
    reason: RejectReason


QualityVerdict = Accept | Reject


def ambiguous_count(bases: str) -> int:
    return sum(1 for base in bases if base not in UNAMBIGUOUS_BASES)


def ambiguous_fraction(bases: str) -> float:
    """Fraction of symbols outside {A,C,G,T,U}; 0.0 for an empty sequence."""
    if not bases:
        return 0.0
    return ambiguous_count(bases) / len(bases)


def base_composition(bases: str) -> dict[str, float]:
    """Relative frequency of each symbol, with `U` folded into `T`."""
    if not bases:
        return {}
    counts = Counter(bases.replace("U", "T"))
    return {base: count / len(bases) for base, count in sorted(counts.items())}


def quality_filter(record: SequenceRecord, cfg: QualityConfig) -> QualityVerdict:
    """Accept iff long enough and the ambiguous fraction is below the limit.

    The length gate is checked first.
    """
    if len(record.bases) < cfg.min_length:
        return Reject(RejectReason.TOO_SHORT)
    if ambiguous_fraction(record.bases) >= cfg.max_ambiguous_fraction:
        return Reject(RejectReason.TOO_AMBIGUOUS)
    return Accept()
