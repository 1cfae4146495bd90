import re
from collections import deque
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, replace
from pathlib import Path
from typing import IO

from Bio.Seq import Seq
from Bio.SeqIO.FastaIO import FastaWriter, SimpleFastaParser
from Bio.SeqRecord import SeqRecord

from genomotif.errors import EmptyInput, MalformedFasta

_ACCESSION_PATTERN = re.compile(r"^EPI_ISL_\S+$")
_DATE_PATTERN = re.compile(r"^\d{4}-\d{2}(-\d{2})?$")
_VIRUS_NAME_PATTERN = re.compile(r"^(?:hCoV-19|SARS-CoV-2|BetaCoV)/([^/|]+)/", re.IGNORECASE)


@dataclass(frozen=True)
class SequenceRecord:
    """One FASTA entry with its normalized bases and label metadata."""

    accession: str
    header: str
    bases: str
    location: str = ""
    collection_date: str | None = None

    def __len__(self) -> int:
        return len(self.bases)


def accession_from_header(header: str) -> str:
    """Return the first `|` token matching `EPI_ISL_*`, else the first whitespace token."""
    for token in header.split("|"):
        token = token.strip()
        if _ACCESSION_PATTERN.match(token):
            return token
    tokens = header.split()
    return tokens[0] if tokens else ""


def _header_metadata(header: str) -> tuple[str, str | None]:
    location = ""
    if match := _VIRUS_NAME_PATTERN.match(header.strip()):
        location = match.group(1).strip()
    date = None
    for token in header.split("|"):
        if _DATE_PATTERN.match(token.strip()):
            date = token.strip()
            break
    return location, date


def _make_record(header: str, sequence: str, line_no: int) -> SequenceRecord:
    accession = accession_from_header(header)
    if not accession:
        raise MalformedFasta(f"Empty FASTA header on line {line_no}")
    location, date = _header_metadata(header)
    return SequenceRecord(
        accession=accession,
        header=header.strip(),
        bases="".join(sequence.split()).upper(),
        location=location,
        collection_date=date,
    )


def iter_fasta(stream: IO[str] | IO[bytes]) -> Iterator[SequenceRecord]:
    """Yield records from a FASTA stream in file order.

    Raises:
        MalformedFasta: Sequence content before the first header, an empty header,
            or bytes that are not valid UTF-8.
    """
    header_lines: deque[int] = deque()
    for header, sequence in SimpleFastaParser(_checked_lines(stream, header_lines)):
        yield _make_record(header, sequence, header_lines.popleft())


def parse_fasta(stream: IO[str] | IO[bytes]) -> list[SequenceRecord]:
    """Parse all records of a FASTA stream.

    Raises:
        MalformedFasta: See `iter_fasta`.
        EmptyInput: If the stream holds no records.
    """
    records = list(iter_fasta(stream))
    if not records:
        raise EmptyInput("FASTA input contains no records")
    return records


def read_fasta(path: Path) -> list[SequenceRecord]:
    with path.open("rb") as f:
        try:
            return parse_fasta(f)
        except (MalformedFasta, EmptyInput) as e:
            raise type(e)(f"{path}: {e}") from e


def write_fasta(records: Iterable[SequenceRecord], stream: IO[str], width: int = 60) -> None:
    """Serialize records as FASTA with sequence lines wrapped at `width`."""
    if width < 1:
        raise ValueError(f"width must be >= 1, got {width}")
    FastaWriter(stream, wrap=width).write_file(_seq_record(r) for r in records)


def with_metadata(record: SequenceRecord, location: str, collection_date: str | None) -> SequenceRecord:
    """Return a copy of `record` with sidecar location and date applied."""
    return replace(
        record,
        location=location or record.location,
        collection_date=collection_date or record.collection_date,
    )


def _seq_record(record: SequenceRecord) -> SeqRecord:
    # FastaWriter emits the description alone when it starts with the id
    tokens = record.header.split()
    return SeqRecord(Seq(record.bases), id=tokens[0] if tokens else record.accession, description=record.header)


def _checked_lines(stream: IO[str] | IO[bytes], header_lines: deque[int]) -> Iterator[str]:
    seen_header = False
    for line_no, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                line = raw.decode("utf-8")
            except UnicodeDecodeError as e:
                raise MalformedFasta(f"Invalid UTF-8 on line {line_no}: {e.reason}") from e
        else:
            line = raw
        if not line.strip():
            continue
        if line.startswith(">"):
            seen_header = True
            header_lines.append(line_no)
        elif not seen_header:
            raise MalformedFasta(f"Sequence content before first header on line {line_no}")
        yield line
