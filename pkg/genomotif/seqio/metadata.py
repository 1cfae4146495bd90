import csv
from collections.abc import Mapping
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from genomotif.errors import DuplicateAccession, MissingColumn, UnlabeledRecord
from genomotif.seqio.fasta import SequenceRecord
from genomotif.seqio.regions import Region, region_of

METADATA_COLUMNS = ("accession", "region", "location", "date")


@dataclass(frozen=True)
class MetadataEntry:
    """Sidecar label for one accession.

    `region` is `None` when the CSV cell is empty; the label is then
    resolved from `location` (see `resolve_region`).
    """

    region: Region | None
    location: str
    date: str | None


def parse_metadata(stream: IO[str]) -> dict[str, MetadataEntry]:
    """Parse a metadata CSV with header `accession,region,location,date`.

    Raises:
        MissingColumn: If the header lacks one of the required columns.
        UnknownRegion: If a non-empty region cell is outside the closed set.
        DuplicateAccession: If an accession occurs twice.
    """
    reader = csv.DictReader(stream)
    header = reader.fieldnames or []
    missing = [column for column in METADATA_COLUMNS if column not in header]
    if missing:
        raise MissingColumn(f"Metadata CSV is missing column(s) {missing}; header was {header}")

    entries: dict[str, MetadataEntry] = {}
    for row in reader:
        accession = (row["accession"] or "").strip()
        if not accession:
            continue
        if accession in entries:
            raise DuplicateAccession(f"Duplicate accession {accession!r} on CSV line {reader.line_num}")
        region_token = (row["region"] or "").strip()
        entries[accession] = MetadataEntry(
            region=Region.parse(region_token) if region_token else None,
            location=(row["location"] or "").strip(),
            date=(row["date"] or "").strip() or None,
        )
    return entries


def read_metadata(path: Path) -> dict[str, MetadataEntry]:
    with path.open("r", encoding="utf-8", newline="") as f:
        return parse_metadata(f)


def resolve_region(entry: MetadataEntry, table: Mapping[str, Region] | None = None) -> Region:
    """Explicit region if present, otherwise the table lookup of the entry's location."""
    if entry.region is not None:
        return entry.region
    return region_of(entry.location, table)


def label_of(record: SequenceRecord, metadata: Mapping[str, MetadataEntry]) -> Region:
    """Region label for `record` from sidecar metadata.

    Raises:
        UnlabeledRecord: If the accession has no metadata row.
        UnmappedLocation: If the row has no region and its location is not in the table.
    """
    entry = metadata.get(record.accession)
    if entry is None:
        raise UnlabeledRecord(f"No metadata row for accession {record.accession!r}")
    return resolve_region(entry)
