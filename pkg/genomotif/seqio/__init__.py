from genomotif.seqio.fasta import (
    SequenceRecord,
    accession_from_header,
    iter_fasta,
    parse_fasta,
    read_fasta,
    with_metadata,
    write_fasta,
)
from genomotif.seqio.metadata import (
    METADATA_COLUMNS,
    MetadataEntry,
    label_of,
    parse_metadata,
    read_metadata,
    resolve_region,
)
from genomotif.seqio.quality import (
    Accept,
    QualityConfig,
    QualityVerdict,
    Reject,
    RejectReason,
    ambiguous_fraction,
    base_composition,
    quality_filter,
)
from genomotif.seqio.regions import NUM_REGIONS, Region, load_country_table, region_of

__all__ = [
    "Accept",
    "METADATA_COLUMNS",
    "MetadataEntry",
    "NUM_REGIONS",
    "QualityConfig",
    "QualityVerdict",
    "Region",
    "Reject",
    "RejectReason",
    "SequenceRecord",
    "accession_from_header",
    "ambiguous_fraction",
    "base_composition",
    "iter_fasta",
    "label_of",
    "load_country_table",
    "parse_fasta",
    "parse_metadata",
    "quality_filter",
    "read_fasta",
    "read_metadata",
    "region_of",
    "resolve_region",
    "with_metadata",
    "write_fasta",
]
