from .files import write_fasta_file, write_metadata_file, write_records_file

__all__ = [
    "write_fasta_file",
    "write_metadata_file",
    "write_records_file",
]
