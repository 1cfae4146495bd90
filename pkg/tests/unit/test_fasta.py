import io
from pathlib import Path

import pytest

from genomotif.errors import EmptyInput, MalformedFasta
from genomotif.seqio import (
    SequenceRecord,
    accession_from_header,
    iter_fasta,
    parse_fasta,
    read_fasta,
    with_metadata,
    write_fasta,
)
from tests.helpers import write_fasta_file

GISAID_HEADER = "hCoV-19/Australia/VIC01/2020|EPI_ISL_406844|2020-01-25"


def test_parse_multi_record_stream_preserves_order_and_joins_lines():
    text = ">seq1 first\nACGT\nacgt\n\n>seq2\nNNAC\n"

    records = parse_fasta(io.StringIO(text))

    assert [r.accession for r in records] == ["seq1", "seq2"]
    assert records[0].bases == "ACGTACGT"
    assert records[0].header == "seq1 first"
    assert records[1].bases == "NNAC"


def test_bases_are_uppercased_and_whitespace_removed():
    records = parse_fasta(io.StringIO(">s\nac gt\t u\r\n"))

    assert records[0].bases == "ACGTU"


def test_parse_accepts_byte_streams():
    records = parse_fasta(io.BytesIO(b">s\nACGT\n"))

    assert records[0].bases == "ACGT"


def test_record_without_sequence_lines_is_empty():
    records = parse_fasta(io.StringIO(">a\n>b\nAC\n"))

    assert [(r.accession, r.bases) for r in records] == [("a", ""), ("b", "AC")]


def test_content_before_first_header_is_rejected():
    with pytest.raises(MalformedFasta, match="line 1"):
        parse_fasta(io.StringIO("ACGT\n>s\nACGT\n"))


def test_empty_header_is_rejected():
    with pytest.raises(MalformedFasta, match="line 3"):
        parse_fasta(io.StringIO(">a\nAC\n>\nACGT\n"))


def test_invalid_utf8_is_malformed():
    with pytest.raises(MalformedFasta, match="line 2"):
        parse_fasta(io.BytesIO(b">EPI_ISL_1\nAC\xffGT\n"))


def test_read_fasta_reports_invalid_utf8_with_path(tmp_path: Path):
    path = tmp_path / "latin.fasta"
    path.write_bytes(b">EPI_ISL_1\nACGT\n>caf\xe9\nAC\n")

    with pytest.raises(MalformedFasta, match="latin.fasta: Invalid UTF-8 on line 3"):
        read_fasta(path)


def test_write_fasta_keeps_gisaid_header_and_skips_empty_sequences():
    out = io.StringIO()

    write_fasta([SequenceRecord(accession="EPI_ISL_406844", header=GISAID_HEADER, bases="")], out)

    assert out.getvalue() == f">{GISAID_HEADER}\n"


@pytest.mark.parametrize("text", ["", "\n\n", "   \n"])
def test_stream_without_records_is_empty_input(text: str):
    with pytest.raises(EmptyInput):
        parse_fasta(io.StringIO(text))


def test_iter_fasta_yields_nothing_for_empty_stream():
    assert list(iter_fasta(io.StringIO(""))) == []


class TestAccessionFromHeader:
    def test_gisaid_token_is_preferred(self):
        assert accession_from_header(GISAID_HEADER) == "EPI_ISL_406844"

    def test_falls_back_to_first_whitespace_token(self):
        assert accession_from_header("MN908947.3 Severe acute respiratory syndrome") == "MN908947.3"

    def test_blank_header_has_no_accession(self):
        assert accession_from_header("   ") == ""


def test_gisaid_header_carries_location_and_date():
    record = parse_fasta(io.StringIO(f">{GISAID_HEADER}\nACGT\n"))[0]

    assert record.location == "Australia"
    assert record.collection_date == "2020-01-25"


def test_with_metadata_prefers_sidecar_values_but_keeps_header_values_when_empty():
    record = SequenceRecord(accession="a", header="a", bases="AC", location="Australia", collection_date="2020-01")

    updated = with_metadata(record, "New Zealand", None)

    assert updated.location == "New Zealand"
    assert updated.collection_date == "2020-01"
    assert with_metadata(record, "", "2021-03-04").location == "Australia"


def test_write_then_read_reproduces_records(tmp_path: Path):
    records = [
        SequenceRecord(accession="a", header="a one", bases="ACGT" * 40),
        SequenceRecord(accession="b", header="b", bases="NNNN"),
    ]
    path = tmp_path / "out.fasta"
    with open(path, "w") as f:
        write_fasta(records, f, width=50)

    lines = path.read_text().splitlines()
    assert max(len(line) for line in lines) == 50
    assert [(r.accession, r.header, r.bases) for r in read_fasta(path)] == [
        ("a", "a one", "ACGT" * 40),
        ("b", "b", "NNNN"),
    ]


def test_read_fasta_errors_name_the_file(tmp_path: Path):
    path = tmp_path / "broken.fasta"
    path.write_text("ACGT\n")

    with pytest.raises(MalformedFasta, match="broken.fasta"):
        read_fasta(path)


def test_read_fasta_from_helper_file(tmp_path: Path):
    path = write_fasta_file(tmp_path / "in.fasta", {"x": "A" * 130})

    assert len(read_fasta(path)[0]) == 130
