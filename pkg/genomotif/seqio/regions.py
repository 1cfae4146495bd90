import re
from collections.abc import Mapping
from enum import StrEnum
from functools import cache
from importlib import resources
from types import MappingProxyType

from genomotif.errors import UnknownRegion, UnmappedLocation

COUNTRY_TABLE_RESOURCE = "countries.tsv"


class Region(StrEnum):
    """Closed set of geographic class labels.

    Declaration order defines the class index used in datasets, logits and
    reports (0=Asia, 1=Europe, 2=America, 3=Oceania).
    """

    ASIA = "Asia"
    EUROPE = "Europe"
    AMERICA = "America"
    OCEANIA = "Oceania"

    @property
    def index(self) -> int:
        return list(Region).index(self)

    @property
    def short(self) -> str:
        """Label used in prediction reports."""
        return _SHORT_LABELS[self]

    @classmethod
    def from_index(cls, index: int) -> "Region":
        members = list(cls)
        if not 0 <= index < len(members):
            raise UnknownRegion(f"Region index {index} outside 0..{len(members) - 1}")
        return members[index]

    @classmethod
    def parse(cls, token: str) -> "Region":
        """Parse a region token case-insensitively; `Australia` is accepted as `Oceania`."""
        key = token.strip().lower()
        if key == "australia":
            return cls.OCEANIA
        for region in cls:
            if region.value.lower() == key:
                return region
        raise UnknownRegion(f"Unknown region {token!r}, expected one of {[r.value for r in cls]}")


_SHORT_LABELS: dict[Region, str] = {
    Region.ASIA: "ASIA",
    Region.EUROPE: "EUR",
    Region.AMERICA: "AME",
    Region.OCEANIA: "AUSTR",
}

NUM_REGIONS = len(Region)


@cache
def load_country_table() -> Mapping[str, Region]:
    """Load the shipped country/territory → region table (lowercased keys, file order)."""
    text = resources.files("genomotif.seqio.data").joinpath(COUNTRY_TABLE_RESOURCE).read_text(encoding="utf-8")
    return MappingProxyType(parse_country_table(text))


def parse_country_table(text: str) -> dict[str, Region]:
    table: dict[str, Region] = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        name, sep, region = line.partition("\t")
        if not sep:
            raise ValueError(f"Country table line {line_no} is not tab-separated: {raw!r}")
        table[name.strip().lower()] = Region.parse(region)
    return table


def region_of(location: str, table: Mapping[str, Region] | None = None) -> Region:
    """Map free-text location to a region by longest whole-word table match.

    Matching is case-insensitive; on equal length the earlier table entry
    wins.

    Raises:
        UnmappedLocation: If no table entry occurs in `location`.
    """
    if table is None:
        table = load_country_table()

    text = location.lower()
    best: tuple[int, Region] | None = None
    for name, region in table.items():
        if best is not None and len(name) <= best[0]:
            continue
        if re.search(rf"(?<![a-z]){re.escape(name)}(?![a-z])", text):
            best = (len(name), region)

    if best is None:
        raise UnmappedLocation(f"No region mapping for location {location!r}")
    return best[1]
