import numpy as np

from genomotif.seqio import MetadataEntry, Region, SequenceRecord

# Share of `A` per region; the rest is split evenly over C, G and T.
DOMINANCE: dict[Region, float] = {
    Region.ASIA: 0.25,
    Region.EUROPE: 0.45,
    Region.AMERICA: 0.65,
    Region.OCEANIA: 0.85,
}

_BASES = np.array(list("ACGT"))


def composition_profile(region: Region) -> np.ndarray:
    """Base probabilities in A, C, G, T order."""
    a = DOMINANCE[region]
    rest = (1.0 - a) / 3
    return np.array([a, rest, rest, rest])


def synthetic_corpus(
    per_region: int = 100, length: int = 29_900, seed: int = 0
) -> tuple[list[SequenceRecord], dict[str, MetadataEntry]]:
    """Labeled sequences whose base composition depends on the region.

    Profiles differ by 20 percentage points in `A`, so motifs differ in how
    often neighboring pixels share a color, which survives the SUSAN filter.
    """
    records: list[SequenceRecord] = []
    metadata: dict[str, MetadataEntry] = {}
    for region in Region:
        rng = np.random.default_rng([seed, region.index])
        draws = rng.choice(_BASES, size=(per_region, length), p=composition_profile(region))
        for i, row in enumerate(draws):
            accession = f"SYN_{region.short}_{i:04d}"
            records.append(
                SequenceRecord(
                    accession=accession,
                    header=f"{accession} synthetic|{region.value}",
                    bases="".join(row),
                    location=region.value,
                )
            )
            metadata[accession] = MetadataEntry(region=region, location=region.value, date=None)
    return records, metadata
