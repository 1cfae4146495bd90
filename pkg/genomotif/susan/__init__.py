from genomotif.susan.filter import (
    FilteredImage,
    GrayImage,
    replicate_channels,
    similarity_lut,
    susan_edges,
    susan_edges_naive,
    to_grayscale,
    usan_area,
)
from genomotif.susan.params import MASK, MASK_SIZE, BorderMode, OutputMode, Similarity, SusanParams, circular_mask

__all__ = [
    "BorderMode",
    "FilteredImage",
    "GrayImage",
    "MASK",
    "MASK_SIZE",
    "OutputMode",
    "Similarity",
    "SusanParams",
    "circular_mask",
    "replicate_channels",
    "similarity_lut",
    "susan_edges",
    "susan_edges_naive",
    "to_grayscale",
    "usan_area",
]
