import logging
from collections.abc import Iterator

import numpy as np
import pytest

from genomotif.motif import FillMode, MotifGeometry
from genomotif.nn import DenseBlockSpec, NetworkSpec
from genomotif.pipeline import Dataset, build_dataset, synthetic_corpus
from genomotif.seqio import MetadataEntry, SequenceRecord
from genomotif.susan import SusanParams

SMALL_SIZE = 24


@pytest.fixture
def small_geometry() -> MotifGeometry:
    return MotifGeometry.square(SMALL_SIZE, fill_mode=FillMode.DISK)


@pytest.fixture
def small_spec() -> NetworkSpec:
    block = DenseBlockSpec(num_layers=2, growth_rate=4)
    return NetworkSpec(image_size=SMALL_SIZE, stem_channels=8, blocks=(block, block))


@pytest.fixture
def small_corpus(small_geometry: MotifGeometry) -> tuple[list[SequenceRecord], dict[str, MetadataEntry]]:
    return synthetic_corpus(per_region=6, length=small_geometry.capacity, seed=0)


@pytest.fixture
def small_dataset(
    small_corpus: tuple[list[SequenceRecord], dict[str, MetadataEntry]], small_geometry: MotifGeometry
) -> Dataset:
    records, metadata = small_corpus
    return build_dataset(records, metadata, small_geometry, SusanParams())


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture(autouse=True)
def _restore_package_logger() -> Iterator[None]:
    logger = logging.getLogger("genomotif")
    handlers, level, propagate = list(logger.handlers), logger.level, logger.propagate
    yield
    logger.handlers[:] = handlers
    logger.setLevel(level)
    logger.propagate = propagate


@pytest.fixture
def package_logs(caplog: pytest.LogCaptureFixture) -> Iterator[pytest.LogCaptureFixture]:
    """`caplog` attached to the package logger, which stops propagating once the CLI configures it."""
    logger = logging.getLogger("genomotif")
    logger.addHandler(caplog.handler)
    logger.setLevel(logging.DEBUG)
    caplog.handler.setLevel(logging.DEBUG)
    try:
        yield caplog
    finally:
        logger.removeHandler(caplog.handler)
