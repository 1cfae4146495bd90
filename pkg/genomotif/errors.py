class DataError(ValueError):
    """Base class for errors caused by invalid input data (CLI exit code 2)."""


class MalformedFasta(DataError):
    pass


class EmptyInput(DataError):
    pass


class MissingColumn(DataError):
    pass


class UnknownRegion(DataError):
    pass


class DuplicateAccession(DataError):
    pass


class UnmappedLocation(DataError):
    pass


class UnlabeledRecord(DataError):
    pass


class ShapeMismatch(DataError):
    pass


class DegenerateBatch(DataError):
    pass


class NonFiniteInput(DataError):
    pass


class EmptyDataset(DataError):
    pass


class ClassTooSmall(DataError):
    pass


class TooFewSamples(DataError):
    """A training split too small for batch statistics."""


class DegenerateClass(DataError):
    pass


class FormatError(DataError):
    """A binary artifact (dataset or checkpoint) has a bad magic, version or layout."""


class NonFiniteLoss(RuntimeError):
    """Training produced a NaN or infinite loss."""


class ConfigError(ValueError):
    """Invalid configuration file or option value (CLI exit code 1)."""
