"""Exception hierarchy shared by every shrinkbench package."""


class ShrinkBenchError(Exception):
    """Base class for all errors raised on purpose by shrinkbench."""


class ConfigError(ShrinkBenchError):
    """Invalid run configuration or command-line usage."""


class DataError(ShrinkBenchError):
    """Input data cannot be used as given."""


class CsvFormatError(DataError):
    pass


class AlignmentError(DataError):
    pass


class HorizonError(DataError):
    pass


class ShrinkError(DataError):
    """Shrinking left too few rows for cross-validation."""


class MetricError(ValueError):
    """A distance measure received inputs it cannot compare."""


class RankDeficientError(ValueError):
    """Unregularized least squares on a rank-deficient design."""


class UndefinedRSquaredError(ValueError):
    """R-squared requested for a target with zero total variation."""


class SelectionError(ShrinkBenchError):
    pass
