"""Exception hierarchy shared across the package."""


class PilevibError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(PilevibError):
    """Tensor shapes are inconsistent with the network layout."""


class DataValidationError(PilevibError):
    """An input record or CSV cell violates the feature schema."""


class ScalerFitError(PilevibError):
    """The standardizer cannot be fitted (e.g. zero-variance feature)."""


class SplitError(PilevibError):
    """The dataset is too small to split at the configured ratios."""


class TrainingError(PilevibError):
    """Training diverged or was configured inconsistently."""


class ModelFileError(PilevibError):
    """A model file is missing, corrupted, or of an unsupported version."""
