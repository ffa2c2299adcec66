"""Exception taxonomy shared across the package."""


class ImbkitError(Exception):
    """Base class for every imbkit-specific error."""


# --- dataset parsing and splitting ---

class MalformedHeader(ImbkitError):
    """KEEL header is missing @relation/@attribute/@data or is unparseable."""


class NonBinaryClass(ImbkitError):
    """The class attribute has a number of observed values other than two."""


class NonNumericValue(ImbkitError):
    """A cell that must be numeric could not be parsed (includes missing values)."""


class EmptyData(ImbkitError):
    """No data rows were found."""


class UnknownLabelColumn(ImbkitError):
    """The requested CSV label column does not exist."""


class DegenerateSplit(ImbkitError):
    """A train/test partition would be left without one of the classes."""


# --- neighbors ---

class LengthMismatch(ImbkitError):
    """Two sequences that must have equal length do not."""


class InsufficientCandidates(ImbkitError):
    """A neighbor query asked for more candidates than exist."""


# --- resampling ---

class DegenerateOutput(ImbkitError):
    """A sampler would produce a dataset without both classes."""


class TooFewMinority(ImbkitError):
    """SMOTE needs at least two minority samples to interpolate."""


# --- preprocessing / model shapes ---

class DimensionMismatch(ImbkitError):
    """Feature width differs from the fitted normalization parameters."""


class ShapeMismatch(ImbkitError):
    """Input shape is incompatible with the model or layer."""


class StaleCache(ImbkitError):
    """backward() was called without a preceding train-mode forward()."""


class NonFiniteLoss(ImbkitError):
    """Training produced a NaN/inf loss; carries the epoch index."""

    def __init__(self, epoch, message=None):
        self.epoch = epoch
        super().__init__(message or f"non-finite loss at epoch {epoch}")


# --- metrics ---

class Empty(ImbkitError):
    """Evaluation input has zero samples."""


class SingleClass(ImbkitError):
    """ROC construction needs both classes present."""


# --- aggregation ---

class AllUndefined(ImbkitError):
    """A metric was undefined in every run; no mean can be formed."""
