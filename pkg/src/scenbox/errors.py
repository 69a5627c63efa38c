"""Exception types shared across the toolkit."""


class ScenboxError(Exception):
    """Base class for all toolkit errors."""


class InvalidBoxError(ScenboxError):
    """A hyperbox has a lower bound above its upper bound."""


class DimensionMismatchError(ScenboxError):
    """Operands disagree on the number of dimensions."""


class UnsupportedDimensionError(ScenboxError):
    """Requested dimensionality exceeds what the sampler supports."""


class UnknownDgpError(ScenboxError):
    """Name not present in the data-generating-process registry."""


class InvalidLabelsError(ScenboxError):
    """Operation requires binary labels but got something else."""


class UndefinedCoverageError(ScenboxError):
    """Coverage is undefined because the dataset has no positive labels."""


class ValidationUndefinedError(ScenboxError):
    """Peeling was invoked with an empty validation set."""


class UndefinedMuError(ScenboxError):
    """A reference box contains no ground-truth points."""


class InvalidConfigError(ScenboxError):
    """A configuration value is outside its legal range."""


class SimulationFailureError(ScenboxError):
    """The grid simulation produced a non-finite state."""
