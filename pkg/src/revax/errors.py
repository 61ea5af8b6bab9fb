"""Exception hierarchy shared by the library and the CLI exit-code scheme."""


class RevaxError(Exception):
    """Base class for all library errors."""


class ModelError(RevaxError, ValueError):
    """Invalid model data: dimension mismatch, negative entries, bad weights."""


class SchemaError(ModelError):
    """Malformed or unrecognized input document."""


class ConvergenceError(RevaxError, RuntimeError):
    """A numeric routine failed to reach its tolerance."""


class PreconditionError(RevaxError, ValueError):
    """A documented operation precondition does not hold."""


class GradientUndefined(RevaxError):
    """The Perron root is not simple; no gradient exists at this point."""
