"""Exception types raised by the engine."""


class EngineError(Exception):
    """Base class for all engine errors."""


class CodecError(EngineError):
    """A document could not be parsed or written.

    Carries a stable machine-readable ``code`` (e.g. ``MALFORMED_HEADER``,
    ``BAD_POS_LIST``) alongside the human-readable message.
    """

    def __init__(self, code: str, message: str):
        super().__init__(f"{code}: {message}")
        self.code = code
        self.message = message


class UnsupportedInterpolation(EngineError):
    """Operation not defined for the geometry's or property's interpolation mode."""


class EmptyCollection(EngineError):
    """Operation needs at least one sampled feature."""


class EmptyIntersection(EngineError):
    """Time window does not intersect the feature's temporal extent."""


class DimensionalityMismatch(EngineError):
    """Positions of different dimensionality were combined."""
