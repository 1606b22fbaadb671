"""Exception hierarchy.

Every domain failure derives from :class:`LwsError` so the CLI can map it to
exit code 1 without catching programming errors.
"""


class LwsError(Exception):
    """Base class for recoverable domain errors."""


class InvalidParams(LwsError, ValueError):
    pass


class OutOfRange(LwsError, ValueError):
    pass


class TooShort(LwsError, ValueError):
    pass


class ShapeMismatch(LwsError, ValueError):
    pass


class EmptyInput(LwsError, ValueError):
    pass


class NoGesture(LwsError):
    pass


class TargetTooShort(LwsError, ValueError):
    pass


class DegenerateFlat(LwsError, ValueError):
    pass


class KTooLarge(LwsError, ValueError):
    pass


class TooFewSamples(LwsError, ValueError):
    pass


class SingleSubject(LwsError, ValueError):
    pass


class LengthMismatch(LwsError, ValueError):
    pass


class DatasetError(LwsError):
    """Malformed trace file, manifest or dataset directory."""
