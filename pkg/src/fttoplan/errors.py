"""Exception hierarchy shared by all fttoplan modules."""


class FttoError(Exception):
    """Base class for every error raised by this package."""


class SchemaError(FttoError):
    """A document does not conform to the canonical schema."""


class UnknownReferenceError(FttoError):
    """A document references an id that does not exist (dangling id)."""


class InvariantError(FttoError):
    """A structural invariant of the plant model is violated.

    The message carries the path to the offending element.
    """


class CapacityError(FttoError):
    """Not enough free (tube, side) slots, fibers or core ports."""


class ReserveError(FttoError):
    """A plan would drop the tube-side reserve below the target (strict mode)."""


class ModeError(FttoError):
    """An uplink is in the wrong mode for the requested operation."""


class PolarityError(FttoError):
    """Both ends of a single-fiber link would carry the same BiDi variant."""


class RangeError(FttoError):
    """An index is outside its allowed range (color row, pair number...)."""


class UnknownColorError(FttoError):
    """A color name is not part of the selected color scheme."""


class ParseError(FttoError):
    """A label string is malformed; `position` is the offending character index."""

    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


class ReachError(FttoError):
    """A copper run exceeds the 100 m reach limit."""


class ClassError(FttoError):
    """A PoE class cannot carry the requested injected power."""


class MissingDataError(FttoError):
    """A required per-model figure (e.g. base draw) is absent from the plant."""


class UnknownElementError(FttoError):
    """A failure scenario targets an element the plant does not contain."""
