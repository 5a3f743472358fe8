"""Exception hierarchy shared by all modules."""


class BratteliError(Exception):
    """Base class for every error raised by this package."""


class FiniteDiagramExhausted(BratteliError):
    """A level beyond the end of a purely finite diagram was requested."""


class InvalidPrefix(BratteliError):
    """A path prefix does not exist in the diagram it was used with."""


class InvalidPath(BratteliError):
    """An infinite path is malformed or inconsistent with its diagram."""


class MaxPathNoExtension(BratteliError):
    """The Vershik map was applied to a maximal path with no extension rule."""


class DomainMismatch(BratteliError):
    """Two ordered edge sets cannot be composed or compared."""


class DiagramMismatch(BratteliError):
    """Two premorphisms do not share the diagrams the operation requires."""


class PrefixLengthMismatch(BratteliError):
    """A prefix has the wrong length for the premorphism level it is used at."""


class NotExtreme(BratteliError):
    """A path that must be maximal (or minimal) is not."""


class NotRank2(BratteliError):
    """The diagram does not have exactly two vertices per periodic level."""


class PatternMismatch(BratteliError):
    """Neither rank-2 structure was found within the telescoping window."""


class ParseError(BratteliError):
    """Malformed JSON input; the message names the offending field."""


class ValidationError(BratteliError):
    """Well-formed input that fails validation.

    The failing :class:`~ordered_bratteli.diagram.ValidationReport` is kept in
    ``report``.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
        self.report = report
