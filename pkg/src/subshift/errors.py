"""Exception types raised across the package."""


class SubshiftError(Exception):
    """Base class for every error raised by this package."""


class TranslateOutOfMonoid(SubshiftError):
    pass


class NotABoxDomain(SubshiftError):
    pass


class EmptySubshiftSuspected(SubshiftError):
    """No admissible pattern exists at some scale.

    For d = 1 with margin 0 this proves the subshift is empty. For d >= 2 it
    only proves local inconsistency at that scale.
    """

    def __init__(self, n, message="empty subshift"):
        super().__init__(message)
        self.n = n


class NotOneDimensional(SubshiftError):
    pass


class ZeroMatrix(SubshiftError):
    pass


class Reducible(SubshiftError):
    pass


class ConvergenceError(SubshiftError):
    pass


class StripTooNarrow(SubshiftError):
    pass


class InconclusiveTrend(SubshiftError):
    pass


class BoxTooSmall(SubshiftError):
    pass


class DictionaryError(SubshiftError):
    pass


class BoundsViolated(SubshiftError):
    pass


class MalformedEncoding(SubshiftError):
    pass


class InconsistentPointSource(SubshiftError):
    pass


class ParseError(SubshiftError):
    def __init__(self, message, line=None, column=None):
        loc = ""
        if line is not None:
            loc = f"line {line}" + (f", column {column}" if column is not None else "") + ": "
        super().__init__(loc + message)
        self.line = line
        self.column = column


class SemanticError(ParseError):
    pass
